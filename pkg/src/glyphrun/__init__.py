"""Script identification of South Slavic documents from run-length texture of letter zone codes."""

from .alphabet import (
    SCRIPTS,
    CodeSequence,
    MappingTable,
    ScriptClass,
    classify_letter,
    default_table,
    encode_text,
    load_mapping_table,
    to_gray_image,
)
from .texture import (
    FeatureVector,
    RunLengthMatrix,
    build_run_length_matrix,
    compute_features,
    derive_stats,
    feature_matrix,
)

__version__ = "0.1.0"
