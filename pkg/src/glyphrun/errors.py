"""Exception types shared across the package."""


class GlyphrunError(ValueError):
    """Base class for validation failures (bad input data, bad parameters)."""


class TableFormatError(GlyphrunError):
    pass


class DuplicateEntryError(TableFormatError):
    pass


class OutOfBlockError(TableFormatError):
    pass


class OutOfBlockWarning(UserWarning):
    pass


class EmptyDocumentError(GlyphrunError):
    def __init__(self, doc_id, detail="no mapped characters"):
        self.doc_id = doc_id
        super().__init__(f"{doc_id}: empty document ({detail})")


class CorpusError(GlyphrunError):
    pass


class ClusteringError(GlyphrunError):
    pass


class EvaluationError(GlyphrunError):
    pass
