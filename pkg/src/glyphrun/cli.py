"""Command-line interface.

Subcommands: ``synth``, ``encode``, ``features``, ``classify``, ``evaluate``.
Option values resolve as command-line flag > ``GLYPHRUN_<OPTION>`` environment
variable > JSON config file (``--config``; top-level keys, overridden by a
section named after the subcommand) > built-in default.

Exit codes: 0 success, 1 I/O error, 2 validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from ._io import atomic_write_text, sha256_text
from .alphabet import SCRIPTS, encode_text, format_coded, load_tables, parse_coded
from .corpus import generate_synthetic, ingest_directory, load_models, read_truth_csv, write_dataset
from .errors import GlyphrunError
from .evaluation import aggregate_runs, format_confusion_csv, format_report, score
from .gaicda import (
    GaParams,
    classify_gaicda,
    cluster_em,
    cluster_hierarchical,
    format_params,
    format_partition_csv,
    normalize_features,
    parse_partition_csv,
)
from .report import (
    PLOT_FEATURES,
    feature_ranges,
    format_ranges_csv,
    format_separability,
    range_plot_svg,
)
from .texture import FEATURE_NAMES, feature_matrix, format_features_csv, parse_features_csv

ENV_PREFIX = "GLYPHRUN_"


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise GlyphrunError(f"not a boolean: {value!r}")


def _counts(value) -> dict[str, int]:
    parts = [p.strip() for p in str(value).split(",") if p.strip()]
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise GlyphrunError(f"bad per-script count {value!r}") from None
    if len(nums) == 1:
        nums = nums * len(SCRIPTS)
    if len(nums) != len(SCRIPTS) or min(nums) < 0:
        raise GlyphrunError(f"per-script counts need 1 or {len(SCRIPTS)} non-negative integers ({','.join(SCRIPTS)})")
    return dict(zip(SCRIPTS, nums))


def _subset(value) -> tuple[str, ...]:
    names = tuple(p.strip().lower() for p in str(value).split(",") if p.strip())
    bad = [n for n in names if n not in FEATURE_NAMES]
    if bad or not names:
        raise GlyphrunError(f"feature subset must be drawn from {','.join(FEATURE_NAMES)}")
    return names


# dest -> (type, default); None default means "required unless noted"
SHARED = {"seed": (int, 0), "out": (str, None)}
OPTIONS = {
    "synth": {
        "train_per_script": (_counts, "34,33,33"),
        "test_per_script": (_counts, "5"),
        "models_dir": (str, ""),
        "force": (_bool, False),
    },
    "encode": {
        "corpus": (str, None),
        "split": (str, "all"),
        "tables_dir": (str, ""),
        "break_runs_at_space": (_bool, False),
    },
    "features": {
        "corpus": (str, ""),
        "coded": (str, ""),
        "split": (str, "all"),
        "tables_dir": (str, ""),
        "break_runs_at_space": (_bool, False),
        "plot": (_bool, False),
    },
    "classify": {
        "features": (str, ""),
        "corpus": (str, ""),
        "split": (str, "test"),
        "tables_dir": (str, ""),
        "break_runs_at_space": (_bool, False),
        "method": (str, "gaicda"),
        "runs": (int, 1),
        "clusters": (int, 3),
        "threshold": (int, 5),
        "neighbors": (int, 3),
        "population": (int, 100),
        "generations": (int, 100),
        "crossover": (float, 0.8),
        "mutation": (float, 0.2),
        "elitism": (float, 0.1),
        "feature_subset": (_subset, "sre,lre,rp"),
    },
    "evaluate": {
        "partition": (str, ""),
        "truth": (str, None),
        "split": (str, "all"),
    },
}
FLAGS = {"force", "break_runs_at_space", "plot"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphrun", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "synth": "generate the synthetic train/test corpus",
        "encode": "write zone-code sequences for a corpus",
        "features": "compute run-length features (optionally with range plots)",
        "classify": "cluster documents (gaicda | hierarchical | em)",
        "evaluate": "score partitions against script labels",
    }
    for name, options in OPTIONS.items():
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", default=None, help="JSON config file")
        for dest in [*SHARED, *options]:
            flag = "--" + dest.replace("_", "-")
            if dest in FLAGS:
                p.add_argument(flag, dest=dest, action="store_const", const=True, default=None)
            elif name == "evaluate" and dest == "partition":
                p.add_argument(flag, dest=dest, nargs="+", default=None, help="partition CSV file(s) or directories")
            else:
                p.add_argument(flag, dest=dest, default=None)
    return parser


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise GlyphrunError(f"{path}: invalid JSON config ({exc})") from None
    if not isinstance(data, dict):
        raise GlyphrunError(f"{path}: config must be a JSON object")
    return data


def resolve(command: str, args: argparse.Namespace, environ=None) -> dict:
    """Merge flags, environment and config file into one validated option dict."""
    environ = os.environ if environ is None else environ
    config_path = args.config or environ.get(ENV_PREFIX + "CONFIG")
    config = _load_config(config_path)
    section = config.get(command, {}) if isinstance(config.get(command), dict) else {}
    resolved = {}
    for dest, (kind, default) in {**SHARED, **OPTIONS[command]}.items():
        value = getattr(args, dest, None)
        if value is None:
            value = environ.get(ENV_PREFIX + dest.upper())
        if value is None:
            value = section.get(dest, config.get(dest))
        if value is None:
            value = default
        if value is None:
            raise GlyphrunError(f"{command}: --{dest.replace('_', '-')} is required")
        if dest == "partition":
            value = ([value] if value else []) if isinstance(value, str) else list(value)
        elif kind is not str or not isinstance(value, str):
            try:
                value = kind(value)
            except (TypeError, ValueError):
                raise GlyphrunError(f"{command}: bad value for --{dest.replace('_', '-')}: {value!r}") from None
        resolved[dest] = value
    return resolved


def _check_split(split: str, allowed=("train", "test", "all")) -> str:
    if split not in allowed:
        raise GlyphrunError(f"--split must be one of {', '.join(allowed)}")
    return split


def _encode_corpus(opts):
    tables = load_tables(opts["tables_dir"] or None)
    dataset = ingest_directory(opts["corpus"])
    docs = dataset.subset(_check_split(opts["split"]))
    seqs = [
        encode_text(d.text, tables[d.script], d.doc_id, d.script, opts["break_runs_at_space"]) for d in docs
    ]
    return seqs


def cmd_synth(opts) -> int:
    models = load_models(opts["models_dir"] or None)
    dataset = generate_synthetic(models, opts["train_per_script"], opts["test_per_script"], opts["seed"])
    write_dataset(dataset, opts["out"], force=opts["force"])
    print(f"wrote {len(dataset.documents)} documents to {opts['out']} (manifest {dataset.manifest_hash[:12]})")
    return 0


def cmd_encode(opts) -> int:
    seqs = _encode_corpus(opts)
    out = Path(opts["out"]) / "coded.tsv"
    atomic_write_text(out, format_coded(seqs))
    print(f"wrote {len(seqs)} coded documents to {out}")
    return 0


def _features_from(opts):
    if opts.get("features"):
        path = Path(opts["features"])
        return parse_features_csv(path.read_text(encoding="utf-8"), str(path))
    if opts.get("coded"):
        path = Path(opts["coded"])
        return feature_matrix(parse_coded(path.read_text(encoding="utf-8").splitlines(), str(path)))
    if opts.get("corpus"):
        return feature_matrix(_encode_corpus(opts))
    raise GlyphrunError("give an input: --corpus" + (" or --coded" if "coded" in opts else " or --features"))


def cmd_features(opts) -> int:
    vectors = _features_from(opts)
    out = Path(opts["out"])
    atomic_write_text(out / "features.csv", format_features_csv(vectors))
    if opts["plot"]:
        ranges = feature_ranges(vectors)
        if not ranges:
            raise GlyphrunError("--plot needs script labels (use --corpus input)")
        for f in PLOT_FEATURES:
            atomic_write_text(out / f"{f}.svg", range_plot_svg(vectors, f))
        atomic_write_text(out / "ranges.csv", format_ranges_csv(ranges))
        atomic_write_text(out / "separability.txt", format_separability(ranges))
    print(f"wrote features for {len(vectors)} documents to {out}")
    return 0


def _classify_once(method, vectors, opts, seed):
    doc_ids = [v.doc_id for v in vectors]
    if method == "gaicda":
        params = GaParams(
            population_size=opts["population"],
            generations=opts["generations"],
            crossover_rate=opts["crossover"],
            mutation_rate=opts["mutation"],
            elitism_fraction=opts["elitism"],
            target_clusters=opts["clusters"],
            rng_seed=seed,
        )
        return classify_gaicda(vectors, params, opts["threshold"], opts["neighbors"], opts["feature_subset"])
    Z = normalize_features(vectors, opts["feature_subset"])
    if method == "hierarchical":
        return cluster_hierarchical(Z, doc_ids, opts["clusters"], seed)
    return cluster_em(Z, doc_ids, opts["clusters"], seed)


def cmd_classify(opts) -> int:
    method = opts["method"]
    if method not in ("gaicda", "hierarchical", "em"):
        raise GlyphrunError("--method must be gaicda, hierarchical or em")
    if opts["runs"] < 1:
        raise GlyphrunError("--runs must be >= 1")
    vectors = _features_from(opts)
    input_digest = sha256_text(format_features_csv(vectors))
    out = Path(opts["out"])
    rows = ["run,seed,k,partition,sha256\n"]
    for r in range(opts["runs"]):
        seed = opts["seed"] + r
        partition = _classify_once(method, vectors, opts, seed)
        record = {
            "method": method,
            "seed": seed,
            "documents": len(vectors),
            "input_sha256": input_digest,
            **{k: v for k, v in partition.params.items() if k not in ("rng_seed",)},
            "k": partition.k,
        }
        suffix = "" if opts["runs"] == 1 else f"_{r:03d}"
        text = format_partition_csv(partition)
        atomic_write_text(out / f"partition{suffix}.csv", text)
        atomic_write_text(out / f"params{suffix}.txt", format_params(record))
        rows.append(f"{r},{seed},{partition.k},partition{suffix}.csv,{sha256_text(text)}\n")
    if opts["runs"] > 1:
        atomic_write_text(out / "aggregate.csv", "".join(rows))
    print(f"wrote {opts['runs']} {method} partition(s) to {out}")
    return 0


def _partition_files(items) -> list[Path]:
    files: list[Path] = []
    for item in items:
        path = Path(item)
        if path.is_dir():
            files.extend(sorted(path.glob("partition*.csv")))
        else:
            files.append(path)
    if not files:
        raise GlyphrunError("no partition files given")
    return files


def cmd_evaluate(opts) -> int:
    split = _check_split(opts["split"])
    truth_path = Path(opts["truth"])
    truth = read_truth_csv(truth_path.read_text(encoding="utf-8"), split, str(truth_path))
    reports = []
    for path in _partition_files(opts["partition"]):
        partition = parse_partition_csv(path.read_text(encoding="utf-8"), str(path))
        docs = set(partition.assignment)
        extra = sorted(docs - truth.keys())
        missing = sorted(truth.keys() - docs)
        if extra:
            raise GlyphrunError(f"{path}: docId {extra[0]} has no ground-truth label")
        if missing:
            raise GlyphrunError(f"{path}: docId {missing[0]} is missing from the partition")
        report = score(partition, truth)
        report.extra.update(method=partition.method, seed=partition.seed, k=partition.k)
        reports.append(report)
    out = Path(opts["out"])
    if len(reports) == 1:
        atomic_write_text(out / "report.txt", format_report(reports[0], "evaluation"))
        atomic_write_text(out / "confusion.csv", format_confusion_csv(reports[0]))
    else:
        agg = aggregate_runs(reports)
        methods = sorted({r.extra["method"] for r in reports})
        agg.extra.update(method=",".join(methods))
        atomic_write_text(out / "report.txt", format_report(agg, "evaluation, mean (sample std) over runs"))
        keys = list(reports[0].flat())
        lines = ["run,seed," + ",".join(keys) + "\n"]
        for i, rep in enumerate(reports):
            flat = rep.flat()
            lines.append(f"{i},{rep.extra['seed']}," + ",".join(repr(flat[k]) for k in keys) + "\n")
        atomic_write_text(out / "runs.csv", "".join(lines))
    macro = reports[0].macro if len(reports) == 1 else aggregate_runs(reports).macro
    print(f"macro precision={macro.precision:.4f} recall={macro.recall:.4f} f={macro.f_measure:.4f} ({out})")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "encode": cmd_encode,
    "features": cmd_features,
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args.command, args)
        return COMMANDS[args.command](opts)
    except (GlyphrunError, ValueError) as exc:
        print(f"glyphrun {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"glyphrun {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
