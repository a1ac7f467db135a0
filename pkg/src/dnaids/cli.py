"""Command-line front end: ``dnaids build|detect|evaluate|encode``.

Exit codes: 0 success, 1 data error, 2 missing input, 3 encoder/database
fingerprint mismatch, 4 size out of range, 64 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .dataset import (
    default_taxonomy_path,
    feature_stats,
    load_schema,
    load_taxonomy,
    read_records,
)
from .detection import MODES, DetectionConfig, WeightTable, build_engine, detect_stream, load_weights
from .encoding import DEFAULT_LEVELS, fit_encoder, load_model, save_model
from .errors import FingerprintMismatch, IDSError, MissingFile, OutOfRange
from .reporting import score_run, series_from_verdicts, write_alert_log, write_series_csv
from .signatures import (
    ConflictPolicy,
    build_database,
    group_spans,
    load_database,
    save_database,
    split_groups,
)

logger = logging.getLogger("dnaids")

EXIT_OK, EXIT_DATA, EXIT_MISSING, EXIT_FINGERPRINT, EXIT_RANGE, EXIT_USAGE = 0, 1, 2, 3, 4, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if any(n < 0 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be non-negative")
    return sizes


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


# flag -> (converter, builtin default); every flag defaults to None on the
# command line so values from --config can fill the gaps.
OPTIONS = {
    "schema": (Path, None),
    "taxonomy": (str, None),
    "train": (Path, None),
    "test": (Path, None),
    "encoder": (Path, None),
    "db": (Path, None),
    "weights": (Path, None),
    "mode": (str, "exact"),
    "tau": (float, 0.0),
    "levels": (int, DEFAULT_LEVELS),
    "policy": (str, ConflictPolicy.DROP.value),
    "granularity": (str, "record"),
    "sizes": (_sizes, None),
    "skip_bad": (_bool, False),
    "workers": (int, 1),
    "out_log": (Path, None),
    "out_series": (Path, None),
    "limit": (int, None),
}


@dataclass
class RunConfig:
    command: str
    schema: Path | None = None
    taxonomy: str | None = None
    train: Path | None = None
    test: Path | None = None
    encoder: Path | None = None
    db: Path | None = None
    weights: Path | None = None
    mode: str = "exact"
    tau: float = 0.0
    levels: int = DEFAULT_LEVELS
    policy: str = ConflictPolicy.DROP.value
    granularity: str = "record"
    sizes: list[int] | None = None
    skip_bad: bool = False
    workers: int = 1
    out_log: Path | None = None
    out_series: Path | None = None
    limit: int | None = None

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            flags = ", ".join("--" + n.replace("_", "-") for n in missing)
            raise UsageError(f"{self.command} needs {flags}")

    def validate(self):
        if self.mode not in MODES:
            raise UsageError(f"--mode must be one of {', '.join(MODES)}")
        if self.policy not in {p.value for p in ConflictPolicy}:
            raise UsageError("--policy must be drop_conflicts or keep_conflicts")
        if self.granularity not in ("record", "groups"):
            raise UsageError("--granularity must be record or groups")
        if self.tau < 0:
            raise UsageError("--tau must be >= 0")
        if self.levels < 2:
            raise UsageError("--levels must be >= 2")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.sizes is not None and any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise UsageError("--sizes must be strictly ascending")


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value file; command-line flags win")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--schema", help="feature schema file (default: bundled NSL-KDD schema)")
    common.add_argument("--taxonomy",
                        help="subtype,class file; 'extended' selects the bundled NSL-KDD test taxonomy")
    common.add_argument("--train", help="labelled training records")
    common.add_argument("--test", help="records to classify")
    common.add_argument("--encoder", help="encoder model file")
    common.add_argument("--db", help="signature database file")
    common.add_argument("--weights", help="nucleotide weight table (A=..., C=..., G=..., T=...)")
    common.add_argument("--mode", help="exact | substring | weighted (default exact)")
    common.add_argument("--tau", help="weighted-mode distance threshold (default 0)")
    common.add_argument("--levels", help="quantization levels for continuous features (default 256)")
    common.add_argument("--policy", help="drop_conflicts | keep_conflicts (default drop_conflicts)")
    common.add_argument("--granularity", help="record | groups: signature granularity for build")
    common.add_argument("--sizes", help="comma-separated ascending prefix sizes")
    common.add_argument("--skip-bad", action="store_const", const="true", dest="skip_bad",
                        help="skip unparsable lines instead of failing")
    common.add_argument("--workers", help="worker processes for detection (default 1)")
    common.add_argument("--out-log", help="alert log path")
    common.add_argument("--out-series", help="false-positive series CSV path")
    common.add_argument("--limit", help="encode: number of records to print")

    parser = _Parser(prog="dnaids", description="Nucleotide-encoded signature intrusion detection")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("build", parents=[common], help="fit the encoder and build the signature database")
    sub.add_parser("detect", parents=[common], help="classify records and write the alert log")
    sub.add_parser("evaluate", parents=[common], help="score labelled records and write the FP series")
    sub.add_parser("encode", parents=[common], help="print the nucleotide sequence of each record")
    return parser


def read_config_file(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    values = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in OPTIONS:
            raise UsageError(f"{path}:{line_no}: unknown setting {key!r}")
        values[key] = val.strip()
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    cfg = RunConfig(command=args.command)
    for name, (convert, default) in OPTIONS.items():
        raw = getattr(args, name, None)
        if raw is None:
            raw = file_values.get(name)
        if raw is None:
            value = default
        else:
            try:
                value = convert(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"--{name.replace('_', '-')}: {exc}") from None
        setattr(cfg, name, value)
    cfg.validate()
    return cfg


def _check_inputs(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise MissingFile(p)


def _taxonomy(cfg: RunConfig):
    if cfg.taxonomy == "extended":
        return load_taxonomy(default_taxonomy_path(extended=True))
    return load_taxonomy(cfg.taxonomy)


def _detection_config(cfg: RunConfig) -> DetectionConfig:
    weights = load_weights(cfg.weights) if cfg.weights else WeightTable()
    return DetectionConfig(mode=cfg.mode, tau=cfg.tau, weights=weights)


def _load_matched(cfg: RunConfig):
    model = load_model(cfg.encoder)
    db = load_database(cfg.db)
    if db.encoder_fingerprint != model.fingerprint:
        raise FingerprintMismatch(db.encoder_fingerprint, model.fingerprint)
    return model, db


def cmd_build(cfg: RunConfig) -> int:
    cfg.require("train", "encoder", "db")
    _check_inputs(cfg.train, cfg.schema, cfg.taxonomy if cfg.taxonomy != "extended" else None)
    schema = load_schema(cfg.schema)
    taxonomy = _taxonomy(cfg)
    records = read_records(cfg.train, schema, taxonomy, cfg.skip_bad)
    model = fit_encoder(feature_stats(records, schema), schema, cfg.levels)
    encoded = [(model.encode(r.values)[0], r.label_class) for r in records]
    if cfg.granularity == "groups":
        encoded = split_groups(encoded, group_spans(schema, model))
    db = build_database(encoded, model.fingerprint, cfg.policy,
                        require_equal_length=cfg.granularity == "record")
    save_model(model, cfg.encoder)
    save_database(db, cfg.db)

    print(f"records: {len(records)}")
    print(f"encoder: {model.fingerprint} (sequence length {model.total_length})")
    for cls, n in db.class_counts().items():
        print(f"signatures[{cls.value}]: {n}")
    print(f"signatures: {len(db)}")
    print(f"conflicts: {db.conflict_count} ({db.policy.value})")
    return EXIT_OK


def cmd_detect(cfg: RunConfig) -> int:
    cfg.require("test", "encoder", "db", "out_log")
    _check_inputs(cfg.test, cfg.encoder, cfg.db, cfg.schema, cfg.weights)
    model, db = _load_matched(cfg)
    engine = build_engine(db, _detection_config(cfg))
    records = read_records(cfg.test, load_schema(cfg.schema), None, cfg.skip_bad)

    totals = {"attack": 0, "normal": 0, "unknown_tokens": 0}

    def tally(verdicts):
        for v in verdicts:
            totals["attack" if v.is_attack else "normal"] += 1
            totals["unknown_tokens"] += v.unknown_count
            yield v

    write_alert_log(tally(detect_stream(records, model, engine, workers=cfg.workers)), cfg.out_log)
    n = totals["attack"] + totals["normal"]
    pct = 100.0 * totals["attack"] / n if n else 0.0
    print(f"records: {n}")
    print(f"attack: {totals['attack']} ({pct:.2f}%)")
    print(f"normal: {totals['normal']}")
    print(f"unseen symbolic tokens: {totals['unknown_tokens']}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    cfg.require("test", "encoder", "db", "out_series")
    _check_inputs(cfg.test, cfg.encoder, cfg.db, cfg.schema, cfg.weights,
                  cfg.taxonomy if cfg.taxonomy != "extended" else None)
    model, db = _load_matched(cfg)
    engine = build_engine(db, _detection_config(cfg))
    records = read_records(cfg.test, load_schema(cfg.schema), _taxonomy(cfg), cfg.skip_bad)
    sizes = cfg.sizes if cfg.sizes is not None else [len(records)]
    for n in sizes:
        if n > len(records):
            raise OutOfRange(n, len(records))

    verdicts = list(detect_stream(records, model, engine, workers=cfg.workers))
    truths = [r.label_class for r in records]
    series = series_from_verdicts(verdicts, truths, sizes)
    write_series_csv(series, cfg.out_series)
    if cfg.out_log is not None:
        write_alert_log(verdicts, cfg.out_log)

    counts = score_run(verdicts, truths)
    print("samples,false_positives,false_negatives")
    for p in series:
        print(f"{p.samples},{p.fp},{p.fn}")
    print(counts.summary())
    return EXIT_OK


def cmd_encode(cfg: RunConfig) -> int:
    cfg.require("test", "encoder")
    _check_inputs(cfg.test, cfg.encoder, cfg.schema)
    model = load_model(cfg.encoder)
    records = read_records(cfg.test, load_schema(cfg.schema), None, cfg.skip_bad)
    if cfg.limit is not None:
        records = records[:cfg.limit]
    for rec in records:
        seq, unknown = model.encode(rec.values)
        print(f"{rec.source_index}\t{seq}\t{unknown}")
    return EXIT_OK


COMMANDS = {"build": cmd_build, "detect": cmd_detect, "evaluate": cmd_evaluate, "encode": cmd_encode}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"dnaids: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingFile as exc:
        print(f"dnaids: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except FingerprintMismatch as exc:
        print(f"dnaids: {exc}", file=sys.stderr)
        return EXIT_FINGERPRINT
    except OutOfRange as exc:
        print(f"dnaids: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (IDSError, ValueError) as exc:
        print(f"dnaids: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
