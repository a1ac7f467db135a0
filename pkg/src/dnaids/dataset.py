"""NSL-KDD / KDD Cup 99 record ingestion.

Records are plain comma-separated lines: 41 feature values, the raw label and,
for NSL-KDD, an optional trailing difficulty column which is discarded.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import (
    ArityError,
    DuplicateIndex,
    EmptyDataset,
    IDSError,
    MalformedLine,
    MalformedSchemaLine,
    MissingFile,
    NumericParseError,
    OutOfRange,
    UnknownLabel,
    WrongFeatureCount,
)

logger = logging.getLogger(__name__)

N_FEATURES = 41
KINDS = ("continuous", "symbolic")
GROUPS = ("basic", "content", "time_traffic", "host_traffic")


class LabelClass(enum.Enum):
    NORMAL = "normal"
    DOS = "dos"
    PROBE = "probe"
    R2L = "r2l"
    U2R = "u2r"

    @property
    def is_attack(self) -> bool:
        return self is not LabelClass.NORMAL

    @classmethod
    def parse(cls, token: str) -> "LabelClass":
        return cls(token.strip().lower())

    def __str__(self) -> str:
        return self.value


ATTACK_CLASSES = (LabelClass.DOS, LabelClass.PROBE, LabelClass.R2L, LabelClass.U2R)


@dataclass(frozen=True)
class FeatureDescriptor:
    index: int
    name: str
    kind: str
    group: str

    @property
    def continuous(self) -> bool:
        return self.kind == "continuous"


@dataclass(frozen=True)
class RecordSchema:
    features: tuple[FeatureDescriptor, ...]
    allows_difficulty_column: bool = True

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise WrongFeatureCount(len(self.features))
        if [f.index for f in self.features] != list(range(N_FEATURES)):
            raise IDSError("schema indices must be 0..40 in order")
        if len({f.name for f in self.features}) != N_FEATURES:
            raise IDSError("schema feature names must be unique")

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def __getitem__(self, i):
        return self.features[i]


@dataclass(frozen=True)
class AttackTaxonomy:
    subtype_to_class: dict[str, LabelClass]

    def __post_init__(self):
        for subtype, cls in self.subtype_to_class.items():
            if not cls.is_attack:
                raise IDSError(f"taxonomy maps {subtype!r} to non-attack class {cls}")

    def __len__(self):
        return len(self.subtype_to_class)

    def __contains__(self, subtype):
        return subtype in self.subtype_to_class


@dataclass(frozen=True)
class ConnectionRecord:
    values: tuple
    label: str | None = None
    label_class: LabelClass | None = None
    source_index: int = 0

    def __post_init__(self):
        if len(self.values) != N_FEATURES:
            raise ArityError(self.source_index, len(self.values))


def _read_lines(path):
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    with path.open("r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _data_path(name: str):
    return resources.files("dnaids").joinpath("data", name)


def default_schema_path() -> Path:
    return Path(str(_data_path("nslkdd_schema.txt")))


def default_taxonomy_path(extended: bool = False) -> Path:
    name = "taxonomy_extended.txt" if extended else "taxonomy.txt"
    return Path(str(_data_path(name)))


def load_schema(path=None, allows_difficulty_column: bool = True) -> RecordSchema:
    """Read an ``index,name,kind,group`` schema file (bundled NSL-KDD schema by default)."""
    lines = _read_lines(path if path is not None else default_schema_path())
    by_index: dict[int, tuple[int, FeatureDescriptor]] = {}
    names: set[str] = set()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise MalformedSchemaLine(line_no, "expected index,name,kind,group")
        idx_tok, name, kind, group = parts
        try:
            idx = int(idx_tok)
        except ValueError:
            raise MalformedSchemaLine(line_no, f"bad index {idx_tok!r}") from None
        if idx < 0 or not name or kind not in KINDS or group not in GROUPS:
            raise MalformedSchemaLine(line_no, line)
        if idx in by_index:
            raise DuplicateIndex(idx, line_no)
        if name in names:
            raise MalformedSchemaLine(line_no, f"duplicate feature name {name!r}")
        names.add(name)
        by_index[idx] = (line_no, FeatureDescriptor(idx, name, kind, group))

    if len(by_index) != N_FEATURES:
        raise WrongFeatureCount(len(by_index))
    for idx, (line_no, _) in by_index.items():
        if idx >= N_FEATURES:
            raise MalformedSchemaLine(line_no, f"index {idx} outside 0..40")
    features = tuple(by_index[i][1] for i in range(N_FEATURES))
    return RecordSchema(features, allows_difficulty_column)


def load_taxonomy(path=None) -> AttackTaxonomy:
    """Read ``subtype,class`` lines; the bundled file maps the 22 KDD Cup 99 subtypes."""
    lines = _read_lines(path if path is not None else default_taxonomy_path())
    mapping: dict[str, LabelClass] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not parts[0]:
            raise MalformedLine(line_no, "expected subtype,class")
        subtype = parts[0].lower()
        try:
            cls = LabelClass.parse(parts[1])
        except ValueError:
            raise MalformedLine(line_no, f"unknown class {parts[1]!r}") from None
        if not cls.is_attack or subtype == "normal":
            raise MalformedLine(line_no, "taxonomy entries must map to an attack class")
        if subtype in mapping:
            raise MalformedLine(line_no, f"subtype {subtype!r} listed twice")
        mapping[subtype] = cls
    return AttackTaxonomy(mapping)


def normalize_label(raw: str, taxonomy: AttackTaxonomy) -> LabelClass:
    token = raw.strip().lower()
    if token.endswith("."):
        token = token[:-1]
    if not token:
        raise UnknownLabel(raw)
    if token == "normal":
        return LabelClass.NORMAL
    try:
        return taxonomy.subtype_to_class[token]
    except KeyError:
        raise UnknownLabel(raw) from None


def _parse_line(line: str, line_no: int, source_index: int, schema: RecordSchema,
                taxonomy: AttackTaxonomy | None) -> ConnectionRecord:
    fields = line.split(",")
    n = len(fields)
    if n != N_FEATURES + 1 and not (schema.allows_difficulty_column and n == N_FEATURES + 2):
        raise ArityError(line_no, n)
    values = []
    for desc, tok in zip(schema.features, fields):
        tok = tok.strip()
        if desc.continuous:
            try:
                x = float(tok)
            except ValueError:
                raise NumericParseError(line_no, desc.index, tok) from None
            if not math.isfinite(x):
                raise NumericParseError(line_no, desc.index, tok)
            values.append(x)
        else:
            if not tok:
                raise MalformedLine(line_no, f"empty symbolic field {desc.index}")
            values.append(tok)
    label = fields[N_FEATURES].strip().lower()
    label_class = normalize_label(label, taxonomy) if taxonomy is not None else None
    return ConnectionRecord(tuple(values), label, label_class, source_index)


def parse_records(
    lines: Iterable[str],
    schema: RecordSchema,
    taxonomy: AttackTaxonomy | None = None,
    skip_bad: bool = False,
    errors: list | None = None,
) -> Iterator[ConnectionRecord]:
    """Yield one record per non-empty line.

    ``source_index`` counts 0-based input lines (blank and skipped lines
    included), so alerts can be traced back to the file. With ``skip_bad``
    parse errors are logged, appended to ``errors`` if given, and skipped.
    When a taxonomy is supplied, ``label_class`` is filled in.
    """
    for line_idx, raw in enumerate(lines):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        try:
            yield _parse_line(line, line_idx + 1, line_idx, schema, taxonomy)
        except IDSError as exc:
            if not skip_bad:
                raise
            logger.warning("skipping line %d: %s", line_idx + 1, exc)
            if errors is not None:
                errors.append(exc)


def read_records(path, schema, taxonomy=None, skip_bad=False, errors=None) -> list[ConnectionRecord]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    with path.open("r", encoding="utf-8") as fh:
        return list(parse_records(fh, schema, taxonomy, skip_bad, errors))


@dataclass(frozen=True)
class FeatureStats:
    """Observed ranges (continuous) and category sets (symbolic), keyed by feature index."""

    ranges: dict[int, tuple[float, float]] = field(default_factory=dict)
    categories: dict[int, frozenset[str]] = field(default_factory=dict)
    count: int = 0

    def merge(self, other: "FeatureStats") -> "FeatureStats":
        ranges = dict(self.ranges)
        for i, (lo, hi) in other.ranges.items():
            if i in ranges:
                a, b = ranges[i]
                ranges[i] = (min(a, lo), max(b, hi))
            else:
                ranges[i] = (lo, hi)
        cats = dict(self.categories)
        for i, s in other.categories.items():
            cats[i] = cats.get(i, frozenset()) | s
        return FeatureStats(ranges, cats, self.count + other.count)


def feature_stats(records: Iterable[ConnectionRecord], schema: RecordSchema) -> FeatureStats:
    cont = [d.index for d in schema if d.continuous]
    sym = [d.index for d in schema if not d.continuous]
    lo = {i: math.inf for i in cont}
    hi = {i: -math.inf for i in cont}
    cats: dict[int, set[str]] = {i: set() for i in sym}
    n = 0
    for rec in records:
        n += 1
        v = rec.values
        for i in cont:
            x = v[i]
            if x < lo[i]:
                lo[i] = x
            if x > hi[i]:
                hi[i] = x
        for i in sym:
            cats[i].add(v[i])
    if n == 0:
        raise EmptyDataset("feature_stats needs at least one record")
    return FeatureStats(
        {i: (lo[i], hi[i]) for i in cont},
        {i: frozenset(s) for i, s in cats.items()},
        n,
    )


def prefix(records: Sequence, n: int):
    if n < 0 or n > len(records):
        raise OutOfRange(n, len(records))
    return records[:n]
