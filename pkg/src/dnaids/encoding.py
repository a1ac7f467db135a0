"""Translate connection records into fixed-length nucleotide sequences.

Every feature becomes a fixed-width codon over ``ACGT`` read as base-4 digits
(A=0, C=1, G=2, T=3, most significant first). Continuous features are
min/max quantized into ``levels`` bins; symbolic features index into a sorted
codebook whose last codeword is reserved for tokens unseen at fit time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

from .dataset import FeatureStats, RecordSchema
from .errors import (
    CapacityExceeded,
    FingerprintMismatch,
    MalformedLine,
    MissingFile,
    SchemaMismatch,
    VersionMismatch,
)

ALPHABET = "ACGT"
DIGIT = {ch: i for i, ch in enumerate(ALPHABET)}
DEFAULT_LEVELS = 256
MAX_CODON_WIDTH = 4
MODEL_HEADER = "#ENC v1"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def to_codon(value: int, width: int) -> str:
    """Write ``value`` in base 4, zero-padded to ``width`` nucleotides."""
    if value < 0 or value >= 4**width:
        raise ValueError(f"{value} does not fit in {width} nucleotides")
    out = []
    for _ in range(width):
        value, d = divmod(value, 4)
        out.append(ALPHABET[d])
    return "".join(reversed(out))


def from_codon(codon: str) -> int:
    value = 0
    for ch in codon:
        value = value * 4 + DIGIT[ch]
    return value


def width_for_levels(levels: int) -> int:
    """Smallest k with 4**k >= levels (computed in integers)."""
    k = 1
    while 4**k < levels:
        k += 1
    return k


def width_for_categories(count: int) -> int:
    """Smallest k with 4**k - 1 >= count, keeping one sentinel codeword free."""
    k = 1
    while 4**k - 1 < count:
        k += 1
    return k


@dataclass(frozen=True)
class ContinuousQuantizer:
    min: float
    max: float
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.min > self.max:
            raise ValueError(f"invalid range ({self.min}, {self.max})")
        if self.levels < 2:
            raise ValueError("levels must be >= 2")

    @property
    def codon_width(self) -> int:
        return width_for_levels(self.levels)

    @cached_property
    def _codons(self):
        k = self.codon_width
        return [to_codon(i, k) for i in range(self.levels)]

    def level(self, x: float) -> int:
        span = self.max - self.min
        if span == 0:
            return 0
        r = (x - self.min) / span
        if r <= 0.0:
            return 0
        if r >= 1.0:
            return self.levels - 1
        return min(self.levels - 1, int(r * self.levels))

    def encode(self, x: float) -> str:
        return self._codons[self.level(x)]

    def representative(self, level: int) -> float:
        """A value that quantizes back to ``level`` (bin midpoint)."""
        if self.max == self.min:
            return self.min
        return self.min + (level + 0.5) * (self.max - self.min) / self.levels


@dataclass(frozen=True)
class CategoryCodebook:
    categories: tuple[str, ...]
    max_codon_width: int = MAX_CODON_WIDTH

    def __post_init__(self):
        if list(self.categories) != sorted(set(self.categories)):
            raise ValueError("codebook categories must be sorted and unique")
        for tok in self.categories:
            if not tok or any(c in tok for c in ",|\n\t"):
                raise ValueError(f"category token {tok!r} cannot be serialized")
        k = width_for_categories(len(self.categories))
        if k > self.max_codon_width:
            raise CapacityExceeded(None, len(self.categories), 4**self.max_codon_width - 1)

    @property
    def codon_width(self) -> int:
        return width_for_categories(len(self.categories))

    @property
    def sentinel_index(self) -> int:
        return 4**self.codon_width - 1

    @cached_property
    def _table(self):
        k = self.codon_width
        return {tok: to_codon(i, k) for i, tok in enumerate(self.categories)}

    @cached_property
    def _sentinel(self):
        return to_codon(self.sentinel_index, self.codon_width)

    def encode(self, tok: str) -> tuple[str, bool]:
        codon = self._table.get(tok)
        if codon is None:
            return self._sentinel, True
        return codon, False


FeatureEncoder = Union[ContinuousQuantizer, CategoryCodebook]


def encode_continuous(x: float, q: ContinuousQuantizer) -> str:
    return q.encode(x)


def encode_symbolic(tok: str, c: CategoryCodebook) -> tuple[str, bool]:
    return c.encode(tok)


@dataclass(frozen=True)
class EncoderModel:
    encoders: tuple[FeatureEncoder, ...]
    levels: int = DEFAULT_LEVELS

    @property
    def total_length(self) -> int:
        return sum(e.codon_width for e in self.encoders)

    @cached_property
    def spans(self) -> tuple[tuple[int, int], ...]:
        """(start, end) offsets of each feature's codon in an encoded record."""
        out, pos = [], 0
        for e in self.encoders:
            out.append((pos, pos + e.codon_width))
            pos += e.codon_width
        return tuple(out)

    def _body_lines(self) -> list[str]:
        lines = [MODEL_HEADER, f"levels={self.levels}"]
        for i, e in enumerate(self.encoders):
            if isinstance(e, ContinuousQuantizer):
                lines.append(f"{i}|continuous|{e.codon_width}|{e.min!r},{e.max!r}")
            else:
                lines.append(f"{i}|symbolic|{e.codon_width}|{','.join(e.categories)}")
        return lines

    @cached_property
    def fingerprint(self) -> str:
        body = "\n".join(self._body_lines()) + "\n"
        return f"{fnv1a_64(body.encode('utf-8')):016x}"

    def serialize(self) -> str:
        return "\n".join(self._body_lines() + [f"fp={self.fingerprint}"]) + "\n"

    @cached_property
    def _plan(self):
        return [(isinstance(e, ContinuousQuantizer), e.encode) for e in self.encoders]

    def encode(self, values: Sequence) -> tuple[str, int]:
        if len(values) != len(self.encoders):
            raise SchemaMismatch(f"record has {len(values)} values, model has {len(self.encoders)} features")
        parts = []
        unknown = 0
        for i, ((continuous, enc), v) in enumerate(zip(self._plan, values)):
            if continuous:
                if isinstance(v, str):
                    raise SchemaMismatch(f"feature {i}: expected a number, got {v!r}")
                parts.append(enc(v))
            else:
                if not isinstance(v, str):
                    raise SchemaMismatch(f"feature {i}: expected a token, got {v!r}")
                codon, flag = enc(v)
                parts.append(codon)
                unknown += flag
        return "".join(parts), unknown


def fit_encoder(stats: FeatureStats, schema: RecordSchema, levels: int = DEFAULT_LEVELS,
                max_codon_width: int = MAX_CODON_WIDTH) -> EncoderModel:
    if levels < 2:
        raise ValueError("levels must be >= 2")
    if width_for_levels(levels) > max_codon_width:
        raise ValueError(f"{levels} levels need more than {max_codon_width} nucleotides")
    encoders: list[FeatureEncoder] = []
    for desc in schema:
        if desc.continuous:
            if desc.index not in stats.ranges:
                raise SchemaMismatch(f"no range observed for feature {desc.name}")
            lo, hi = stats.ranges[desc.index]
            encoders.append(ContinuousQuantizer(lo, hi, levels))
        else:
            if desc.index not in stats.categories:
                raise SchemaMismatch(f"no categories observed for feature {desc.name}")
            cats = tuple(sorted(stats.categories[desc.index]))
            try:
                encoders.append(CategoryCodebook(cats, max_codon_width))
            except CapacityExceeded as exc:
                raise CapacityExceeded(desc.name, exc.count, exc.capacity) from None
    return EncoderModel(tuple(encoders), levels)


def encode_record(rec, model: EncoderModel) -> tuple[str, int]:
    return model.encode(rec.values)


def save_model(model: EncoderModel, path) -> None:
    Path(path).write_text(model.serialize(), encoding="utf-8", newline="\n")


def parse_model(text: str) -> EncoderModel:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#ENC"):
        raise MalformedLine(1, "missing #ENC header")
    if lines[0] != MODEL_HEADER:
        raise VersionMismatch(f"unsupported encoder model version {lines[0]!r}")
    if len(lines) < 3 or not lines[1].startswith("levels="):
        raise MalformedLine(2, "expected levels=<L>")
    try:
        levels = int(lines[1][len("levels="):])
    except ValueError:
        raise MalformedLine(2, "bad levels") from None
    if not lines[-1].startswith("fp="):
        raise MalformedLine(len(lines), "fingerprint line must be last")
    stored_fp = lines[-1][3:]

    encoders: list[FeatureEncoder] = []
    for line_no, line in enumerate(lines[2:-1], start=3):
        parts = line.split("|")
        if len(parts) != 4:
            raise MalformedLine(line_no, "expected index|kind|k|payload")
        idx, kind, k, payload = parts
        try:
            if int(idx) != len(encoders):
                raise MalformedLine(line_no, "feature indices must be consecutive")
            if kind == "continuous":
                lo, hi = payload.split(",")
                enc: FeatureEncoder = ContinuousQuantizer(float(lo), float(hi), levels)
            elif kind == "symbolic":
                enc = CategoryCodebook(tuple(payload.split(",")) if payload else ())
            else:
                raise MalformedLine(line_no, f"unknown kind {kind!r}")
        except (ValueError, CapacityExceeded) as exc:
            raise MalformedLine(line_no, str(exc)) from None
        if enc.codon_width != int(k):
            raise MalformedLine(line_no, f"codon width {k} disagrees with payload")
        encoders.append(enc)

    model = EncoderModel(tuple(encoders), levels)
    if model.fingerprint != stored_fp:
        raise FingerprintMismatch(stored_fp, model.fingerprint)
    return model


def load_model(path) -> EncoderModel:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    return parse_model(path.read_text(encoding="utf-8"))
