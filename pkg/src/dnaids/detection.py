"""Layer-3 matching: classify encoded sessions against the signature database.

Three modes share one engine:

* ``exact``     whole-record hash lookup;
* ``substring`` Aho-Corasick scan for any signature inside the session;
* ``weighted``  nearest signature under the L1 distance between per-nucleotide
  letter-frequency weight profiles, accepted when within ``tau``.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .automaton import Automaton
from .dataset import ATTACK_CLASSES, ConnectionRecord, LabelClass
from .encoding import EncoderModel
from .errors import FingerprintMismatch, LengthMismatch, MalformedLine, MissingFile
from .signatures import Signature, SignatureDatabase

logger = logging.getLogger(__name__)

MODES = ("exact", "substring", "weighted")
TIE_TOL = 1e-12


class EmptyDatabaseWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WeightTable:
    """Per-nucleotide weights; defaults are English letter frequencies of a, c, g, t."""

    A: float = 0.08167
    C: float = 0.02782
    G: float = 0.02015
    T: float = 0.09056

    def __post_init__(self):
        vals = self.as_tuple()
        if any(not math.isfinite(v) or v <= 0 for v in vals):
            raise ValueError(f"weights must be positive and finite: {vals}")
        if len(set(vals)) != 4:
            raise ValueError(f"weights must be pairwise distinct: {vals}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.A, self.C, self.G, self.T)

    def __getitem__(self, nucleotide: str) -> float:
        return getattr(self, nucleotide)

    def scaled(self, c: float) -> "WeightTable":
        return WeightTable(*(w * c for w in self.as_tuple()))

    @property
    def min_gap(self) -> float:
        return min(abs(a - b) for a, b in itertools.combinations(self.as_tuple(), 2))


def load_weights(path) -> WeightTable:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    vals = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip().upper()
        if not sep or key not in "ACGT" or len(key) != 1 or key in vals:
            raise MalformedLine(line_no, "expected one of A=, C=, G=, T=")
        try:
            vals[key] = float(val)
        except ValueError:
            raise MalformedLine(line_no, f"bad weight {val!r}") from None
    if set(vals) != set("ACGT"):
        raise MalformedLine(0, "weight file must define A, C, G and T")
    return WeightTable(**vals)


def weight_profile(seq: str, w: WeightTable) -> list[float]:
    return [w[ch] for ch in seq]


def weight_distance(a: str, b: str, w: WeightTable) -> float:
    if len(a) != len(b):
        raise LengthMismatch(f"sequences differ in length ({len(a)} vs {len(b)})")
    return math.fsum(abs(w[x] - w[y]) for x, y in zip(a, b))


@dataclass(frozen=True)
class DetectionConfig:
    mode: str = "exact"
    tau: float = 0.0
    class_priority: tuple[LabelClass, ...] = ATTACK_CLASSES
    weights: WeightTable = field(default_factory=WeightTable)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise ValueError("tau must be a finite non-negative number")
        if sorted(self.class_priority, key=ATTACK_CLASSES.index) != list(ATTACK_CLASSES) \
                or len(self.class_priority) != 4:
            raise ValueError("class_priority must be a permutation of the four attack classes")


@dataclass(frozen=True)
class Verdict:
    source_index: int
    outcome: LabelClass
    matched_signature_id: int | None = None
    score: float = 0.0
    unknown_count: int = 0

    @property
    def is_attack(self) -> bool:
        return self.outcome.is_attack


class MatchEngine:
    """Immutable query structure over one signature database.

    ``config.mode`` picks the index ``classify`` consults; only that one is
    built up front.
    """

    def __init__(self, db: SignatureDatabase, config: DetectionConfig):
        self.config = config
        self.encoder_fingerprint = db.encoder_fingerprint
        rank = {cls: i for i, cls in enumerate(config.class_priority)}
        self._rank = rank
        ordered = sorted(db.signatures, key=lambda s: (rank[s.label_class], s.id))
        self.signatures: tuple[Signature, ...] = tuple(ordered)

        lengths = sorted({len(s.sequence) for s in ordered})
        if len(lengths) > 1 and config.mode != "substring":
            raise LengthMismatch(f"{config.mode} mode needs equal-length signatures")
        self.signature_length = lengths[0] if len(lengths) == 1 else None

        # Sequences shared across classes resolve to the highest-priority entry.
        self.exact_index: dict[str, Signature] = {}
        for sig in ordered:
            self.exact_index.setdefault(sig.sequence, sig)

        self._digit_lut = np.full(256, -1, dtype=np.int8)
        for i, ch in enumerate(b"ACGT"):
            self._digit_lut[ch] = i
        self._weights = np.array(config.weights.as_tuple(), dtype=np.float64)

        # The other two indexes are built on first use.
        if config.mode == "substring":
            self.automaton
        elif config.mode == "weighted":
            self.weight_matrix

        if not ordered:
            warnings.warn("signature database is empty; every session will be classified normal",
                          EmptyDatabaseWarning, stacklevel=3)

    def __len__(self):
        return len(self.signatures)

    @cached_property
    def automaton(self) -> Automaton:
        return Automaton(list(self.exact_index))

    @cached_property
    def _pattern_sig(self) -> list[Signature]:
        return list(self.exact_index.values())

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Row i is the weight profile of ``signatures[i]``."""
        if not self.signatures or self.signature_length is None:
            return np.zeros((len(self.signatures), 0))
        digits = np.array([self._digits(s.sequence) for s in self.signatures], dtype=np.int8)
        return self._weights[digits]

    def _digits(self, seq: str) -> np.ndarray:
        digits = self._digit_lut[np.frombuffer(seq.encode("ascii"), dtype=np.uint8)]
        if (digits < 0).any():
            raise ValueError(f"sequence contains characters outside ACGT: {seq!r}")
        return digits

    def _check_length(self, seq: str):
        if self.signature_length is not None and len(seq) != self.signature_length:
            raise LengthMismatch(
                f"session length {len(seq)} differs from signature length {self.signature_length}")

    def classify(self, seq: str, source_index: int = 0, unknown_count: int = 0) -> Verdict:
        mode = self.config.mode
        if not self.signatures:
            return Verdict(source_index, LabelClass.NORMAL, None, 0.0, unknown_count)
        if mode == "exact":
            self._check_length(seq)
            sig = self.exact_index.get(seq)
            score = 0.0
        elif mode == "substring":
            hits = self.automaton.matched_ids(seq)
            sig = min((self._pattern_sig[h] for h in hits), default=None,
                      key=lambda s: (self._rank[s.label_class], s.id))
            score = 0.0
        else:
            self._check_length(seq)
            profile = self._weights[self._digits(seq)]
            dist = np.abs(self.weight_matrix - profile).sum(axis=1)
            best = float(dist.min())
            if best <= self.config.tau + TIE_TOL:
                # Signatures are stored in priority order, so the first near-minimum wins ties.
                i = int(np.flatnonzero(dist <= best + TIE_TOL)[0])
                sig = self.signatures[i]
                score = float(dist[i])
            else:
                sig = None
                score = best
        if sig is None:
            return Verdict(source_index, LabelClass.NORMAL, None, score, unknown_count)
        return Verdict(source_index, sig.label_class, sig.id, score, unknown_count)


def build_engine(db: SignatureDatabase, config: DetectionConfig | None = None) -> MatchEngine:
    return MatchEngine(db, config or DetectionConfig())


def classify(seq: str, engine: MatchEngine) -> Verdict:
    return engine.classify(seq)


def _classify_records(model: EncoderModel, engine: MatchEngine, records) -> list[Verdict]:
    out = []
    for rec in records:
        seq, unknown = model.encode(rec.values)
        out.append(engine.classify(seq, rec.source_index, unknown))
    return out


_worker_state: tuple | None = None


def _init_worker(model, engine):
    global _worker_state
    _worker_state = (model, engine)


def _worker_chunk(records):
    model, engine = _worker_state
    return _classify_records(model, engine, records)


def _chunks(it, size):
    it = iter(it)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def detect_stream(
    records: Iterable[ConnectionRecord],
    model: EncoderModel,
    engine: MatchEngine,
    workers: int = 1,
    chunk_size: int = 2048,
) -> Iterator[Verdict]:
    """Encode and classify records, yielding verdicts in input order.

    The fingerprint check happens eagerly, before any record is consumed.
    With ``workers > 1`` chunks are classified in worker processes and
    reassembled in order.
    """
    if model.fingerprint != engine.encoder_fingerprint:
        raise FingerprintMismatch(engine.encoder_fingerprint, model.fingerprint)
    if workers <= 1:
        return _serial(records, model, engine)
    return _parallel(records, model, engine, workers, chunk_size)


def _serial(records, model, engine):
    for rec in records:
        seq, unknown = model.encode(rec.values)
        yield engine.classify(seq, rec.source_index, unknown)


def _parallel(records, model, engine, workers, chunk_size):
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(model, engine)) as pool:
        for batch in pool.map(_worker_chunk, _chunks(records, chunk_size)):
            yield from batch
