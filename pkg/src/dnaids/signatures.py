"""Attack-signature database: build from labelled encodings, persist, merge."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .dataset import ATTACK_CLASSES, LabelClass, RecordSchema
from .encoding import EncoderModel
from .errors import (
    DuplicateSequenceInClass,
    FingerprintMismatch,
    IoFailure,
    LengthMismatch,
    MalformedLine,
    MissingFile,
    VersionMismatch,
)

DB_HEADER = "#IDSDB v1"
_SEQ_RE = re.compile(r"[ACGT]+")
_FP_RE = re.compile(r"[0-9a-f]{16}")
_CLASS_ORDER = {c: i for i, c in enumerate(ATTACK_CLASSES)}


class ConflictPolicy(str, enum.Enum):
    DROP = "drop_conflicts"
    KEEP = "keep_conflicts"


@dataclass(frozen=True)
class Signature:
    id: int
    label_class: LabelClass
    sequence: str
    support: int = 1

    def __post_init__(self):
        if not self.label_class.is_attack:
            raise ValueError("signatures must carry an attack class")
        if self.support < 1:
            raise ValueError("support must be >= 1")


def _sort_key(sig: Signature):
    return (_CLASS_ORDER[sig.label_class], sig.id)


@dataclass(frozen=True)
class SignatureDatabase:
    encoder_fingerprint: str
    signatures: tuple[Signature, ...] = ()
    conflict_count: int = 0
    policy: ConflictPolicy = ConflictPolicy.DROP

    def __post_init__(self):
        ordered = tuple(sorted(self.signatures, key=_sort_key))
        object.__setattr__(self, "signatures", ordered)
        object.__setattr__(self, "policy", ConflictPolicy(self.policy))
        seen = set()
        for sig in ordered:
            key = (sig.label_class, sig.sequence)
            if key in seen:
                raise DuplicateSequenceInClass(f"{sig.label_class}: {sig.sequence}")
            seen.add(key)
        if len({s.id for s in ordered}) != len(ordered):
            raise ValueError("signature ids must be unique")

    def __len__(self):
        return len(self.signatures)

    def by_class(self, cls: LabelClass) -> tuple[Signature, ...]:
        return tuple(s for s in self.signatures if s.label_class is cls)

    def class_counts(self) -> dict[LabelClass, int]:
        counts = {c: 0 for c in ATTACK_CLASSES}
        for s in self.signatures:
            counts[s.label_class] += 1
        return counts


def build_database(
    encoded: Iterable[tuple[str, LabelClass]],
    fingerprint: str,
    policy: ConflictPolicy | str = ConflictPolicy.DROP,
    require_equal_length: bool = True,
) -> SignatureDatabase:
    """Deduplicate attack encodings into signatures.

    Under ``drop_conflicts`` any sequence also seen labelled Normal is left
    out and counted once in ``conflict_count``. Ids follow first-seen order
    of the surviving (class, sequence) pairs.
    """
    if not fingerprint:
        raise ValueError("fingerprint must be non-empty")
    policy = ConflictPolicy(policy)
    support: dict[tuple[LabelClass, str], int] = {}
    normals: set[str] = set()
    length = None
    for i, (seq, cls) in enumerate(encoded):
        if require_equal_length:
            if length is None:
                length = len(seq)
            elif len(seq) != length:
                raise LengthMismatch(f"sequence {i} has length {len(seq)}, expected {length}", i)
        if cls is LabelClass.NORMAL:
            normals.add(seq)
        else:
            key = (cls, seq)
            support[key] = support.get(key, 0) + 1

    conflicts = 0
    if policy is ConflictPolicy.DROP:
        conflicted = {seq for (_, seq) in support if seq in normals}
        conflicts = len(conflicted)
        support = {k: n for k, n in support.items() if k[1] not in conflicted}

    sigs = tuple(Signature(i, cls, seq, n) for i, ((cls, seq), n) in enumerate(support.items()))
    return SignatureDatabase(fingerprint, sigs, conflicts, policy)


def group_spans(schema: RecordSchema, model: EncoderModel) -> dict[str, tuple[int, int]]:
    """Contiguous (start, end) slice of an encoded record covered by each feature group."""
    spans: dict[str, tuple[int, int]] = {}
    last_group = None
    for desc, (start, end) in zip(schema, model.spans):
        g = desc.group
        if g in spans:
            if g != last_group:
                raise ValueError(f"feature group {g!r} is not contiguous in the schema")
            spans[g] = (spans[g][0], end)
        else:
            spans[g] = (start, end)
        last_group = g
    return spans


def split_groups(encoded: Iterable[tuple[str, LabelClass]], spans: dict[str, tuple[int, int]]):
    """Expand whole-record encodings into per-group subsequences for substring matching."""
    for seq, cls in encoded:
        for start, end in spans.values():
            yield seq[start:end], cls


def format_database(db: SignatureDatabase) -> str:
    lines = [
        DB_HEADER,
        "alphabet=ACGT",
        f"encoder={db.encoder_fingerprint}",
        f"policy={db.policy.value}",
        f"conflicts={db.conflict_count}",
    ]
    for s in db.signatures:
        lines.append(f"{s.label_class.value}\t{s.id}\t{s.support}\t{s.sequence}")
    return "\n".join(lines) + "\n"


def save_database(db: SignatureDatabase, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_database(db))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _header_value(lines, i, key):
    if i >= len(lines) or not lines[i].startswith(key + "="):
        raise MalformedLine(i + 1, f"expected {key}=")
    return lines[i][len(key) + 1:]


def parse_database(text: str) -> SignatureDatabase:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith("#IDSDB"):
        raise MalformedLine(1, "missing #IDSDB header")
    if lines[0] != DB_HEADER:
        raise VersionMismatch(f"unsupported signature database version {lines[0]!r}")
    if _header_value(lines, 1, "alphabet") != "ACGT":
        raise MalformedLine(2, "alphabet must be ACGT")
    fp = _header_value(lines, 2, "encoder")
    if not _FP_RE.fullmatch(fp):
        raise MalformedLine(3, "encoder fingerprint must be 16 lowercase hex digits")
    try:
        policy = ConflictPolicy(_header_value(lines, 3, "policy"))
    except ValueError:
        raise MalformedLine(4, "unknown policy") from None
    conflicts_tok = _header_value(lines, 4, "conflicts")
    if not conflicts_tok.isdigit():
        raise MalformedLine(5, "conflicts must be a non-negative integer")

    sigs = []
    seen_keys = set()
    seen_ids = set()
    for line_no, line in enumerate(lines[5:], start=6):
        parts = line.split("\t")
        if len(parts) != 4:
            raise MalformedLine(line_no, "expected class<TAB>id<TAB>support<TAB>sequence")
        cls_tok, id_tok, sup_tok, seq = parts
        try:
            cls = LabelClass(cls_tok)
        except ValueError:
            raise MalformedLine(line_no, f"unknown class {cls_tok!r}") from None
        if not cls.is_attack:
            raise MalformedLine(line_no, "normal is not a signature class")
        if not id_tok.isdigit() or not sup_tok.isdigit() or int(sup_tok) < 1:
            raise MalformedLine(line_no, "id and support must be integers (support >= 1)")
        if not _SEQ_RE.fullmatch(seq):
            raise MalformedLine(line_no, "sequence must be non-empty over ACGT")
        if (cls, seq) in seen_keys:
            raise DuplicateSequenceInClass(f"line {line_no}: {cls.value} {seq}")
        if int(id_tok) in seen_ids:
            raise MalformedLine(line_no, f"duplicate id {id_tok}")
        seen_keys.add((cls, seq))
        seen_ids.add(int(id_tok))
        sigs.append(Signature(int(id_tok), cls, seq, int(sup_tok)))
    return SignatureDatabase(fp, tuple(sigs), int(conflicts_tok), policy)


def load_database(path) -> SignatureDatabase:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    return parse_database(path.read_text(encoding="utf-8"))


def merge_databases(a: SignatureDatabase, b: SignatureDatabase) -> SignatureDatabase:
    """Union by (class, sequence) with summed supports; ids renumbered a-first."""
    if a.encoder_fingerprint != b.encoder_fingerprint:
        raise FingerprintMismatch(a.encoder_fingerprint, b.encoder_fingerprint)
    support: dict[tuple[LabelClass, str], int] = {}
    for db in (a, b):
        for s in sorted(db.signatures, key=lambda s: s.id):
            key = (s.label_class, s.sequence)
            support[key] = support.get(key, 0) + s.support
    policy = a.policy if a.policy == b.policy else ConflictPolicy.KEEP
    sigs = tuple(Signature(i, cls, seq, n) for i, ((cls, seq), n) in enumerate(support.items()))
    return SignatureDatabase(a.encoder_fingerprint, sigs, a.conflict_count + b.conflict_count, policy)
