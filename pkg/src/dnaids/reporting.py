"""Layer-4 output: alert logs, confusion counts and false-positive series."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .dataset import ATTACK_CLASSES, LabelClass
from .detection import MatchEngine, Verdict, detect_stream
from .encoding import EncoderModel
from .errors import IoFailure, LengthMismatch, OutOfRange

SERIES_HEADER = "samples,false_positives,false_negatives"


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    # ground-truth attack class -> [detected as that class, missed]
    per_class: dict[LabelClass, list[int]] = field(
        default_factory=lambda: {c: [0, 0] for c in ATTACK_CLASSES})

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def add(self, verdict: Verdict, truth: LabelClass) -> None:
        if truth.is_attack:
            if verdict.is_attack:
                self.tp += 1
            else:
                self.fn += 1
            tally = self.per_class[truth]
            tally[0 if verdict.outcome is truth else 1] += 1
        elif verdict.is_attack:
            self.fp += 1
        else:
            self.tn += 1

    def summary(self) -> str:
        lines = [f"tp={self.tp} fp={self.fp} tn={self.tn} fn={self.fn}"]
        for cls, (hit, miss) in self.per_class.items():
            lines.append(f"  {cls.value}: detected={hit} missed={miss}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SeriesPoint:
    samples: int
    fp: int
    fn: int


def score_run(verdicts: Sequence[Verdict], truths: Sequence[LabelClass]) -> ConfusionCounts:
    if len(verdicts) != len(truths):
        raise LengthMismatch(f"{len(verdicts)} verdicts for {len(truths)} labels")
    counts = ConfusionCounts()
    for v, t in zip(verdicts, truths):
        counts.add(v, t)
    return counts


def series_from_verdicts(verdicts: Iterable[Verdict], truths: Sequence[LabelClass],
                         sizes: Sequence[int]) -> list[SeriesPoint]:
    """Cumulative FP/FN at each prefix size, in one pass over the verdicts."""
    _check_sizes(sizes, len(truths))
    points = []
    pending = list(sizes)
    fp = fn = seen = 0
    while pending and pending[0] == 0:
        points.append(SeriesPoint(0, 0, 0))
        pending.pop(0)
    for v, t in zip(verdicts, truths):
        if not pending:
            break
        seen += 1
        if t.is_attack and not v.is_attack:
            fn += 1
        elif not t.is_attack and v.is_attack:
            fp += 1
        while pending and pending[0] == seen:
            points.append(SeriesPoint(seen, fp, fn))
            pending.pop(0)
    if pending:
        raise LengthMismatch(f"verdict stream ended after {seen} records")
    return points


def _check_sizes(sizes, length):
    for n in sizes:
        if n < 0 or n > length:
            raise OutOfRange(n, length)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly ascending")


def fp_series(records, truths: Sequence[LabelClass], model: EncoderModel, engine: MatchEngine,
              sizes: Sequence[int], workers: int = 1) -> list[SeriesPoint]:
    if len(records) != len(truths):
        raise LengthMismatch(f"{len(records)} records for {len(truths)} labels")
    _check_sizes(sizes, len(records))
    upto = sizes[-1] if sizes else 0
    verdicts = detect_stream(records[:upto], model, engine, workers=workers)
    return series_from_verdicts(verdicts, truths, sizes)


def format_score(score: float) -> str:
    return format(score, ".12g")


@dataclass(frozen=True)
class AlertRecord:
    line_no: int
    verdict: Verdict

    def format(self) -> str:
        v = self.verdict
        if v.is_attack:
            return f"{v.source_index}\tattack\t{v.outcome.value}\t{v.matched_signature_id}\t{format_score(v.score)}"
        return f"{v.source_index}\tnormal\t-\t-\t{format_score(v.score)}"


def write_alert_log(verdicts: Iterable[Verdict], path) -> int:
    """Write one tab-separated line per verdict; returns the number of lines."""
    n = 0
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for n, v in enumerate(verdicts, start=1):
                fh.write(AlertRecord(n, v).format() + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return n


def write_series_csv(series: Sequence[SeriesPoint], path) -> None:
    if any(b.samples <= a.samples for a, b in zip(series, series[1:])):
        raise ValueError("series must be strictly ascending in samples")
    rows = [SERIES_HEADER] + [f"{p.samples},{p.fp},{p.fn}" for p in series]
    try:
        Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_series_csv(path) -> list[SeriesPoint]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != SERIES_HEADER:
        raise ValueError(f"{path}: missing series header")
    out = []
    for line in lines[1:]:
        s, fp, fn = line.split(",")
        out.append(SeriesPoint(int(s), int(fp), int(fn)))
    return out
