"""Confusion matrices, accuracy/recall/precision/F1 and comparison tables."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .annotate import SentimentLabel

AVERAGINGS = ("weighted", "macro")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _as_label(x) -> SentimentLabel:
    if isinstance(x, SentimentLabel):
        return x
    if isinstance(x, bool) or isinstance(x, int):
        return SentimentLabel.POSITIVE if x else SentimentLabel.NEGATIVE
    return SentimentLabel(x)


def confusion(predictions: Sequence, gold: Sequence) -> ConfusionMatrix:
    """Counts with Positive as the positive class. Labels may be enums, strings or 0/1."""
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(gold)} gold")
    if not gold:
        raise ValueError("cannot build a confusion matrix from zero examples")
    tp = fp = fn = tn = 0
    for p, g in zip(predictions, gold):
        p_pos = _as_label(p) is SentimentLabel.POSITIVE
        g_pos = _as_label(g) is SentimentLabel.POSITIVE
        if p_pos and g_pos:
            tp += 1
        elif p_pos:
            fp += 1
        elif g_pos:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def _ratio(num: int, den: int) -> Fraction:
    # 0/0 is defined as 0
    return Fraction(num, den) if den else Fraction(0)


def _f1(p: Fraction, r: Fraction) -> Fraction:
    return 2 * p * r / (p + r) if p + r else Fraction(0)


@dataclass
class MetricsReport:
    """Metrics on a 0-100 scale."""

    name: str
    accuracy: float
    recall: float
    precision: float
    f1: float
    averaging: str
    per_class: dict[str, dict[str, float]] = field(default_factory=dict)
    confusion: dict[str, int] = field(default_factory=dict)
    seed: int | None = None

    def to_record(self) -> dict:
        return asdict(self)


def metrics(cm: ConfusionMatrix, averaging: str = "weighted", name: str = "",
            seed: int | None = None) -> MetricsReport:
    if averaging not in AVERAGINGS:
        raise ValueError(f"averaging must be one of {AVERAGINGS}")
    if cm.total <= 0:
        raise ValueError("empty confusion matrix")
    # (tp, fp, fn) seen from each class's point of view
    views = {
        SentimentLabel.POSITIVE.value: (cm.tp, cm.fp, cm.fn),
        SentimentLabel.NEGATIVE.value: (cm.tn, cm.fn, cm.fp),
    }
    # exact rational arithmetic, so weighted recall and accuracy are the same float
    exact = {}
    for label, (tp, fp, fn) in views.items():
        p, r = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
        exact[label] = {"precision": p, "recall": r, "f1": _f1(p, r), "support": tp + fn}
    if averaging == "weighted":
        weights = {k: Fraction(v["support"], cm.total) for k, v in exact.items()}
    else:
        weights = {k: Fraction(1, len(exact)) for k in exact}

    def pct(x: Fraction) -> float:
        return float(100 * x)

    def avg(key: str) -> float:
        return pct(sum(weights[k] * exact[k][key] for k in exact))

    per_class = {
        k: {"precision": pct(v["precision"]), "recall": pct(v["recall"]),
            "f1": pct(v["f1"]), "support": v["support"]}
        for k, v in exact.items()
    }
    return MetricsReport(
        name=name,
        accuracy=pct(Fraction(cm.tp + cm.tn, cm.total)),
        recall=avg("recall"),
        precision=avg("precision"),
        f1=avg("f1"),
        averaging=averaging,
        per_class=per_class,
        confusion=asdict(cm),
        seed=seed,
    )


def evaluate(predictions: Sequence, gold: Sequence, averaging: str = "weighted",
             name: str = "", seed: int | None = None) -> MetricsReport:
    return metrics(confusion(predictions, gold), averaging, name, seed)


@dataclass
class Comparison:
    rows: list[MetricsReport]

    def records(self) -> list[dict]:
        return [r.to_record() for r in self.rows]

    def table(self) -> str:
        width = max([len("Model")] + [len(r.name) for r in self.rows])
        header = f"{'Model':<{width}}  {'A':>6}  {'R':>6}  {'P':>6}  {'F1':>6}  averaging"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.name:<{width}}  {r.accuracy:6.2f}  {r.recall:6.2f}  "
                f"{r.precision:6.2f}  {r.f1:6.2f}  {r.averaging}"
            )
        return "\n".join(lines)


def compare(reports: Sequence[MetricsReport]) -> Comparison:
    """Order reports by F1, then accuracy, both descending."""
    if not reports:
        raise ValueError("need at least one report")
    return Comparison(sorted(reports, key=lambda r: (-r.f1, -r.accuracy)))
