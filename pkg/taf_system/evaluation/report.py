"""Corpus-level metrics per language, language averages and mean/std over runs."""

import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from taf_system.corpus.dataset import Example
from taf_system.errors import JoinError
from taf_system.evaluation.grounding import Grounder
from taf_system.evaluation.metrics import SlotScores, chunk_counts, exact_match, intent_accuracy

logger = logging.getLogger(__name__)

METRICS = ("exact_match", "intent_accuracy", "slot_precision", "slot_recall", "slot_f1")


@dataclass
class LanguageScores:
    exact_match: float = 0.0
    intent_accuracy: float = 0.0
    slot_precision: float = 0.0
    slot_recall: float = 0.0
    slot_f1: float = 0.0
    support: int = 0
    ungrounded: int = 0
    missing: int = 0
    no_chunks: bool = False

    def metric(self, name: str) -> float:
        return getattr(self, name)


@dataclass
class MetricsReport:
    per_language: Dict[str, LanguageScores] = field(default_factory=dict)
    averages: Dict[str, float] = field(default_factory=dict)
    average_languages: List[str] = field(default_factory=list)
    runs: List["MetricsReport"] = field(default_factory=list)
    std: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        """Percentages with two decimals; one row per language plus the average row."""
        rows = []
        for language in sorted(self.per_language):
            scores = self.per_language[language]
            row = {"language": language, **{m: round(100 * scores.metric(m), 2) for m in METRICS}}
            row["support"] = scores.support
            rows.append(row)
        if self.averages:
            row = {"language": f"Avg({len(self.average_languages)})",
                   **{m: round(100 * self.averages[m], 2) for m in METRICS}}
            row["support"] = sum(self.per_language[lang].support for lang in self.average_languages)
            rows.append(row)
        return pd.DataFrame(rows, columns=["language", *METRICS, "support"])

    def render(self) -> str:
        if self.runs and len(self.runs) > 1:
            lines = ["language\t" + "\t".join(METRICS)]
            for language in sorted(self.per_language):
                cells = [format_mean_std(self.per_language[language].metric(m), self.std[language][m]) for m in METRICS]
                lines.append("\t".join([language] + cells))
            return "\n".join(lines)
        return self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.2f}")

    def to_record(self) -> Dict:
        record = {
            "per_language": {lang: asdict(scores) for lang, scores in sorted(self.per_language.items())},
            "averages": dict(self.averages),
            "average_languages": list(self.average_languages),
        }
        if self.runs:
            record["runs"] = len(self.runs)
            record["std"] = {lang: dict(values) for lang, values in sorted(self.std.items())}
        return record


def default_average_languages(languages: Iterable[str]) -> List[str]:
    """All non-English languages, or every language when English is the only one."""
    languages = sorted(languages)
    others = [lang for lang in languages if not lang.lower().startswith("en")]
    return others or languages


def _averages(per_language: Dict[str, LanguageScores], subset: Sequence[str]) -> Dict[str, float]:
    present = [lang for lang in subset if lang in per_language]
    if not present:
        return {}
    return {m: float(np.mean([per_language[lang].metric(m) for lang in present])) for m in METRICS}


def evaluate_corpus(
    golds: Iterable[Example],
    preds: Iterable[Example],
    grounder: Optional[Grounder] = None,
    average_languages: Optional[Sequence[str]] = None,
    strict: bool = False,
) -> MetricsReport:
    """Score predictions joined to gold examples by id.

    A missing prediction scores 0 on every metric and leaves every gold chunk
    unmatched. Slot F1 grounds both trees onto the gold tokens.
    """
    grounder = grounder or Grounder()
    predictions = {p.id: p for p in preds}
    em = defaultdict(int)
    intent = defaultdict(int)
    support = defaultdict(int)
    ungrounded = defaultdict(int)
    missing = defaultdict(int)
    slots: Dict[str, SlotScores] = defaultdict(SlotScores)
    seen = set()
    for gold in golds:
        if gold.parse is None:
            logger.warning(f"{gold.id}: gold example without parse, skipped")
            continue
        language = gold.language
        seen.add(gold.id)
        support[language] += 1
        tokens = list(gold.utterance.tokens or gold.utterance.text.split())
        gold_grounding = grounder.ground(gold.parse, tokens)
        ungrounded[language] += len(gold_grounding.ungrounded)
        pred = predictions.get(gold.id)
        if pred is None or pred.parse is None:
            if strict:
                raise JoinError(f"no prediction for gold id {gold.id!r}")
            missing[language] += 1
            gold_chunks = len(gold_grounding.bio.chunks())
            slots[language] = slots[language] + SlotScores(0, 0, gold_chunks)
            continue
        em[language] += exact_match(pred.parse, gold.parse, grounder.form, grounder.lowercase)
        intent[language] += intent_accuracy(pred.parse, gold.parse)
        pred_grounding = grounder.ground(pred.parse, tokens)
        ungrounded[language] += len(pred_grounding.ungrounded)
        slots[language] = slots[language] + chunk_counts(gold_grounding.bio.tags, pred_grounding.bio.tags)
    extra = sorted(set(predictions) - seen)
    if extra:
        if strict:
            raise JoinError(f"{len(extra)} predictions have no gold example, e.g. {extra[0]!r}")
        logger.warning(f"Ignoring {len(extra)} predictions without a gold example")

    per_language = {}
    for language in sorted(support):
        n = support[language]
        scores = slots[language]
        per_language[language] = LanguageScores(
            exact_match=em[language] / n,
            intent_accuracy=intent[language] / n,
            slot_precision=scores.precision,
            slot_recall=scores.recall,
            slot_f1=scores.f1,
            support=n,
            ungrounded=ungrounded[language],
            missing=missing[language],
            no_chunks=scores.no_chunks,
        )
    subset = list(average_languages) if average_languages else default_average_languages(per_language)
    return MetricsReport(per_language, _averages(per_language, subset), subset)


def aggregate(reports: Sequence[MetricsReport], language_subset: Optional[Sequence[str]] = None) -> MetricsReport:
    """Mean and sample standard deviation of every metric across runs."""
    if not reports:
        return MetricsReport()
    languages = sorted(reports[0].per_language)
    for report in reports[1:]:
        if sorted(report.per_language) != languages:
            raise ValueError("reports must cover the same languages")
    ddof = 1 if len(reports) > 1 else 0
    per_language: Dict[str, LanguageScores] = {}
    std: Dict[str, Dict[str, float]] = {}
    for language in languages:
        runs = [r.per_language[language] for r in reports]
        values = {m: np.array([s.metric(m) for s in runs], dtype=np.float64) for m in METRICS}
        per_language[language] = LanguageScores(
            **{m: float(v.mean()) for m, v in values.items()},
            support=runs[0].support,
            ungrounded=int(sum(s.ungrounded for s in runs)),
            missing=int(sum(s.missing for s in runs)),
            no_chunks=all(s.no_chunks for s in runs),
        )
        std[language] = {m: float(v.std(ddof=ddof)) for m, v in values.items()}
    if language_subset:
        subset = list(language_subset)
    else:
        subset = reports[0].average_languages or default_average_languages(languages)
    return MetricsReport(per_language, _averages(per_language, subset), subset, list(reports), std)


def format_mean_std(mean: float, std: float, scale: float = 100.0, decimals: int = 1) -> str:
    """Render a table cell such as ``68.0 ± 0.1``."""
    return f"{mean * scale:.{decimals}f} ± {std * scale:.{decimals}f}"
