"""Per-language counts of filler output errors, optionally for several systems side by side."""

from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Sequence, Tuple

import pandas as pd

from taf_system.filling.validation import FillerVerdict, VerdictClass

ERROR_CLASSES = (VerdictClass.MALFORMED, VerdictClass.SIGNATURE_MISMATCH, VerdictClass.HALLUCINATION)
TOTAL_ROW = "Total"


class ErrorReport:
    """Verdict counts per system and language; signature mismatch, hallucination and malformed count as errors."""

    def __init__(self, systems: Sequence[str] = ("filler",)):
        self.systems: List[str] = list(systems)
        self.classes: Dict[str, Dict[str, Counter]] = {s: defaultdict(Counter) for s in self.systems}

    def add(self, language: str, verdict: FillerVerdict, system: str = "filler") -> None:
        if system not in self.classes:
            self.systems.append(system)
            self.classes[system] = defaultdict(Counter)
        self.classes[system][language][verdict.cls] += 1

    @property
    def languages(self) -> List[str]:
        return sorted({lang for per_lang in self.classes.values() for lang in per_lang})

    def total(self, system: str, language: str = TOTAL_ROW) -> int:
        return sum(self._counter(system, language).values())

    def errors(self, system: str, language: str = TOTAL_ROW) -> int:
        counter = self._counter(system, language)
        return sum(counter[c] for c in ERROR_CLASSES)

    def percentage(self, system: str, language: str = TOTAL_ROW) -> float:
        total = self.total(system, language)
        return 100.0 * self.errors(system, language) / total if total else 0.0

    def _counter(self, system: str, language: str) -> Counter:
        per_lang = self.classes.get(system, {})
        if language == TOTAL_ROW:
            return sum(per_lang.values(), Counter())
        return per_lang.get(language, Counter())

    def class_breakdown(self, system: str = "filler") -> Dict[str, Tuple[int, float]]:
        """Count and share (percent of all errors) per error class."""
        counter = self._counter(system, TOTAL_ROW)
        errors = self.errors(system)
        return {
            c.value: (counter[c], 100.0 * counter[c] / errors if errors else 0.0)
            for c in ERROR_CLASSES
        }

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for language in self.languages + [TOTAL_ROW]:
            row = {"language": language}
            for system in self.systems:
                row[f"{system} count"] = self.errors(system, language)
                row[f"{system} %"] = round(self.percentage(system, language), 2)
            rows.append(row)
        return pd.DataFrame(rows).set_index("language")

    def render(self) -> str:
        header = ["language"] + self.systems
        lines = ["\t".join(header)]
        for language in self.languages + [TOTAL_ROW]:
            cells = [f"{self.errors(s, language)} ({self.percentage(s, language):.2f}%)" for s in self.systems]
            lines.append("\t".join([language] + cells))
        for system in self.systems:
            breakdown = ", ".join(
                f"{name} {count} ({pct:.1f}%)" for name, (count, pct) in self.class_breakdown(system).items())
            lines.append(f"# {system}: {breakdown}")
        return "\n".join(lines)

    def to_record(self) -> Dict:
        return {
            system: {
                "languages": {
                    language: {
                        "errors": self.errors(system, language),
                        "total": self.total(system, language),
                        "percent": round(self.percentage(system, language), 2),
                    }
                    for language in self.languages + [TOTAL_ROW]
                },
                "classes": {name: count for name, (count, _) in self.class_breakdown(system).items()},
            }
            for system in self.systems
        }


def error_report(verdicts: Iterable[Tuple[str, FillerVerdict]], system: str = "filler") -> ErrorReport:
    """Report for one system from ``(language, verdict)`` pairs."""
    report = ErrorReport([system])
    for language, verdict in verdicts:
        report.add(language, verdict, system)
    return report
