from taf_system.evaluation.grounding import Grounder, GroundingResult, ground_tree_to_bio
from taf_system.evaluation.metrics import SlotScores, exact_match, intent_accuracy, slot_f1
from taf_system.evaluation.report import (
    LanguageScores,
    MetricsReport,
    aggregate,
    evaluate_corpus,
    format_mean_std,
)

__all__ = [
    "Grounder",
    "GroundingResult",
    "LanguageScores",
    "MetricsReport",
    "SlotScores",
    "aggregate",
    "evaluate_corpus",
    "exact_match",
    "format_mean_std",
    "ground_tree_to_bio",
    "intent_accuracy",
    "slot_f1",
]
