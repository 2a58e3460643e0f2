from taf_system.projection.filters import (
    DEFAULT_EXEMPT_LABELS,
    pos_trim,
    target_postprocess,
    whitespace_tokenization_filter,
)
from taf_system.projection.pipeline import FilterReport, TapPipeline, run_tap
from taf_system.projection.pos_tagger import LexiconPosTagger, PosTag, PosTaggedUtterance, PosTagger
from taf_system.projection.projector import ProjectionOutcome, RejectionReason, anchor_slots, project_parse

__all__ = [
    "DEFAULT_EXEMPT_LABELS",
    "FilterReport",
    "LexiconPosTagger",
    "PosTag",
    "PosTaggedUtterance",
    "PosTagger",
    "ProjectionOutcome",
    "RejectionReason",
    "TapPipeline",
    "anchor_slots",
    "pos_trim",
    "project_parse",
    "run_tap",
    "target_postprocess",
    "whitespace_tokenization_filter",
]
