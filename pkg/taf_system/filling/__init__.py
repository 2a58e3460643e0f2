from taf_system.filling.assembly import AssemblyPolicy, AssemblyReport, DropReason, assemble_silver
from taf_system.filling.error_report import ErrorReport, error_report
from taf_system.filling.fillers import EchoFiller, Filler, ProjectionFiller, ReplayFiller, fill, fill_all
from taf_system.filling.instances import (
    DEFAULT_TEMPLATE,
    FillerInstance,
    FillerTemplate,
    build_filler_infer,
    build_filler_train,
)
from taf_system.filling.validation import FillerVerdict, VerdictClass, validate_filler_output

__all__ = [
    "DEFAULT_TEMPLATE",
    "AssemblyPolicy",
    "AssemblyReport",
    "DropReason",
    "EchoFiller",
    "ErrorReport",
    "Filler",
    "FillerInstance",
    "FillerTemplate",
    "FillerVerdict",
    "ProjectionFiller",
    "ReplayFiller",
    "VerdictClass",
    "assemble_silver",
    "build_filler_infer",
    "build_filler_train",
    "error_report",
    "fill",
    "fill_all",
    "validate_filler_output",
]
