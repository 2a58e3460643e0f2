"""Pipeline configuration: dataclass tree loaded from YAML."""

import logging
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

import yaml

from taf_system.errors import ConfigError
from taf_system.representation.text import NORMAL_FORMS, TOKENIZERS

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "pipeline_settings.yaml"

_DATASET_FORMATS = ("canonical", "mtop-tsv", "conll-bio")
_DECODE_MODES = ("model1", "hmm")
_POLICIES = ("keep-all-parseable", "strict")
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


@dataclass
class IOSettings:
    dataset: Optional[str] = None
    dataset_format: str = "canonical"
    translations: Optional[str] = None
    model: Optional[str] = None
    output: Optional[str] = None
    strict: bool = True
    split: str = "train"
    locale: Optional[str] = None
    tsv_columns: Dict[str, int] = field(
        default_factory=lambda: {"id": 0, "utterance": 3, "locale": 5, "parse": 6, "tokens": 7})

    def __post_init__(self):
        _require(self.dataset_format in _DATASET_FORMATS,
                 f"io.dataset_format must be one of {_DATASET_FORMATS}, got {self.dataset_format!r}")
        _require("id" in self.tsv_columns and "utterance" in self.tsv_columns,
                 "io.tsv_columns must map at least 'id' and 'utterance'")
        _require(all(isinstance(v, int) and v >= 0 for v in self.tsv_columns.values()),
                 "io.tsv_columns values must be non-negative column indices")


@dataclass
class AlignmentSettings:
    ibm1_iterations: int = 5
    hmm_iterations: int = 5
    window: int = 5
    p_null: float = 0.2
    decode_mode: str = "hmm"
    smoothing: float = 1e-12
    smooth_init: bool = True

    def __post_init__(self):
        _require(self.ibm1_iterations >= 1, "alignment.ibm1_iterations must be >= 1")
        _require(self.hmm_iterations >= 0, "alignment.hmm_iterations must be >= 0")
        _require(self.window >= 1, "alignment.window must be >= 1")
        _require(0.0 <= self.p_null < 1.0, "alignment.p_null must be in [0, 1)")
        _require(self.decode_mode in _DECODE_MODES, f"alignment.decode_mode must be one of {_DECODE_MODES}")
        _require(self.smoothing >= 0.0, "alignment.smoothing must be >= 0")


@dataclass
class TapSettings:
    tokenizer: str = "whitespace"
    check_source_tokenization: bool = True
    whitespace_filter: bool = True
    pos_trim: bool = True
    exempt_labels: List[str] = field(default_factory=lambda: ["DATE_TIME"])
    reject_trimmed_empty: bool = True
    pos_lexicon: Optional[str] = None

    def __post_init__(self):
        _require(self.tokenizer in TOKENIZERS, f"tap.tokenizer must be one of {sorted(TOKENIZERS)}")


@dataclass
class TafSettings:
    separator: str = " | "
    signature_first: bool = False
    policy: str = "keep-all-parseable"
    backend: str = "reference"
    batch_size: int = 32
    case_sensitive: bool = True
    squash_whitespace: bool = False
    drop_empty_slots: bool = True
    tokenizer: str = "whitespace"

    def __post_init__(self):
        _require(bool(self.separator.strip()), "taf.separator must contain a visible character")
        _require(self.policy in _POLICIES, f"taf.policy must be one of {_POLICIES}")
        _require(self.batch_size >= 1, "taf.batch_size must be >= 1")
        _require(self.tokenizer in TOKENIZERS, f"taf.tokenizer must be one of {sorted(TOKENIZERS)}")
        backend = self.backend.split(":", 1)[0]
        _require(backend in ("reference", "replay", "echo"),
                 f"taf.backend must be reference, echo or replay:<file>, got {self.backend!r}")
        _require(backend != "replay" or ":" in self.backend, "taf.backend replay needs a file: replay:<file>")


@dataclass
class EvaluationSettings:
    normal_form: str = "NFC"
    lowercase: bool = False
    average_languages: Optional[List[str]] = None
    nw_match: float = 1.0
    nw_mismatch: float = -1.0
    nw_gap: float = -1.0
    vote_threshold: float = 0.5
    strict: bool = False

    def __post_init__(self):
        _require(self.normal_form in NORMAL_FORMS, f"evaluation.normal_form must be one of {NORMAL_FORMS}")
        _require(0.0 <= self.vote_threshold < 1.0, "evaluation.vote_threshold must be in [0, 1)")


@dataclass
class LoggingSettings:
    level: str = "INFO"
    progress: bool = True

    def __post_init__(self):
        self.level = str(self.level).upper()
        _require(self.level in _LOG_LEVELS, f"logging.level must be one of {_LOG_LEVELS}")


@dataclass
class PostprocessSettings:
    lowercase: bool = False
    turkish_ascii: bool = False


@dataclass
class PipelineConfig:
    io: IOSettings = field(default_factory=IOSettings)
    alignment: AlignmentSettings = field(default_factory=AlignmentSettings)
    tap: TapSettings = field(default_factory=TapSettings)
    taf: TafSettings = field(default_factory=TafSettings)
    evaluation: EvaluationSettings = field(default_factory=EvaluationSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)
    postprocess: Dict[str, PostprocessSettings] = field(default_factory=dict)
    languages: List[str] = field(default_factory=list)
    seed: int = 0

    def postprocess_for(self, language: str) -> PostprocessSettings:
        if language in self.postprocess:
            return self.postprocess[language]
        return self.postprocess.get(language.replace("_", "-").split("-")[0], PostprocessSettings())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, allow_unicode=True)

    @classmethod
    def from_dict(cls, data: Optional[Mapping[str, Any]]) -> "PipelineConfig":
        data = dict(data or {})
        postprocess = data.pop("postprocess", None) or {}
        _require(isinstance(postprocess, Mapping), "postprocess must map languages to settings")
        config = _build(cls, data, "")
        config.postprocess = {
            str(lang): _build(PostprocessSettings, settings or {}, f"postprocess.{lang}.")
            for lang, settings in postprocess.items()
        }
        return config


def _build(cls, data: Mapping[str, Any], prefix: str):
    _require(isinstance(data, Mapping), f"{prefix or 'config'} must be a mapping")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    _require(not unknown, f"unknown configuration keys: {', '.join(prefix + k for k in unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = known[name].default_factory() if callable(known[name].default_factory) else None
        if is_dataclass(default):
            kwargs[name] = _build(type(default), value or {}, f"{prefix}{name}.")
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"invalid configuration for {prefix or 'config'}: {e}") from e


def set_dotted(data: Dict[str, Any], key: str, value: Any) -> None:
    node = data
    parts = key.strip().split(".")
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        _require(isinstance(child, dict), f"cannot override {key!r}: {part!r} is not a section")
        node = child
    node[parts[-1]] = value


def apply_override(data: Dict[str, Any], assignment: str) -> None:
    """Apply one ``section.key=value`` override; the value is read as a YAML scalar."""
    key, sep, raw = assignment.partition("=")
    _require(bool(sep) and bool(key.strip()), f"override must look like section.key=value, got {assignment!r}")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot read override value {raw!r}: {e}") from e
    set_dotted(data, key, value)


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
    values: Optional[Mapping[str, Any]] = None,
) -> PipelineConfig:
    """Read a YAML config (or the defaults), then apply ``--set`` overrides and dotted-key ``values``."""
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML: {e}") from e
        _require(loaded is None or isinstance(loaded, dict), f"{path}: top level must be a mapping")
        data = loaded or {}
        logger.debug(f"Loaded configuration from {path}")
    for assignment in overrides:
        apply_override(data, assignment)
    for key, value in (values or {}).items():
        set_dotted(data, key, value)
    return PipelineConfig.from_dict(data)
