"""Dataset records and streaming readers/writers.

Three on-disk formats are understood:

* ``canonical`` - one JSON object per line with the fields
  id / locale / split / utterance / tokens / parse / provenance (+ labels)
* ``conll-bio`` - blank-line separated blocks of ``token<TAB>tag`` lines,
  headed by ``# intent = <label>`` (and optionally ``# id`` / ``# locale``)
* ``mtop-tsv`` - tab separated columns, column indices taken from config
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Union

from taf_system.corpus.bio import BioSequence, bio_to_tree
from taf_system.errors import FormatError, MalformedParseError
from taf_system.representation.parse_tree import ParseTree, leaf_values, parse, serialize
from taf_system.representation.text import Utterance

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class Split(str, Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"

    @classmethod
    def coerce(cls, value: str) -> "Split":
        aliases = {"eval": cls.VALIDATION, "dev": cls.VALIDATION, "valid": cls.VALIDATION}
        return aliases.get(value, None) or cls(value)


class Provenance(str, Enum):
    GOLD = "gold"
    SILVER_TAF = "silver-taf"
    SILVER_TAP = "silver-tap"


class DatasetFormat(str, Enum):
    MTOP_TSV = "mtop-tsv"
    CONLL_BIO = "conll-bio"
    CANONICAL = "canonical"


# MTOP release layout: id, intent, slots, utterance, domain, locale, decoupled form, tokens json
DEFAULT_TSV_COLUMNS: Dict[str, int] = {"id": 0, "utterance": 3, "locale": 5, "parse": 6, "tokens": 7}


@dataclass(frozen=True)
class Example:
    id: str
    utterance: Utterance
    parse: Optional[ParseTree] = None
    split: Split = Split.TRAIN
    provenance: Provenance = Provenance.GOLD
    original_labels: Dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def language(self) -> str:
        return self.utterance.language

    @property
    def unanchored(self) -> bool:
        """True when some slot token does not occur among the utterance tokens."""
        if self.parse is None or self.utterance.tokens is None:
            return False
        vocabulary = set(self.utterance.tokens)
        return any(token not in vocabulary for value in leaf_values(self.parse) for token in value)


def example_to_record(example: Example) -> Dict:
    record = {
        "id": example.id,
        "locale": example.language,
        "split": example.split.value,
        "utterance": example.utterance.raw,
        "tokens": list(example.utterance.tokens) if example.utterance.tokens is not None else None,
        "parse": serialize(example.parse) if example.parse is not None else None,
        "provenance": example.provenance.value,
    }
    if example.original_labels:
        record["labels"] = dict(sorted(example.original_labels.items()))
    return record


def record_to_example(record: Mapping) -> Example:
    for key in ("id", "locale", "utterance"):
        if key not in record:
            raise FormatError(f"missing field {key!r}")
    tokens = record.get("tokens")
    parse_text = record.get("parse")
    try:
        tree = parse(parse_text) if parse_text else None
    except MalformedParseError as e:
        raise FormatError(f"malformed parse: {e}") from e
    try:
        split = Split.coerce(record.get("split", Split.TRAIN.value))
        provenance = Provenance(record.get("provenance", Provenance.GOLD.value))
    except ValueError as e:
        raise FormatError(str(e)) from e
    return Example(
        id=str(record["id"]),
        utterance=Utterance(record["utterance"], tuple(tokens) if tokens is not None else None, record["locale"]),
        parse=tree,
        split=split,
        provenance=provenance,
        original_labels=dict(record.get("labels") or {}),
    )


class DatasetReader:
    """Streaming reader; strict mode raises on the first bad record, lenient mode skips and counts."""

    def __init__(
        self,
        path: PathLike,
        fmt: Union[str, DatasetFormat] = DatasetFormat.CANONICAL,
        strict: bool = True,
        tsv_columns: Optional[Mapping[str, int]] = None,
        split: Union[str, Split] = Split.TRAIN,
        locale: Optional[str] = None,
    ):
        self.path = Path(path)
        self.fmt = DatasetFormat(fmt)
        self.strict = strict
        self.tsv_columns = dict(tsv_columns or DEFAULT_TSV_COLUMNS)
        self.split = Split.coerce(split) if isinstance(split, str) else split
        self.locale = locale
        self.records_read = 0
        self.errors: List[FormatError] = []

    @property
    def skipped(self) -> int:
        return len(self.errors)

    def __iter__(self) -> Iterator[Example]:
        readers = {
            DatasetFormat.CANONICAL: self._read_canonical,
            DatasetFormat.MTOP_TSV: self._read_tsv,
            DatasetFormat.CONLL_BIO: self._read_conll,
        }
        with self.path.open("r", encoding="utf-8") as f:
            for line_number, example in readers[self.fmt](f):
                if isinstance(example, FormatError):
                    self._reject(example, line_number)
                    continue
                self.records_read += 1
                yield example
        if self.errors:
            logger.warning(f"Skipped {self.skipped} malformed records in {self.path}")

    def _reject(self, error: FormatError, line_number: int) -> None:
        located = FormatError(error.reason, str(self.path), line_number)
        if self.strict:
            raise located from error
        logger.warning(str(located))
        self.errors.append(located)

    def _read_canonical(self, lines: Iterable[str]):
        for line_number, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise FormatError("record is not a JSON object")
                yield line_number, record_to_example(record)
            except json.JSONDecodeError as e:
                yield line_number, FormatError(f"invalid JSON: {e.msg}")
            except FormatError as e:
                yield line_number, e

    def _read_tsv(self, lines: Iterable[str]):
        columns = self.tsv_columns
        for line_number, line in enumerate(lines, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            try:
                yield line_number, self._tsv_example(fields, columns)
            except FormatError as e:
                yield line_number, e

    def _tsv_example(self, fields: List[str], columns: Mapping[str, int]) -> Example:
        def column(name: str) -> Optional[str]:
            if name not in columns:
                return None
            index = columns[name]
            if index >= len(fields):
                raise FormatError(f"column {name!r} at index {index} missing ({len(fields)} columns)")
            return fields[index]

        tokens_field = column("tokens")
        tokens = None
        if tokens_field is not None:
            tokens = _parse_tokens_field(tokens_field)
        record = {
            "id": column("id"),
            "locale": column("locale") or self.locale or "en",
            "utterance": column("utterance"),
            "tokens": tokens,
            "parse": column("parse"),
            "split": self.split.value,
        }
        if record["id"] is None or record["utterance"] is None:
            raise FormatError("column map must provide 'id' and 'utterance'")
        return record_to_example(record)

    def _read_conll(self, lines: Iterable[str]):
        header: Dict[str, str] = {}
        tokens: List[str] = []
        tags: List[str] = []
        start_line = 0
        block_index = 0
        pending_error: Optional[FormatError] = None

        def flush():
            nonlocal block_index
            block_index += 1
            if pending_error is not None:
                return pending_error
            return self._conll_example(header, tokens, tags, block_index)

        for line_number, line in enumerate(lines, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                if header or tokens:
                    yield start_line, flush()
                header, tokens, tags, pending_error = {}, [], [], None
                continue
            if not header and not tokens:
                start_line = line_number
            if line.startswith("#"):
                key, sep, value = line[1:].partition("=")
                if sep:
                    header[key.strip()] = value.strip()
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2 and pending_error is None:
                pending_error = FormatError(f"expected token<TAB>tag at line {line_number}, got {line!r}")
                continue
            if pending_error is None:
                tokens.append(parts[0])
                tags.append(parts[1])
        if header or tokens:
            yield start_line, flush()

    def _conll_example(self, header: Mapping[str, str], tokens: List[str], tags: List[str], index: int):
        if "intent" not in header:
            return FormatError("block without '# intent = <label>' header")
        if not tokens:
            return FormatError("block without tokens")
        try:
            seq = BioSequence(tuple(tokens), tuple(tags), header["intent"])
            original_labels: Dict[str, str] = {}
            tree = bio_to_tree(seq, original_labels)
        except (FormatError, MalformedParseError) as e:
            return e if isinstance(e, FormatError) else FormatError(str(e))
        return Example(
            id=header.get("id", f"{self.path.stem}-{index}"),
            utterance=Utterance(" ".join(tokens), tuple(tokens), header.get("locale", self.locale or "en")),
            parse=tree,
            split=self.split,
            original_labels=original_labels,
        )


def _parse_tokens_field(text: str) -> List[str]:
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            payload = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid tokens JSON: {e.msg}") from e
        if not isinstance(payload, dict) or "tokens" not in payload:
            raise FormatError("tokens JSON has no 'tokens' field")
        return [str(t) for t in payload["tokens"]]
    return stripped.split()


def read_dataset(
    path: PathLike,
    fmt: Union[str, DatasetFormat] = DatasetFormat.CANONICAL,
    **kwargs,
) -> Iterator[Example]:
    return iter(DatasetReader(path, fmt, **kwargs))


def write_dataset(examples: Iterable[Example], path: PathLike) -> int:
    """Write examples in the canonical format, in iteration order."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as f:
        for example in examples:
            f.write(json.dumps(example_to_record(example), ensure_ascii=False))
            f.write("\n")
            count += 1
    logger.info(f"Wrote {count} examples to {path}")
    return count
