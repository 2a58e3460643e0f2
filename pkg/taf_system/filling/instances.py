"""Filler instances: an utterance joined with the signature of a parse."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from taf_system.corpus.dataset import Example
from taf_system.errors import FormatError, MissingTranslationError
from taf_system.representation.parse_tree import ParseTree, Signature, extract_signature, parse, serialize
from taf_system.representation.text import Utterance

logger = logging.getLogger(__name__)

DEFAULT_SEPARATOR = " | "


@dataclass(frozen=True)
class FillerTemplate:
    """How utterance and signature are joined into one filler input.

    A literal ``|`` inside an utterance is written as ``\\|``.
    """

    separator: str = DEFAULT_SEPARATOR
    signature_first: bool = False

    @staticmethod
    def escape(utterance: str) -> str:
        return utterance.replace("|", "\\|")

    @staticmethod
    def unescape(utterance: str) -> str:
        return utterance.replace("\\|", "|")

    def join(self, utterance: str, signature: str) -> str:
        utterance = self.escape(utterance)
        if self.signature_first:
            return f"{signature}{self.separator}{utterance}"
        return f"{utterance}{self.separator}{signature}"

    def split(self, text: str) -> Tuple[str, str]:
        """Return (utterance, signature text). Signatures never contain the separator."""
        if self.signature_first:
            signature, sep, utterance = text.partition(self.separator)
        else:
            utterance, sep, signature = text.rpartition(self.separator)
        if not sep:
            raise ValueError(f"filler input has no separator {self.separator!r}: {text!r}")
        return self.unescape(utterance), signature


DEFAULT_TEMPLATE = FillerTemplate()


@dataclass(frozen=True)
class FillerInstance:
    """One filler input; ``target`` is the full parse for training instances and ``None`` at inference."""

    input: str
    target: Optional[str] = None
    example_id: str = ""
    language: str = "en"
    template: FillerTemplate = field(default=DEFAULT_TEMPLATE, compare=False)

    @property
    def utterance(self) -> str:
        return self.template.split(self.input)[0]

    @property
    def signature(self) -> Signature:
        return parse(self.template.split(self.input)[1])


def build_filler_train(example: Example, template: FillerTemplate = DEFAULT_TEMPLATE) -> FillerInstance:
    """Filler training instance: (utterance | signature) -> full parse."""
    if example.parse is None:
        raise ValueError(f"example {example.id!r} has no parse")
    signature = serialize(extract_signature(example.parse))
    return FillerInstance(
        input=template.join(example.utterance.text, signature),
        target=serialize(example.parse),
        example_id=example.id,
        language=example.language,
        template=template,
    )


def build_filler_infer(
    translation: Optional[Utterance],
    source_example: Example,
    template: FillerTemplate = DEFAULT_TEMPLATE,
) -> FillerInstance:
    """Inference instance: the source utterance replaced by its translation."""
    if translation is None:
        raise MissingTranslationError(f"no translation for example {source_example.id!r}")
    if source_example.parse is None:
        raise ValueError(f"example {source_example.id!r} has no parse")
    signature = serialize(extract_signature(source_example.parse))
    return FillerInstance(
        input=template.join(translation.text, signature),
        example_id=source_example.id,
        language=translation.language,
        template=template,
    )


def target_tree(instance: FillerInstance) -> Optional[ParseTree]:
    """Parsed training target, ``None`` for inference instances."""
    return parse(instance.target) if instance.target is not None else None


def write_instances(instances: Iterable[FillerInstance], path: Union[str, Path]) -> int:
    """JSON lines ``{id, language, input, target}``; returns the number written."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as f:
        for instance in instances:
            record = {
                "id": instance.example_id,
                "language": instance.language,
                "input": instance.input,
                "target": instance.target,
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    logger.info(f"Wrote {count} filler instances to {path}")
    return count


def read_instances(path: Union[str, Path], template: FillerTemplate = DEFAULT_TEMPLATE) -> Iterator[FillerInstance]:
    """Inverse of :func:`write_instances`. Raises FormatError with the line number of a bad record."""
    with Path(path).open("r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                yield FillerInstance(
                    input=record["input"],
                    target=record.get("target"),
                    example_id=str(record.get("id", "")),
                    language=record.get("language", "en"),
                    template=template,
                )
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise FormatError(f"bad filler instance record: {e}", str(path), line_number) from e


def read_outputs(path: Union[str, Path]) -> List[dict]:
    """Filler output records ``{id, language, input, output}`` in file order."""
    records = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatError(f"invalid JSON: {e.msg}", str(path), line_number) from e
            if not isinstance(record, dict) or "output" not in record:
                raise FormatError("record has no 'output' field", str(path), line_number)
            records.append(record)
    return records


def write_outputs(instances: Iterable[FillerInstance], outputs: Iterable[str], path: Union[str, Path]) -> int:
    """JSON lines ``{id, language, input, output}``, one per instance and output pair."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as f:
        for instance, output in zip(instances, outputs):
            record = {
                "id": instance.example_id,
                "language": instance.language,
                "input": instance.input,
                "output": output,
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    logger.info(f"Wrote {count} filler outputs to {path}")
    return count
