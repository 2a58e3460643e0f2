"""Filler backends.

A filler maps a batch of (utterance | signature) instances to raw parse
strings, one per instance, in input order. Neural fillers run elsewhere and
enter through ``ReplayFiller``.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from taf_system.alignment.decoding import DecodeMode, viterbi_align
from taf_system.alignment.model import AlignmentModel
from taf_system.alignment.parallel_corpus import AlignmentLinks
from taf_system.corpus.dataset import Example
from taf_system.errors import FillerUnavailableError, JoinError, TafSystemError
from taf_system.filling.instances import FillerInstance, read_outputs
from taf_system.projection.projector import anchor_slots, project_spans
from taf_system.representation.parse_tree import replace_leaf_values, serialize
from taf_system.representation.text import Tokenizer, WhitespaceTokenizer

logger = logging.getLogger(__name__)

# recorded for an instance the backend could not fill; it never parses
FAILED_OUTPUT = ""


class Filler(ABC):
    """Backend interface: one raw output string per instance, in input order.

    Per-instance problems are raised as TafSystemError or ValueError; raise
    FillerUnavailableError only when the backend itself cannot run.
    """

    name = "abstract"

    @abstractmethod
    def fill_batch(self, instances: Sequence[FillerInstance]) -> List[str]:
        """Outputs for ``instances`` in the same order."""
        ...


class EchoFiller(Filler):
    """Returns the input signature unchanged."""

    name = "echo"

    def fill_batch(self, instances: Sequence[FillerInstance]) -> List[str]:
        return [serialize(instance.signature) for instance in instances]


class ReplayFiller(Filler):
    """Serves precomputed outputs, looked up by (id, language) and then by input text."""

    name = "replay"

    def __init__(self, path: Union[str, Path]):
        self.path = path
        self.by_key: Dict[Tuple[str, str], str] = {}
        self.by_input: Dict[str, str] = {}
        for record in read_outputs(path):
            if "id" in record:
                self.by_key[(str(record["id"]), record.get("language", "en"))] = record["output"]
            if "input" in record:
                self.by_input.setdefault(record["input"], record["output"])
        logger.info(f"Replay filler loaded {len(self.by_input) or len(self.by_key)} outputs from {path}")

    def fill_batch(self, instances: Sequence[FillerInstance]) -> List[str]:
        outputs = []
        for instance in instances:
            output = self.by_key.get((instance.example_id, instance.language))
            if output is None:
                output = self.by_input.get(instance.input)
            if output is None:
                raise FillerUnavailableError(
                    f"{self.path}: no output for {instance.example_id!r} ({instance.language})")
            outputs.append(output)
        return outputs


class ProjectionFiller(Filler):
    """Test double that fills each empty slot by projecting the source value through word alignments.

    When the translation tokens equal the source tokens the identity alignment
    is used, so on English input it reproduces the training target.
    """

    name = "reference"

    def __init__(
        self,
        source_examples: Mapping[str, Example],
        model: Optional[AlignmentModel] = None,
        tokenizer: Optional[Tokenizer] = None,
        mode: Union[str, DecodeMode] = DecodeMode.HMM,
    ):
        self.source_examples = source_examples
        self.model = model
        self.tokenizer = tokenizer or WhitespaceTokenizer()
        self.mode = DecodeMode(mode)

    def _fill(self, instance: FillerInstance) -> str:
        example = self.source_examples.get(instance.example_id)
        if example is None or example.parse is None:
            raise JoinError(f"no source parse for {instance.example_id!r}")
        source_tokens = list(example.utterance.tokens or self.tokenizer.tokenize(example.utterance.raw))
        target_tokens = self.tokenizer.tokenize(instance.utterance)
        if target_tokens == source_tokens:
            links = AlignmentLinks.identity(len(source_tokens))
        elif self.model is not None:
            mode = self.mode if self.model.has_hmm else DecodeMode.MODEL1
            links = viterbi_align(self.model, source_tokens, target_tokens, mode)
        else:
            raise FillerUnavailableError("reference filler needs an alignment model for translated input")
        spans = project_spans(anchor_slots(example.parse, source_tokens), links)
        values = [tuple(target_tokens[s[0]:s[1]]) if s is not None else () for s in spans]
        return serialize(replace_leaf_values(example.parse, values))

    def fill_batch(self, instances: Sequence[FillerInstance]) -> List[str]:
        return [self._fill(instance) for instance in instances]


def fill(instance: FillerInstance, filler: Filler) -> str:
    """Raw filler output for one instance; backend failures become FillerUnavailableError."""
    try:
        outputs = filler.fill_batch([instance])
    except FillerUnavailableError:
        raise
    except (TafSystemError, OSError, ValueError) as e:
        raise FillerUnavailableError(f"{filler.name} filler failed: {e}") from e
    if len(outputs) != 1:
        raise FillerUnavailableError(f"{filler.name} filler returned {len(outputs)} outputs for 1 input")
    return outputs[0]


def _fill_or_fail(filler: Filler, instance: FillerInstance) -> str:
    try:
        outputs = filler.fill_batch([instance])
    except FillerUnavailableError:
        raise
    except (TafSystemError, ValueError) as e:
        logger.warning(f"{instance.example_id} ({instance.language}): {filler.name} filler failed: {e}")
        return FAILED_OUTPUT
    if len(outputs) != 1:
        raise FillerUnavailableError(f"{filler.name} filler returned {len(outputs)} outputs for 1 input")
    return outputs[0]


def fill_all(
    instances: Sequence[FillerInstance],
    filler: Filler,
    batch_size: int = 32,
    progress: bool = False,
) -> List[str]:
    """Fill instances in bounded batches, keeping input order.

    A batch that fails on one of its instances is refilled one instance at a
    time; instances that still fail get ``FAILED_OUTPUT``, which validation
    classifies as malformed. FillerUnavailableError and OSError stop the run.
    """
    outputs: List[str] = []
    failed = 0
    for start in tqdm(range(0, len(instances), batch_size), desc=f"fill ({filler.name})",
                      disable=not progress, leave=False):
        batch = instances[start:start + batch_size]
        try:
            filled = filler.fill_batch(batch)
        except FillerUnavailableError:
            raise
        except OSError as e:
            raise FillerUnavailableError(f"{filler.name} filler failed on batch at {start}: {e}") from e
        except (TafSystemError, ValueError) as e:
            logger.debug(f"Batch at {start} failed ({e}), filling its instances one by one")
            filled = [_fill_or_fail(filler, instance) for instance in batch]
            failed += sum(output == FAILED_OUTPUT for output in filled)
        if len(filled) != len(batch):
            raise FillerUnavailableError(f"{filler.name} filler returned {len(filled)} outputs for {len(batch)} inputs")
        outputs.extend(filled)
    if failed:
        logger.warning(f"{filler.name} filler could not fill {failed} of {len(instances)} instances")
    return outputs
