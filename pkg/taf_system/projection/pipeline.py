"""Translate-Align-Project: silver data from source parses, translations and word alignments."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from taf_system.alignment.decoding import viterbi_align
from taf_system.alignment.model import AlignmentModel
from taf_system.alignment.parallel_corpus import AlignmentLinks
from taf_system.config import PipelineConfig, TapSettings
from taf_system.corpus.dataset import Example, Provenance
from taf_system.errors import LengthMismatchError, TafSystemError, UnanchoredSlotError
from taf_system.projection.filters import target_postprocess, trim_spans, whitespace_tokenization_filter
from taf_system.projection.pos_tagger import PosTaggedUtterance, PosTagger
from taf_system.projection.projector import RejectionReason, anchor_slots, project_parse
from taf_system.representation.parse_tree import leaf_slots, replace_leaf_values, slot_label_counter
from taf_system.representation.text import Utterance, get_tokenizer

logger = logging.getLogger(__name__)


@dataclass
class FilterReport:
    """Per-reason rejection counts over all inputs of a TAP run."""

    total: int = 0
    kept: int = 0
    rejections: Counter = field(default_factory=Counter)

    def add(self, reason: Optional[RejectionReason]) -> None:
        self.total += 1
        if reason is None:
            self.kept += 1
        else:
            self.rejections[RejectionReason(reason)] += 1

    def merge(self, other: "FilterReport") -> "FilterReport":
        return FilterReport(self.total + other.total, self.kept + other.kept, self.rejections + other.rejections)

    def percentage(self, reason: RejectionReason) -> float:
        return 100.0 * self.rejections[RejectionReason(reason)] / self.total if self.total else 0.0

    @property
    def rejected(self) -> int:
        return sum(self.rejections.values())

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"reason": reason.value, "count": self.rejections[reason], "percent": round(self.percentage(reason), 2)}
            for reason in RejectionReason
        ]
        kept_pct = 100.0 * self.kept / self.total if self.total else 0.0
        rows.append({"reason": "kept", "count": self.kept, "percent": round(kept_pct, 2)})
        return pd.DataFrame(rows, columns=["reason", "count", "percent"])

    def to_record(self) -> Dict:
        return {
            "total": self.total,
            "kept": self.kept,
            "rejections": {reason.value: self.rejections[reason] for reason in RejectionReason},
            "percent": {reason.value: round(self.percentage(reason), 2) for reason in RejectionReason},
        }

    def render(self) -> str:
        return self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.2f}")


class TapPipeline:
    """Runs source check, whitespace filter, alignment, projection and POS trimming per example.

    Alignment links come from ``links`` (keyed by example id) when given,
    otherwise they are decoded with ``model``.
    """

    def __init__(
        self,
        config: PipelineConfig,
        model: Optional[AlignmentModel] = None,
        tagger: Optional[PosTagger] = None,
        links: Optional[Mapping[str, AlignmentLinks]] = None,
        pos_tags: Optional[Mapping[str, PosTaggedUtterance]] = None,
    ):
        if model is None and links is None:
            raise ValueError("TAP needs either an alignment model or precomputed links")
        self.config = config
        self.settings: TapSettings = config.tap
        self.model = model
        self.tagger = tagger
        self.links = links
        self.pos_tags = pos_tags
        self.tokenizer = get_tokenizer(self.settings.tokenizer)
        if self.settings.pos_trim and tagger is None and pos_tags is None:
            raise ValueError("POS trimming is enabled but no tagger or POS tags were given")

    def process(
        self,
        example: Example,
        translation: Optional[Utterance],
    ) -> Tuple[Optional[Example], Optional[RejectionReason]]:
        if translation is None:
            return None, RejectionReason.MISSING_TRANSLATION
        source_tokens = self.tokenizer.tokenize(example.utterance.raw)
        if example.utterance.tokens is not None:
            if self.settings.check_source_tokenization and list(example.utterance.tokens) != source_tokens:
                return None, RejectionReason.SOURCE_TOKENIZATION
            source_tokens = list(example.utterance.tokens)

        options = self.config.postprocess_for(translation.language)
        raw_target = target_postprocess(translation.raw, translation.language, options.lowercase, options.turkish_ascii)
        tokens = translation.tokens if translation.tokens is not None else self.tokenizer.tokenize(translation.raw)
        target_tokens = list(target_postprocess(tokens, translation.language, options.lowercase, options.turkish_ascii))
        if self.settings.whitespace_filter and not whitespace_tokenization_filter(raw_target, target_tokens):
            return None, RejectionReason.NON_WHITESPACE

        tagged = None
        if self.settings.pos_trim:
            tagged = self._pos_tags(example.id, target_tokens, translation.language)
            if list(tagged.tokens) != target_tokens:
                return None, RejectionReason.POS_TOKENIZATION

        try:
            anchors = anchor_slots(example.parse, source_tokens)
        except UnanchoredSlotError as e:
            logger.debug(f"{example.id}: {e}")
            return None, RejectionReason.UNANCHORED_SOURCE_SLOT
        links = self._links(example.id, source_tokens, target_tokens)
        outcome = project_parse(example.parse, source_tokens, target_tokens, links, anchors)
        if not outcome.accepted:
            return None, outcome.rejection_reason

        tree = outcome.tree
        if tagged is not None:
            labels = [slot.label for slot in leaf_slots(tree)]
            spans = trim_spans(outcome.spans, labels, tagged.tags, frozenset(self.settings.exempt_labels))
            tree = replace_leaf_values(tree, [tuple(target_tokens[s[0]:s[1]]) if s else () for s in spans])
            if self.settings.reject_trimmed_empty and slot_label_counter(tree) != slot_label_counter(example.parse):
                return None, RejectionReason.SLOT_SET

        silver = Example(
            id=f"{example.id}@{translation.language}",
            utterance=Utterance(raw_target, tuple(target_tokens), translation.language),
            parse=tree,
            split=example.split,
            provenance=Provenance.SILVER_TAP,
            original_labels=dict(example.original_labels),
        )
        return silver, None

    def _pos_tags(self, example_id: str, tokens: List[str], language: str) -> PosTaggedUtterance:
        if self.pos_tags is not None and example_id in self.pos_tags:
            return self.pos_tags[example_id]
        if self.tagger is None:
            raise ValueError(f"no POS tags for {example_id!r} and no tagger configured")
        return self.tagger.tag(tokens, language)

    def _links(self, example_id: str, source_tokens: List[str], target_tokens: List[str]) -> AlignmentLinks:
        if self.links is not None and example_id in self.links:
            links = self.links[example_id]
            if (links.source_length, links.target_length) != (len(source_tokens), len(target_tokens)):
                raise LengthMismatchError(
                    f"{example_id}: links cover {links.source_length}x{links.target_length} tokens, "
                    f"sentence pair has {len(source_tokens)}x{len(target_tokens)}")
            return links
        if self.model is None:
            raise ValueError(f"no precomputed links for {example_id!r} and no alignment model")
        return viterbi_align(self.model, source_tokens, target_tokens,
                             self.config.alignment.decode_mode, self.config.alignment.smoothing)

    def run(
        self,
        examples: Iterable[Example],
        translations: Mapping[str, Utterance],
    ) -> Tuple[List[Example], FilterReport]:
        report = FilterReport()
        silver: List[Example] = []
        for example in tqdm(examples, desc="TAP", disable=not self.config.logging.progress, leave=False):
            if example.parse is None:
                logger.warning(f"{example.id}: no source parse, skipped")
                report.add(RejectionReason.UNANCHORED_SOURCE_SLOT)
                continue
            try:
                projected, reason = self.process(example, translations.get(example.id))
            except LengthMismatchError as e:
                logger.warning(str(e))
                projected, reason = None, RejectionReason.SOURCE_TOKENIZATION
            except (TafSystemError, ValueError) as e:
                logger.warning(f"{example.id}: projection failed: {e}")
                projected, reason = None, RejectionReason.MALFORMED_PROJECTION
            report.add(reason)
            if projected is not None:
                silver.append(projected)
        logger.info(f"TAP kept {report.kept} of {report.total} examples")
        return silver, report


def run_tap(
    examples: Iterable[Example],
    translations: Mapping[str, Utterance],
    config: PipelineConfig,
    model: Optional[AlignmentModel] = None,
    tagger: Optional[PosTagger] = None,
    links: Optional[Mapping[str, AlignmentLinks]] = None,
    pos_tags: Optional[Mapping[str, PosTaggedUtterance]] = None,
) -> Tuple[List[Example], FilterReport]:
    return TapPipeline(config, model, tagger, links, pos_tags).run(examples, translations)
