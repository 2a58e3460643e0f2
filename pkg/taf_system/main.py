"""Command-line front end: ``taf-system <command> [options]``.

Exit codes: 0 success, 1 validation failures, 2 configuration or I/O errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from taf_system.alignment.decoding import DecodeMode, viterbi_align
from taf_system.alignment.hmm import train_hmm
from taf_system.alignment.ibm1 import train_ibm1
from taf_system.alignment.model import AlignmentModel
from taf_system.alignment.needleman_wunsch import NWScoring
from taf_system.alignment.parallel_corpus import AlignmentLinks, ParallelCorpus
from taf_system.config import DEFAULT_CONFIG_PATH, PipelineConfig, load_config
from taf_system.corpus.dataset import DatasetReader, Example, write_dataset
from taf_system.corpus.tokenization_stats import tokenization_match_stats
from taf_system.errors import ConfigError, FormatError, MissingTranslationError, TafSystemError
from taf_system.evaluation.grounding import Grounder
from taf_system.evaluation.report import aggregate, evaluate_corpus
from taf_system.filling.assembly import AssemblyReport, assemble_silver
from taf_system.filling.error_report import ErrorReport
from taf_system.filling.fillers import FAILED_OUTPUT, EchoFiller, Filler, ProjectionFiller, ReplayFiller, fill_all
from taf_system.filling.instances import (
    FillerInstance,
    FillerTemplate,
    build_filler_infer,
    build_filler_train,
    read_instances,
    read_outputs,
    write_instances,
    write_outputs,
)
from taf_system.filling.validation import FillerVerdict, validate_filler_output
from taf_system.projection.filters import target_postprocess
from taf_system.projection.pipeline import run_tap
from taf_system.projection.pos_tagger import DEFAULT_LEXICON_PATH, LexiconPosTagger
from taf_system.representation.text import Utterance, get_tokenizer
from taf_system.utils.logger import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ERROR = 2

# (exit code, text for stdout, machine-readable record)
CommandResult = Tuple[int, str, Dict[str, Any]]


def _require_path(value: Optional[str], what: str) -> str:
    if not value:
        raise ConfigError(f"no {what} given (flag or config)")
    return value


def _reader(
    config: PipelineConfig,
    path: str,
    fmt: Optional[str] = None,
    strict: Optional[bool] = None,
) -> DatasetReader:
    io = config.io
    return DatasetReader(
        path,
        fmt or io.dataset_format,
        strict=io.strict if strict is None else strict,
        tsv_columns=io.tsv_columns,
        split=io.split,
        locale=io.locale,
    )


def _load_translations(config: PipelineConfig, path: str) -> Dict[str, Utterance]:
    translations: Dict[str, Utterance] = {}
    for example in _reader(config, path, fmt="canonical"):
        if example.id in translations:
            logger.warning(f"Duplicate translation for {example.id!r}; keeping the first")
            continue
        translations[example.id] = example.utterance
    logger.info(f"Loaded {len(translations)} translations from {path}")
    return translations


def _target_tokens(config: PipelineConfig, translation: Utterance) -> List[str]:
    tokenizer = get_tokenizer(config.tap.tokenizer)
    tokens = translation.tokens if translation.tokens is not None else tokenizer.tokenize(translation.raw)
    options = config.postprocess_for(translation.language)
    return list(target_postprocess(tokens, translation.language, options.lowercase, options.turkish_ascii))


def _source_tokens(config: PipelineConfig, example: Example) -> List[str]:
    if example.utterance.tokens is not None:
        return list(example.utterance.tokens)
    return get_tokenizer(config.tap.tokenizer).tokenize(example.utterance.raw)


def _joined_pairs(config: PipelineConfig, dataset: str, translations_path: str):
    translations = _load_translations(config, translations_path)
    for example in _reader(config, dataset):
        translation = translations.get(example.id)
        if translation is None:
            continue
        source, target = _source_tokens(config, example), _target_tokens(config, translation)
        if source and target:
            yield example.id, source, target


def _write_report(path: Optional[str], record: Dict[str, Any]) -> None:
    if path:
        Path(path).write_text(json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        logger.info(f"Wrote report to {path}")


def cmd_validate(args, config: PipelineConfig) -> CommandResult:
    reader = _reader(config, _require_path(config.io.dataset, "dataset"), strict=False)
    seen, duplicates, unanchored = set(), [], 0
    for example in reader:
        if example.id in seen:
            duplicates.append(example.id)
        seen.add(example.id)
        unanchored += int(example.unanchored)
    problems = [str(e) for e in reader.errors] + [f"duplicate id {i!r}" for i in duplicates]
    lines = problems + [f"{len(problems)} errors in {reader.records_read + reader.skipped} records"]
    if unanchored:
        lines.append(f"{unanchored} examples flagged unanchored")
    record = {
        "records": reader.records_read + reader.skipped,
        "errors": problems,
        "unanchored": unanchored,
    }
    return (EXIT_VALIDATION if problems else EXIT_OK), "\n".join(lines), record


def cmd_align_train(args, config: PipelineConfig) -> CommandResult:
    if args.parallel:
        corpus = ParallelCorpus.from_file(args.parallel)
    else:
        pairs = _joined_pairs(config, _require_path(config.io.dataset, "dataset"),
                              _require_path(config.io.translations, "translations"))
        corpus = ParallelCorpus(tuple((tuple(s), tuple(t)) for _, s, t in pairs))
    settings = config.alignment
    progress = config.logging.progress
    model = train_ibm1(corpus, settings.ibm1_iterations, progress=progress)
    record: Dict[str, Any] = {"pairs": len(corpus), "ibm1_log_likelihoods": list(model.log_likelihoods)}
    if settings.hmm_iterations:
        model = train_hmm(corpus, settings.hmm_iterations, init=model, window=settings.window,
                          p_null=settings.p_null, smooth_init=settings.smooth_init, progress=progress)
        record["hmm_log_likelihoods"] = list(model.log_likelihoods)
    model.save(_require_path(config.io.model, "model output path"))
    text = f"Trained alignment model on {len(corpus)} pairs -> {config.io.model}"
    return EXIT_OK, text, record


def _decode_mode(config: PipelineConfig, model: AlignmentModel) -> DecodeMode:
    mode = DecodeMode(config.alignment.decode_mode)
    if mode is DecodeMode.HMM and not model.has_hmm:
        logger.warning("Model has no HMM parameters, decoding with Model 1")
        return DecodeMode.MODEL1
    return mode


def cmd_align_apply(args, config: PipelineConfig) -> CommandResult:
    model = AlignmentModel.load(_require_path(config.io.model, "model"))
    mode = _decode_mode(config, model)
    smoothing = config.alignment.smoothing
    lines = []
    if args.parallel:
        for source, target in ParallelCorpus.from_file(args.parallel):
            lines.append(viterbi_align(model, source, target, mode, smoothing).to_pharaoh())
    else:
        pairs = _joined_pairs(config, _require_path(config.io.dataset, "dataset"),
                              _require_path(config.io.translations, "translations"))
        for example_id, source, target in pairs:
            lines.append(f"{example_id}\t{viterbi_align(model, source, target, mode, smoothing).to_pharaoh()}")
    output = _require_path(config.io.output, "output path")
    Path(output).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return EXIT_OK, f"Wrote {len(lines)} alignments to {output}", {"pairs": len(lines), "mode": mode.value}


def _read_links(config: PipelineConfig, path: str, examples: Sequence[Example],
                translations: Dict[str, Utterance]) -> Dict[str, AlignmentLinks]:
    raw: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            example_id, sep, links = line.partition("\t")
            if not sep:
                raise FormatError("expected id<TAB>links", path, line_number)
            raw[example_id] = links
    links_by_id = {}
    for example in examples:
        if example.id in raw and example.id in translations:
            source, target = _source_tokens(config, example), _target_tokens(config, translations[example.id])
            links_by_id[example.id] = AlignmentLinks.from_pharaoh(raw[example.id], len(source), len(target))
    return links_by_id


def cmd_tap(args, config: PipelineConfig) -> CommandResult:
    examples = list(_reader(config, _require_path(config.io.dataset, "dataset")))
    translations = _load_translations(config, _require_path(config.io.translations, "translations"))
    model, links = None, None
    if args.links:
        links = _read_links(config, args.links, examples, translations)
    else:
        model = AlignmentModel.load(_require_path(config.io.model, "model or --links"))
        if config.alignment.decode_mode == DecodeMode.HMM.value and not model.has_hmm:
            config.alignment.decode_mode = DecodeMode.MODEL1.value
    tagger = None
    if config.tap.pos_trim:
        tagger = LexiconPosTagger.from_yaml(config.tap.pos_lexicon or DEFAULT_LEXICON_PATH)
    silver, report = run_tap(examples, translations, config, model=model, tagger=tagger, links=links)
    write_dataset(silver, _require_path(config.io.output, "output path"))
    return EXIT_OK, report.render(), report.to_record()


def _template(config: PipelineConfig) -> FillerTemplate:
    return FillerTemplate(config.taf.separator, config.taf.signature_first)


def cmd_taf_build(args, config: PipelineConfig) -> CommandResult:
    template = _template(config)
    examples = [e for e in _reader(config, _require_path(config.io.dataset, "dataset")) if e.parse is not None]
    output = _require_path(config.io.output, "output path")
    if config.io.translations:
        translations = _load_translations(config, config.io.translations)
        instances, missing = [], 0
        for example in examples:
            try:
                instances.append(build_filler_infer(translations.get(example.id), example, template))
            except MissingTranslationError as e:
                logger.warning(str(e))
                missing += 1
        write_instances(instances, output)
        record = {"mode": "infer", "instances": len(instances), "missing_translations": missing}
        return EXIT_OK, f"{len(instances)} inference instances, {missing} missing translations", record

    instances = [build_filler_train(example, template) for example in examples]
    inconsistent = [
        instance.example_id for instance in instances
        if not _validate(instance.target, instance, config).ok
    ]
    for example_id in inconsistent:
        logger.error(f"{example_id}: training target fails its own instance checks")
    write_instances(instances, output)
    record = {"mode": "train", "instances": len(instances), "inconsistent": inconsistent}
    text = f"{len(instances)} training instances, {len(inconsistent)} inconsistent"
    return (EXIT_VALIDATION if inconsistent else EXIT_OK), text, record


def _validate(output: str, instance: FillerInstance, config: PipelineConfig) -> FillerVerdict:
    return validate_filler_output(output, instance, config.taf.case_sensitive, config.evaluation.normal_form,
                                  config.taf.squash_whitespace)


def _make_filler(config: PipelineConfig) -> Filler:
    backend, _, target = config.taf.backend.partition(":")
    if backend == "echo":
        return EchoFiller()
    if backend == "replay":
        return ReplayFiller(target)
    sources = {e.id: e for e in _reader(config, _require_path(config.io.dataset, "source dataset"))}
    model = AlignmentModel.load(config.io.model) if config.io.model else None
    mode = _decode_mode(config, model) if model is not None else DecodeMode.MODEL1
    return ProjectionFiller(sources, model, get_tokenizer(config.taf.tokenizer), mode)


def cmd_taf_fill(args, config: PipelineConfig) -> CommandResult:
    instances = list(read_instances(args.instances, _template(config)))
    filler = _make_filler(config)
    outputs = fill_all(instances, filler, config.taf.batch_size, config.logging.progress)
    output = _require_path(config.io.output, "output path")
    write_outputs(instances, outputs, output)
    failed = sum(filled == FAILED_OUTPUT for filled in outputs)
    text = f"Filled {len(outputs)} instances with the {filler.name} filler ({failed} failed)"
    return EXIT_OK, text, {"backend": filler.name, "instances": len(outputs), "failed": failed}


def _output_instances(config: PipelineConfig, path: str):
    template = _template(config)
    for record in read_outputs(path):
        instance = FillerInstance(record["input"], None, str(record.get("id", "")),
                                  record.get("language", "en"), template)
        yield instance, record["output"]


def cmd_taf_validate(args, config: PipelineConfig) -> CommandResult:
    report = ErrorReport([args.system])
    verdict_records = []
    for instance, output in _output_instances(config, args.outputs):
        verdict = _validate(output, instance, config)
        report.add(instance.language, verdict, args.system)
        verdict_records.append({"id": instance.example_id, "language": instance.language,
                                "verdict": verdict.cls.value, "details": list(verdict.details)})
    if config.io.output:
        with open(config.io.output, "w", encoding="utf-8") as f:
            for record in verdict_records:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
    return EXIT_OK, report.render(), report.to_record()


def cmd_analyze_errors(args, config: PipelineConfig) -> CommandResult:
    names = args.system_names or [Path(p).stem for p in args.outputs]
    if len(names) != len(args.outputs):
        raise ConfigError("--system-names must name every --outputs file")
    report = ErrorReport(names)
    for name, path in zip(names, args.outputs):
        for instance, output in _output_instances(config, path):
            verdict = _validate(output, instance, config)
            report.add(instance.language, verdict, name)
    return EXIT_OK, report.render(), report.to_record()


def cmd_taf_assemble(args, config: PipelineConfig) -> CommandResult:
    sources = {e.id: e for e in _reader(config, _require_path(config.io.dataset, "source dataset"))}
    translations = _load_translations(config, config.io.translations) if config.io.translations else {}
    report = AssemblyReport()
    silver = []
    for instance, output in _output_instances(config, args.outputs):
        source = sources.get(instance.example_id)
        if source is None:
            logger.warning(f"{instance.example_id}: no source example, output skipped")
            continue
        translation = translations.get(instance.example_id) or Utterance(instance.utterance, language=instance.language)
        verdict = _validate(output, instance, config)
        example = assemble_silver(translation, output, verdict, config.taf.policy, source, report,
                                  config.taf.drop_empty_slots)
        if example is not None:
            silver.append(example)
    write_dataset(silver, _require_path(config.io.output, "output path"))
    return EXIT_OK, report.to_frame().to_string(index=False), report.to_record()


def cmd_eval(args, config: PipelineConfig) -> CommandResult:
    settings = config.evaluation
    grounder = Grounder(settings.normal_form, settings.lowercase,
                        NWScoring(settings.nw_match, settings.nw_mismatch, settings.nw_gap), settings.vote_threshold)
    gold_path = _require_path(args.gold or config.io.dataset, "gold dataset")
    reports = []
    for pred_path in args.pred:
        golds = _reader(config, gold_path)
        preds = _reader(config, pred_path, fmt="canonical")
        reports.append(evaluate_corpus(golds, preds, grounder, settings.average_languages, settings.strict))
    report = reports[0] if len(reports) == 1 else aggregate(reports, settings.average_languages)
    return EXIT_OK, report.render(), report.to_record()


def cmd_stats_tokenization(args, config: PipelineConfig) -> CommandResult:
    first = _reader(config, _require_path(config.io.dataset, "dataset"))
    second = _reader(config, args.other, fmt=args.other_format)
    stats = tokenization_match_stats(first, second, strict=config.io.strict)
    return EXIT_OK, stats.to_frame().to_string(index=False, float_format=lambda v: f"{v:.2f}"), stats.to_record()


COMMANDS = {
    "validate": cmd_validate,
    "align-train": cmd_align_train,
    "align-apply": cmd_align_apply,
    "tap": cmd_tap,
    "taf-build": cmd_taf_build,
    "taf-fill": cmd_taf_fill,
    "taf-validate": cmd_taf_validate,
    "taf-assemble": cmd_taf_assemble,
    "eval": cmd_eval,
    "stats-tokenization": cmd_stats_tokenization,
    "analyze-errors": cmd_analyze_errors,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML pipeline configuration")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="Override one configuration key (repeatable)")
    common.add_argument("--dry-run", action="store_true", help="Print the resolved configuration and exit")
    common.add_argument("--report-out", help="Also write the report as JSON to this file")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--no-progress", action="store_true", help="Disable progress bars")
    common.add_argument("--input", help="Dataset to read (io.dataset)")
    common.add_argument("--format", choices=["canonical", "mtop-tsv", "conll-bio"], help="Dataset format")
    common.add_argument("--lenient", action="store_true", help="Skip malformed records instead of failing")
    common.add_argument("--translations", help="Canonical dataset of translations keyed by example id")
    common.add_argument("--model", help="Alignment model file")
    common.add_argument("--output", help="Output file")

    parser = argparse.ArgumentParser(prog="taf-system", description="Silver data for multilingual semantic parsing.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="Check a dataset for malformed records")
    for name in ("align-train", "align-apply"):
        p = sub.add_parser(name, parents=[common], help=f"{name.split('-')[1].capitalize()} a word aligner")
        p.add_argument("--parallel", help="source<TAB>target token file instead of --input/--translations")
    p = sub.add_parser("tap", parents=[common], help="Translate-align-project silver data")
    p.add_argument("--links", help="Precomputed id<TAB>links file from align-apply")
    sub.add_parser("taf-build", parents=[common], help="Build filler training or inference instances")
    p = sub.add_parser("taf-fill", parents=[common], help="Run a filler backend over instances")
    p.add_argument("--instances", required=True)
    p.add_argument("--backend", help="reference, echo or replay:<file>")
    p = sub.add_parser("taf-validate", parents=[common], help="Classify filler outputs")
    p.add_argument("--outputs", required=True)
    p.add_argument("--system", default="filler")
    p = sub.add_parser("taf-assemble", parents=[common], help="Assemble silver data from filler outputs")
    p.add_argument("--outputs", required=True)
    p.add_argument("--policy", choices=["keep-all-parseable", "strict"])
    p = sub.add_parser("eval", parents=[common], help="EM, intent accuracy and slot F1")
    p.add_argument("--gold")
    p.add_argument("--pred", nargs="+", required=True, help="One prediction file per run")
    p = sub.add_parser("stats-tokenization", parents=[common], help="Tokenization agreement per language")
    p.add_argument("--other", required=True)
    p.add_argument("--other-format", default="canonical", choices=["canonical", "mtop-tsv", "conll-bio"])
    p = sub.add_parser("analyze-errors", parents=[common], help="Filler error report across systems")
    p.add_argument("--outputs", nargs="+", required=True)
    p.add_argument("--system-names", nargs="+")
    return parser


def _flag_values(args) -> Dict[str, Any]:
    mapping = {
        "io.dataset": args.input,
        "io.dataset_format": args.format,
        "io.translations": args.translations,
        "io.model": args.model,
        "io.output": args.output,
        "logging.level": args.log_level,
        "taf.backend": getattr(args, "backend", None),
        "taf.policy": getattr(args, "policy", None),
    }
    values = {key: value for key, value in mapping.items() if value is not None}
    if args.lenient:
        values["io.strict"] = False
    if args.no_progress:
        values["logging.progress"] = False
    return values


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or "INFO")
    try:
        config_path = args.config or (DEFAULT_CONFIG_PATH if DEFAULT_CONFIG_PATH.exists() else None)
        config = load_config(config_path, args.set, _flag_values(args))
        setup_logging(config.logging.level)
        if args.dry_run:
            print(config.to_yaml(), end="")
            return EXIT_OK
        if not sys.stderr.isatty():
            config.logging.progress = False
        code, text, record = COMMANDS[args.command](args, config)
    except (ConfigError, OSError, FormatError) as e:
        logger.error(str(e))
        return EXIT_ERROR
    except (TafSystemError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR
    if text:
        print(text)
    try:
        _write_report(args.report_out, record)
    except OSError as e:
        logger.error(f"Cannot write report: {e}")
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
