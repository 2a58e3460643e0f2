import numpy as np
import pytest

from conftest import ALARM_PARSE
from helpers import random_tree
from taf_system.corpus import Example, Provenance
from taf_system.errors import FillerUnavailableError, FormatError, MissingTranslationError
from taf_system.filling import (
    AssemblyPolicy,
    AssemblyReport,
    DropReason,
    EchoFiller,
    Filler,
    FillerInstance,
    FillerTemplate,
    ProjectionFiller,
    ReplayFiller,
    VerdictClass,
    assemble_silver,
    build_filler_infer,
    build_filler_train,
    fill,
    fill_all,
    validate_filler_output,
)
from taf_system.filling.fillers import FAILED_OUTPUT
from taf_system.filling.instances import read_instances, read_outputs, target_tree, write_instances, write_outputs
from taf_system.filling.validation import find_hallucinations
from taf_system.representation import Utterance, leaf_slots, parse, serialize

ALARM_INPUT = "set an 8 am alarm | [IN:CREATE_ALARM [SL:DATE_TIME ] ]"
MESSAGE_PARSE = "[IN:SEND_MESSAGE [SL:RECIPIENT mom ] [SL:CONTENT hello ] ]"


@pytest.fixture
def message_example():
    return Example("msg-1", Utterance("text mom hello", ("text", "mom", "hello")), parse(MESSAGE_PARSE))


@pytest.fixture
def weckruf():
    return Utterance("stelle einen Wecker für 8 am", ("stelle", "einen", "Wecker", "für", "8", "am"), "de")


def test_build_filler_train(alarm_example):
    instance = build_filler_train(alarm_example)
    assert instance.input == ALARM_INPUT
    assert instance.target == ALARM_PARSE
    assert instance.example_id == "alarm-1"
    assert instance.utterance == "set an 8 am alarm"
    assert serialize(instance.signature) == "[IN:CREATE_ALARM [SL:DATE_TIME ] ]"
    assert target_tree(instance) == alarm_example.parse


def test_build_filler_infer(alarm_example, weckruf):
    instance = build_filler_infer(weckruf, alarm_example)
    assert instance.input == "stelle einen Wecker für 8 am | [IN:CREATE_ALARM [SL:DATE_TIME ] ]"
    assert instance.target is None
    assert instance.language == "de"
    with pytest.raises(MissingTranslationError):
        build_filler_infer(None, alarm_example)


def test_template_escapes_pipes():
    template = FillerTemplate()
    joined = template.join("rock | roll", "[IN:PLAY_MUSIC [SL:GENRE ] ]")
    assert joined == "rock \\| roll | [IN:PLAY_MUSIC [SL:GENRE ] ]"
    assert template.split(joined) == ("rock | roll", "[IN:PLAY_MUSIC [SL:GENRE ] ]")
    with pytest.raises(ValueError):
        template.split("no separator here")


def test_signature_first_template(alarm_example):
    template = FillerTemplate(separator=" => ", signature_first=True)
    instance = build_filler_train(alarm_example, template)
    assert instance.input == "[IN:CREATE_ALARM [SL:DATE_TIME ] ] => set an 8 am alarm"
    assert instance.utterance == "set an 8 am alarm"


def test_instance_files(tmp_path, alarm_example, dentist_example):
    instances = [build_filler_train(alarm_example), build_filler_train(dentist_example)]
    assert write_instances(instances, tmp_path / "train.jsonl") == 2
    assert list(read_instances(tmp_path / "train.jsonl")) == instances
    (tmp_path / "bad.jsonl").write_text('{"target": "x"}\n', encoding="utf-8")
    with pytest.raises(FormatError):
        list(read_instances(tmp_path / "bad.jsonl"))


def test_output_files(tmp_path, alarm_example):
    instance = build_filler_train(alarm_example)
    write_outputs([instance], [ALARM_PARSE], tmp_path / "out.jsonl")
    assert read_outputs(tmp_path / "out.jsonl") == [
        {"id": "alarm-1", "language": "en", "input": ALARM_INPUT, "output": ALARM_PARSE}]
    (tmp_path / "bad.jsonl").write_text('{"id": "1"}\n', encoding="utf-8")
    with pytest.raises(FormatError):
        read_outputs(tmp_path / "bad.jsonl")


def test_validate_verdict_classes(alarm_example):
    instance = build_filler_train(alarm_example)
    assert validate_filler_output(ALARM_PARSE, instance).ok

    malformed = validate_filler_output("[IN:CREATE_ALARM [SL:DATE_TIME 8 am ]", instance)
    assert malformed.cls is VerdictClass.MALFORMED
    assert malformed.tree is None

    renamed = validate_filler_output("[IN:CREATE_TIMER [SL:DATE_TIME 8 am ] ]", instance)
    assert renamed.cls is VerdictClass.SIGNATURE_MISMATCH
    assert renamed.details == ("IN:CREATE_ALARM->IN:CREATE_TIMER",)

    missing = validate_filler_output("[IN:CREATE_ALARM ]", instance)
    assert missing.details == ("-DATE_TIME",)

    invented = validate_filler_output("[IN:CREATE_ALARM [SL:DATE_TIME 9 am ] ]", instance)
    assert invented.cls is VerdictClass.HALLUCINATION
    assert invented.details == ("DATE_TIME=9 am",)


def test_signature_mismatch_is_checked_before_hallucination(alarm_example):
    instance = build_filler_train(alarm_example)
    verdict = validate_filler_output("[IN:CREATE_ALARM [SL:DATE_TIME 9 am ] [SL:DATE_TIME 10 ] ]", instance)
    assert verdict.cls is VerdictClass.SIGNATURE_MISMATCH
    assert verdict.details == ("+DATE_TIME",)


def test_validation_ignores_slot_order(message_example):
    instance = build_filler_train(message_example)
    swapped = validate_filler_output("[IN:SEND_MESSAGE [SL:CONTENT hello ] [SL:RECIPIENT mom ] ]", instance)
    assert swapped.ok


def test_find_hallucinations_normalization():
    tree = parse("[IN:A [SL:X 8 am ] [SL:Y Café ] ]")
    assert find_hallucinations(tree, "wake me at 8am in the cafe\N{COMBINING ACUTE ACCENT}") == ("X=8 am", "Y=Café")
    assert find_hallucinations(tree, "8 am at Cafe\N{COMBINING ACUTE ACCENT}") == ()
    assert find_hallucinations(tree, "8 AM at café") == ("X=8 am", "Y=Café")
    assert find_hallucinations(tree, "8 AM at café", case_sensitive=False) == ()


def test_whitespace_squash_is_opt_in():
    tree = parse("[IN:A [SL:X 8 am ] ]")
    instance = FillerInstance("wake me at 8am | [IN:A [SL:X ] ]")
    assert find_hallucinations(tree, "wake me at 8am") == ("X=8 am",)
    assert find_hallucinations(tree, "wake me at 8am", squash_whitespace=True) == ()
    assert validate_filler_output("[IN:A [SL:X 8 am ] ]", instance).cls is VerdictClass.HALLUCINATION
    assert validate_filler_output("[IN:A [SL:X 8 am ] ]", instance, squash_whitespace=True).ok


def test_taxonomy_counts(alarm_example, message_example):
    alarm = build_filler_train(alarm_example)
    message = build_filler_train(message_example)
    outputs = (
        [(alarm, "[IN:CREATE_ALARM [SL:DATE_TIME 8 am ]")] * 5
        + [(alarm, "[IN:CREATE_TIMER [SL:DATE_TIME 8 am ] ]")] * 10
        + [(message, "[IN:SEND_MESSAGE [SL:CONTENT hello ] [SL:RECIPIENT mom ] ]")] * 5
        + [(alarm, "[IN:CREATE_ALARM [SL:DATE_TIME 9 am ] ]")] * 20
        + [(alarm, ALARM_PARSE)] * 60
    )
    classes = [validate_filler_output(output, instance).cls for instance, output in outputs]
    assert classes.count(VerdictClass.MALFORMED) == 5
    assert classes.count(VerdictClass.SIGNATURE_MISMATCH) == 10
    assert classes.count(VerdictClass.HALLUCINATION) == 20
    assert classes.count(VerdictClass.OK) == 65


def test_echo_filler(alarm_example):
    instance = build_filler_train(alarm_example)
    assert fill(instance, EchoFiller()) == "[IN:CREATE_ALARM [SL:DATE_TIME ] ]"


def test_projection_filler_reproduces_targets(alarm_example, dentist_example, message_example):
    examples = [alarm_example, dentist_example, message_example]
    filler = ProjectionFiller({e.id: e for e in examples})
    instances = [build_filler_train(e) for e in examples]
    assert fill_all(instances, filler, batch_size=2) == [i.target for i in instances]


def test_projection_filler_on_translation(elvis_example, elvis_translation, elvis_model):
    instance = build_filler_infer(elvis_translation, elvis_example)
    filler = ProjectionFiller({elvis_example.id: elvis_example}, elvis_model)
    assert fill(instance, filler) == "[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME à Elvis ] ]"
    with pytest.raises(FillerUnavailableError):
        fill(instance, ProjectionFiller({elvis_example.id: elvis_example}))
    with pytest.raises(FillerUnavailableError):
        fill(instance, ProjectionFiller({}))


def test_replay_filler(tmp_path, alarm_example, dentist_example):
    instances = [build_filler_train(alarm_example), build_filler_train(dentist_example)]
    write_outputs(instances[:1], ["[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]"], tmp_path / "out.jsonl")
    filler = ReplayFiller(tmp_path / "out.jsonl")
    assert fill(instances[0], filler) == ALARM_PARSE
    moved = FillerInstance(instances[0].input, example_id="other", language="de")
    assert fill(moved, filler) == ALARM_PARSE
    with pytest.raises(FillerUnavailableError):
        fill_all(instances, filler)


def test_fill_wraps_backend_errors(alarm_example):
    class Broken(Filler):
        name = "broken"

        def fill_batch(self, instances):
            raise ValueError("model crashed")

    class Short(Filler):
        name = "short"

        def fill_batch(self, instances):
            return []

    instance = build_filler_train(alarm_example)
    with pytest.raises(FillerUnavailableError, match="model crashed"):
        fill(instance, Broken())
    with pytest.raises(FillerUnavailableError):
        fill_all([instance], Short())
    assert fill_all([instance], Broken()) == [FAILED_OUTPUT]


def test_assemble_keeps_filler_slot_order(message_example):
    translation = Utterance("schreib Mama hallo", ("schreib", "Mama", "hallo"), "de")
    instance = build_filler_infer(translation, message_example)
    output = "[IN:SEND_MESSAGE [SL:CONTENT hallo ] [SL:RECIPIENT Mama ] ]"
    verdict = validate_filler_output(output, instance)
    report = AssemblyReport()
    silver = assemble_silver(translation, output, verdict, "keep-all-parseable", message_example, report)
    assert silver.id == "msg-1@de"
    assert silver.provenance is Provenance.SILVER_TAF
    assert silver.utterance.tokens == ("schreib", "Mama", "hallo")
    assert serialize(silver.parse) == output
    assert report.emitted == 1


def test_assemble_policies(alarm_example, weckruf):
    instance = build_filler_infer(weckruf, alarm_example)
    report = AssemblyReport()
    cases = [
        ("[IN:CREATE_ALARM [SL:DATE_TIME 8", AssemblyPolicy.KEEP_ALL_PARSEABLE),
        ("[IN:CREATE_ALARM [SL:DATE_TIME 8", AssemblyPolicy.STRICT),
        ("[IN:CREATE_ALARM [SL:DATE_TIME 9 am ] ]", AssemblyPolicy.KEEP_ALL_PARSEABLE),
        ("[IN:CREATE_ALARM [SL:DATE_TIME 9 am ] ]", AssemblyPolicy.STRICT),
        ("[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]", AssemblyPolicy.STRICT),
        ("[IN:CREATE_ALARM [SL:DATE_TIME ] ]", AssemblyPolicy.KEEP_ALL_PARSEABLE),
    ]
    kept = []
    for output, policy in cases:
        verdict = validate_filler_output(output, instance)
        silver = assemble_silver(weckruf, output, verdict, policy, alarm_example, report)
        kept.append(silver is not None)
    assert kept == [False, False, True, False, True, False]
    assert report.emitted == 2
    assert report.dropped == {DropReason.MALFORMED: 2, DropReason.STRICT_POLICY: 1, DropReason.EMPTY_SLOT: 1}
    assert report.to_record()["total"] == 6
    assert list(report.to_frame()["count"]) == [2, 2, 1, 1]


def test_assemble_can_keep_empty_slots(alarm_example, weckruf):
    instance = build_filler_infer(weckruf, alarm_example)
    output = fill(instance, EchoFiller())
    verdict = validate_filler_output(output, instance)
    assert verdict.ok
    silver = assemble_silver(weckruf, output, verdict, "strict", alarm_example, drop_empty_slots=False)
    assert serialize(silver.parse) == "[IN:CREATE_ALARM [SL:DATE_TIME ] ]"


def test_fill_all_records_per_instance_failures(alarm_example):
    unanchored = Example("alarm-2", Utterance("set an alarm", ("set", "an", "alarm"), "en"), parse(ALARM_PARSE))
    instances = [build_filler_train(alarm_example), build_filler_train(unanchored), build_filler_train(alarm_example)]
    filler = ProjectionFiller({e.id: e for e in (alarm_example, unanchored)})
    outputs = fill_all(instances, filler, batch_size=2)
    assert outputs == [ALARM_PARSE, FAILED_OUTPUT, ALARM_PARSE]
    verdict = validate_filler_output(outputs[1], instances[1])
    assert verdict.cls is VerdictClass.MALFORMED
    report = AssemblyReport()
    assert assemble_silver(unanchored.utterance, outputs[1], verdict, "keep-all-parseable", unanchored, report) is None
    assert report.dropped == {DropReason.MALFORMED: 1}


def _utterance_covering(rng, tree):
    words = ["please"]
    for slot in leaf_slots(tree):
        words.extend(slot.tokens)
        if rng.random() < 0.5:
            words.append("now")
    return " ".join(words)


def test_training_targets_pass_their_own_checks():
    rng = np.random.default_rng(21)
    examples = []
    for n in range(500):
        tree = random_tree(rng, max_depth=3, fanout=3)
        text = _utterance_covering(rng, tree)
        examples.append(Example(f"gen-{n}", Utterance(text, tuple(text.split())), tree))
    assert any(slot.intent is not None for e in examples for slot in e.parse.root.slots)
    instances = [build_filler_train(example) for example in examples]
    for instance in instances:
        verdict = validate_filler_output(instance.target, instance)
        assert verdict.ok, (instance.input, verdict.details)
        assert verdict.tree == target_tree(instance)
