import pytest

from taf_system.filling import ErrorReport, FillerVerdict, VerdictClass, error_report

OK = FillerVerdict(VerdictClass.OK)
HALLUCINATION = FillerVerdict(VerdictClass.HALLUCINATION, ("X=y",))
MALFORMED = FillerVerdict(VerdictClass.MALFORMED, ("unbalanced",))
MISMATCH = FillerVerdict(VerdictClass.SIGNATURE_MISMATCH, ("-X",))


def test_single_language_render():
    verdicts = [("de", HALLUCINATION)] * 3 + [("de", OK)] * 97
    report = error_report(verdicts)
    assert report.errors("filler", "de") == 3
    assert report.percentage("filler", "de") == pytest.approx(3.0)
    lines = report.render().splitlines()
    assert lines[0] == "language\tfiller"
    assert lines[1] == "de\t3 (3.00%)"
    assert lines[2] == "Total\t3 (3.00%)"
    assert lines[3].startswith("# filler: malformed 0 (0.0%), signature_mismatch 0 (0.0%), hallucination 3 (100.0%)")


def test_class_breakdown_and_totals():
    verdicts = (
        [("de", MALFORMED)] * 5 + [("de", MISMATCH)] * 10 + [("fr", HALLUCINATION)] * 20
        + [("de", OK)] * 35 + [("fr", OK)] * 30
    )
    report = error_report(verdicts)
    assert report.total("filler") == 100
    assert report.errors("filler") == 35
    breakdown = report.class_breakdown()
    assert breakdown["malformed"][0] == 5
    assert breakdown["signature_mismatch"][1] == pytest.approx(100.0 * 10 / 35)
    assert report.percentage("filler", "fr") == pytest.approx(40.0)
    record = report.to_record()["filler"]
    assert record["languages"]["de"] == {"errors": 15, "total": 50, "percent": 30.0}
    assert record["classes"] == {"malformed": 5, "signature_mismatch": 10, "hallucination": 20}


def test_two_systems_side_by_side():
    report = ErrorReport(["base", "large"])
    for n in range(10):
        report.add("th", HALLUCINATION if n < 4 else OK, "base")
        report.add("th", HALLUCINATION if n < 1 else OK, "large")
    frame = report.to_frame()
    assert list(frame.index) == ["th", "Total"]
    assert frame.loc["th", "base %"] == 40.0
    assert frame.loc["th", "large count"] == 1
    assert report.render().splitlines()[1] == "th\t4 (40.00%)\t1 (10.00%)"


def test_empty_report():
    report = ErrorReport()
    assert report.percentage("filler") == 0.0
    assert report.languages == []
    assert report.render().splitlines()[1] == "Total\t0 (0.00%)"
