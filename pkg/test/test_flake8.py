from pathlib import Path

import pytest
from flake8.api import legacy as flake8

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.mark.flake8
@pytest.mark.linter
def test_flake8():
    style_guide = flake8.get_style_guide(
        max_line_length=120,
        extend_ignore=["E203", "E731", "W503", "W504"],
    )
    report = style_guide.check_files([str(REPO_ROOT / "taf_system"), str(REPO_ROOT / "test")])
    errors = report.get_statistics("")
    assert report.total_errors == 0, \
        'Found %d code style errors / warnings:\n' % report.total_errors + \
        '\n'.join(errors)
