"""The ten acceptance criteria, one test each.

Each result line is printed as it finishes and collected for the summary
printed at the end of the pytest run (see conftest.py).
"""

import pytest

from fcw.suites import CORE, _run

RESULTS = []


@pytest.mark.parametrize("label, fn", CORE, ids=[label for label, _ in CORE])
def test_criterion(label, fn):
    r = _run(label, fn)
    RESULTS.append(r)
    print(r.line())
    assert r.passed, r.detail
