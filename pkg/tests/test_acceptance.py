"""Acceptance criteria, one test each, at their stated tolerances.

Run as a script (``python tests/test_acceptance.py``) to print one PASS/FAIL
line per criterion. Under pytest the same lines appear in the terminal summary.

C08 and C09 are known failures: the thresholds cannot be met by the model as
specified (analysis in README, "Known deviations"). They are marked as strict
expected failures so that the suite stays honest in both directions: a
silent fix would turn them into XPASS errors.
"""

import pytest

from synthdim.scenarios import CRITERIA, run_criterion

RESULTS = {}

KNOWN_FAILURES = {
    "C08": "between-region mass for the N=2 spans stays near 0.62, below the 0.8 threshold",
    "C09": "between-region mass just before switch-off is 0.72, below the 0.8 threshold",
}


def _params():
    for cid, title, _ in CRITERIA:
        marks = []
        if cid in KNOWN_FAILURES:
            marks.append(pytest.mark.xfail(reason=KNOWN_FAILURES[cid], strict=True))
        yield pytest.param(cid, title, id=cid, marks=marks)


def line(c) -> str:
    return f"{c.id} {'PASS' if c.passed else 'FAIL'} {c.title} :: {c.measured}"


@pytest.mark.parametrize("cid,title", list(_params()))
def test_criterion(cid, title):
    c = run_criterion(cid)
    RESULTS[cid] = line(c)
    print(RESULTS[cid])
    assert c.passed, RESULTS[cid]


if __name__ == "__main__":
    ok = True
    for cid, _, _ in CRITERIA:
        c = run_criterion(cid)
        ok &= c.passed
        print(line(c), flush=True)
    raise SystemExit(0 if ok else 1)
