"""Acceptance criteria 1-10, one verify suite each.

Run with ``pytest tests/test_acceptance.py -v`` or as a script
(``python tests/test_acceptance.py``); either way one PASS/FAIL line is printed
per criterion, followed by the individual checks of any failing suite.
"""

import sys

import pytest

from hadamard_kit.verify import run_suite

CRITERIA = [
    (1, "geometric-series oracle", "series-oracle"),
    (2, "dilogarithm identity", "dilog"),
    (3, "commutativity defect", "defect"),
    (4, "residue identity", "residue"),
    (5, "Pohlen equivalence and continuity at 0", "pohlen"),
    (6, "homology / certification", "homology"),
    (7, "shared cycle", "shared-cycle"),
    (8, "set calculus", "sets"),
    (9, "quadrature battery", "quadrature"),
    (10, "localized computation", "localized"),
]


def run_criterion(number, title, suite):
    (rep,) = run_suite(suite, seed=0)
    lines = [f"criterion {number:2d} {'PASS' if rep.ok else 'FAIL'}  {title} [{suite}, {rep.seconds:.1f}s]"]
    for c in rep.checks:
        if not c.ok:
            lines.append(f"    failed: {c.name}: {c.delta:.3g} >= {c.tol:.3g} {c.detail}".rstrip())
    return rep, lines


@pytest.mark.parametrize("number,title,suite", CRITERIA, ids=[s for _, _, s in CRITERIA])
def test_criterion(number, title, suite, capsys):
    rep, lines = run_criterion(number, title, suite)
    with capsys.disabled():
        print("\n" + "\n".join(lines))
    assert rep.checks, f"suite {suite} ran no checks"
    assert rep.ok, "\n".join(lines)


if __name__ == "__main__":
    ok = True
    for row in CRITERIA:
        rep, lines = run_criterion(*row)
        print("\n".join(lines), flush=True)
        ok &= rep.ok
    sys.exit(0 if ok else 1)
