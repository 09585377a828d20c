"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or
``python3 tests/test_acceptance.py``.
"""

import itertools
import subprocess
import sys
import time

import pytest

from ksep.compression import check_exhaustive, check_sampled, replay_induction
from ksep.core import Params, binomial, count_k_separated, enumerate_k_separated
from ksep.family import is_intersecting, star
from ksep.search import brute_force_max, ekr_grid, max_intersecting, bound_grid, verify_bound_sweep

pytestmark = pytest.mark.slow


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, detail


@pytest.fixture(scope="module")
def bound_sweep():
    start = time.perf_counter()
    sweep = verify_bound_sweep(bound_grid(range(1, 5), range(2, 6), 14))
    return sweep, time.perf_counter() - start


def test_criterion_1_bound_sweep(capsys, bound_sweep):
    sweep, elapsed = bound_sweep
    bad = [
        r.params
        for r in sweep.rows
        if r.optimum != binomial(r.params.n - r.params.k * r.params.r - 1, r.params.r - 1)
    ]
    expected = [
        Params(n, k, r) for k in range(1, 5) for r in range(2, 6) for n in range((k + 1) * r, 15)
    ]
    ok = not bad and not sweep.errors and [r.params for r in sweep.rows] == expected and elapsed < 300
    report(capsys, 1, ok, f"{len(sweep.rows)} instances, {len(bad)} mismatches, {elapsed:.1f}s")


def test_criterion_2_ekr_sweep(capsys):
    grid = ekr_grid(range(1, 6), 12)
    sweep = verify_bound_sweep(grid)
    bad = [r.params for r in sweep.rows if r.optimum != binomial(r.params.n - 1, r.params.r - 1)]
    ok = not bad and not sweep.errors and len(sweep.rows) == len(grid) == 35
    report(capsys, 2, ok, f"{len(sweep.rows)} instances, {len(bad)} mismatches")


def test_criterion_3_degenerate_bases(capsys):
    problems = []
    checked = 0
    for k in range(1, 5):
        for r in range(2, 6):
            n = (k + 1) * r
            if n > 20:
                continue
            p = Params(n, k, r)
            sets = enumerate_k_separated(p)
            disjoint = all(not a.mask & b.mask for a, b in itertools.combinations(sets, 2))
            optimum = max_intersecting(p).optimum
            if len(sets) != k + 1 or not disjoint or optimum != 1:
                problems.append(p)
            checked += 1
    report(capsys, 3, not problems and checked == 15, f"{checked} tight instances, problems: {problems}")


def exhaustive_grid():
    grid = []
    for n in range(1, 65):
        for k in range(1, 4):
            for r in range(2, n + 1):
                if n >= (k + 1) * r + 1 and 1 <= count_k_separated(Params(n, k, r)) <= 24:
                    grid.append(Params(n, k, r))
    return grid


def test_criterion_4_proof_invariants(capsys):
    failures = []
    families = 0
    grid_a = exhaustive_grid()
    for p in grid_a:
        s = check_exhaustive(p)
        families += s.families
        if not s.passed:
            failures.append((p, s.failures[:3]))
    grid_b = [Params(n, k, r) for k in range(1, 4) for r in range(2, 6) for n in range((k + 1) * r + 1, 15)]
    samples = 0
    for p in grid_b:
        s = check_sampled(p, samples=1000, seed=0)
        samples += s.families
        if not s.passed or s.families < 1000:
            failures.append((p, s.failures[:3]))
    detail = (
        f"(a) {len(grid_a)} instances / {families} families exhaustively, "
        f"(b) {len(grid_b)} grid points / {samples} samples, {len(failures)} failures"
    )
    report(capsys, 4, not failures, detail)


def test_criterion_5_oracle_equivalence(capsys):
    mismatches = []
    checked = 0
    for n in range(1, 65):
        for k in range(0, n + 1):
            for r in range(1, n + 1):
                p = Params(n, k, r)
                if not 1 <= count_k_separated(p) <= 24:
                    continue
                if max_intersecting(p).optimum != brute_force_max(p):
                    mismatches.append(p)
                checked += 1
    report(capsys, 5, not mismatches and checked > 0, f"{checked} instances, {len(mismatches)} mismatches")


def test_criterion_6_structural_counts(capsys):
    bad_counts = []
    bad_stars = []
    for k in range(0, 5):
        for r in range(1, 6):
            for n in range(1, 41):
                p = Params(n, k, r)
                if n <= 20 and count_k_separated(p) != len(enumerate_k_separated(p)):
                    bad_counts.append(p)
                if p.nonempty:
                    want = binomial(n - k * r - 1, r - 1)
                    if any(len(star(p, x)) != want for x in range(1, n + 1)):
                        bad_stars.append(p)
    ok = not bad_counts and not bad_stars
    report(capsys, 6, ok, f"count mismatches {bad_counts}, star mismatches {bad_stars}")


def test_criterion_7_induction_replay(capsys, bound_sweep):
    sweep, _ = bound_sweep
    failures = []
    trees = 0
    for res in sweep.rows:
        p = res.params
        want = binomial(p.n - p.k * p.r - 1, p.r - 1)
        candidates = [star(p, x) for x in range(1, p.n + 1)] + [res.witness]
        for fam in candidates:
            if not is_intersecting(fam):
                failures.append((p, "witness not intersecting"))
                continue
            cert = replay_induction(fam)
            trees += 1
            if not cert.certified or cert.bound != want:
                failures.append((p, cert.to_dict()))
    report(capsys, 7, not failures and trees > 0, f"{trees} certificate trees, {len(failures)} failures")


CLI_RUNS = [
    ["enumerate", "--n", "11", "--k", "2", "--r", "3", "--format", "json"],
    ["count", "--n-min", "5", "--n-max", "20", "--k", "1", "--r", "3", "--check", "--format", "csv"],
    ["star", "--n", "12", "--k", "1", "--r", "3", "--x", "5"],
    ["max", "--n", "12", "--k", "1", "--r", "3", "--witness", "--format", "json"],
    ["max", "--n", "8", "--k", "1", "--r", "2", "--method", "bruteforce"],
    ["verify-bound", "--n-max", "11", "--k-max", "2", "--r-max", "3", "--include-ekr", "--ekr-n-max", "9"],
    ["verify-bound"],
    ["check-proof", "--n", "10", "--k", "1", "--r", "3", "--samples", "1000", "--seed", "7"],
    ["check-proof", "--n", "8", "--k", "1", "--r", "2", "--exhaustive", "--format", "json"],
]


def test_criterion_8_determinism(capsys, tmp_path):
    family_file = tmp_path / "family.json"
    family_file.write_text(star(Params(11, 2, 3), 4).to_json())
    runs = CLI_RUNS + [["compress", "--input", str(family_file), "--members"], ["replay", "--input", str(family_file)]]
    differing = []
    for argv in runs:
        outputs = [
            subprocess.run([sys.executable, "-m", "ksep", *argv], capture_output=True, check=False)
            for _ in range(2)
        ]
        a, b = outputs
        if a.stdout != b.stdout or a.returncode != b.returncode or a.returncode != 0 or not a.stdout:
            differing.append(argv[0])
    report(capsys, 8, not differing, f"{len(runs)} invocations run twice, differing: {differing}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-s", "-q"]))
