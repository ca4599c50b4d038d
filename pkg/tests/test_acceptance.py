"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

The fig1 reproduction runs the full experiment twice with the direct-solve
checker, which dominates the runtime of this module.
"""

import csv
import time

import numpy as np
import pytest

from modcs import cli
from modcs import lp as _lp
from modcs.experiments import FIT_TOL, M_GRID, MC_EXACT_TOL, ORDER_SLACK, SPREAD_TOL, _mc_seed, gen_uniform_matrix
from modcs.numkit import IndexSet, SeededStream
from modcs.probability import (
    Scenario,
    exact_probability,
    hoeffding_halfwidth,
    mc_probability,
    mc_verdicts,
    quad_space_size,
)
from modcs.snc import SncInstance, build_subset_lp, check_by_solving, check_snc, subset_max
from oracles import random_case, unique_optimal_vertex_is

SEED = 42


@pytest.fixture(scope="module")
def fig1_runs(tmp_path_factory):
    dirs = []
    for name in ("first", "second"):
        out = tmp_path_factory.mktemp(f"fig1_{name}")
        t0 = time.perf_counter()
        code = cli.main(["experiment", "fig1", "--seed", str(SEED), "--out-dir", str(out)])
        dirs.append((out, code, time.perf_counter() - t0))
    return dirs


def fig1_table(out_dir):
    with open(out_dir / "fig1.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {(int(r["ell"]), int(r["p1"])): (float(r["theoretical"]), float(r["empirical"]))
            for r in rows}


def test_criterion_1_fig1_fit(fig1_runs, criterion):
    out, code, seconds = fig1_runs[0]
    table = fig1_table(out)
    grid = {(ell, p1) for ell in range(2, 8) for p1 in range(3)}
    gaps = {key: abs(t - e) for key, (t, e) in table.items()}
    worst = max(gaps, key=gaps.get)
    ok = set(table) == grid and all(g <= FIT_TOL for g in gaps.values())
    assert criterion(1, "fig1 theory vs empirical", ok,
                     f"{len(table)}/18 points, max gap {gaps[worst]:.4f} at ell,p1={worst}, "
                     f"tol {FIT_TOL}, run {seconds:.0f}s, exit {code}")


def test_criterion_2_fig1_ordering(fig1_runs, criterion):
    table = fig1_table(fig1_runs[0][0])
    bad = []
    for ell in range(2, 8):
        p0, p1, p2 = (table[(ell, k)][0] for k in range(3))
        if not (p0 >= p1 - ORDER_SLACK >= p2 - 2 * ORDER_SLACK):
            bad.append(ell)
    assert criterion(2, "fig1 ordering over error levels", not bad,
                     f"violations at ell={bad}" if bad else "all 6 ell values ordered")


def test_criterion_3_quad_space_counts(criterion):
    small = quad_space_size(Scenario(9, 4, 2, 1))
    big = quad_space_size(Scenario(128, 20, 8, 3))
    ok = small == 20160 and f"{big:.2e}" == "1.24e+37"
    assert criterion(3, "quad-space counts", ok, f"{small}, {big:.3e}")


def test_criterion_4_mc_convergence(criterion):
    s = Scenario(9, 4, 2, 1)
    A = gen_uniform_matrix(7, 9, -0.5, 0.5, SeededStream(SEED).child(10, 0))
    seed = _mc_seed(SEED, 0)
    t0 = time.perf_counter()
    exact = exact_probability(A, s).value
    # estimates at every M share one draw sequence, so one pass covers the grid
    verdicts = mc_verdicts(A, s, max(M_GRID), seed)
    estimates = {M: float(verdicts[:M].mean()) for M in M_GRID}
    assert mc_probability(A, s, 100, seed).value == estimates[100]
    seconds = time.perf_counter() - t0
    err = abs(estimates[10000] - exact)
    spread = max(estimates.values()) - min(estimates.values())
    ok = err <= MC_EXACT_TOL and spread <= SPREAD_TOL
    assert criterion(4, "Monte Carlo convergence (7x9)", ok,
                     f"exact {exact:.4f}, M=10000 estimate {estimates[10000]:.4f}, "
                     f"error {err:.4f} (tol {MC_EXACT_TOL}, Hoeffding {hoeffding_halfwidth(10000):.4f}), "
                     f"spread {spread:.4f} (tol {SPREAD_TOL}), {seconds:.0f}s")


def test_criterion_5_oracle_equivalence(criterion):
    rng = np.random.default_rng(500)
    agree, positives, disagreements = 0, 0, []
    for trial in range(500):
        A, T, x = random_case(rng, max_m=7, max_n=9, max_delta=5)
        verdict = check_snc(SncInstance.from_signal(A, T, x)).recoverable
        truth = unique_optimal_vertex_is(A, T, x)
        positives += truth
        if verdict == truth:
            agree += 1
        else:
            disagreements.append(trial)
    assert criterion(5, "certificate vs vertex oracle", agree == 500,
                     f"{agree}/500 agree, {positives} recoverable, disagreements {disagreements[:5]}")


def _pinned_value(inst, I, k):
    lp = build_subset_lp(inst, I)
    pin = np.zeros(lp.num_vars)
    pin[inst.delta.members.index(k)] = 1.0
    sol = _lp.solve(lp.with_equality(pin, 0.0))
    return 0.0 if sol.status is _lp.LpStatus.INFEASIBLE else -sol.value


def test_criterion_6_relaxation_exactness(criterion):
    rng = np.random.default_rng(600)
    agree, total, worst = 0, 0, 0.0
    while total < 200:
        A, T, x = random_case(rng)
        inst = SncInstance.from_signal(A, T, x)
        if len(inst.delta) == 0:
            continue
        members = inst.delta.members
        size = int(rng.integers(1, len(members) + 1))
        I = IndexSet.of(A.shape[1], rng.choice(members, size, replace=False))
        k = int(rng.choice(I.members))
        smaller = I.difference(IndexSet(A.shape[1], (k,)))
        gap = abs(_pinned_value(inst, I, k) - subset_max(inst, smaller))
        worst = max(worst, gap)
        agree += gap <= 1e-8
        total += 1
    assert criterion(6, "pinned subset-I value equals subset-(I minus k) value", agree == total,
                     f"{agree}/{total} triples within 1e-8, largest gap {worst:.4f}")


def test_criterion_7_magnitude_invariance(criterion):
    rng = np.random.default_rng(700)
    kept, invariant = 0, 0
    while kept < 100:
        A, T, x = random_case(rng)
        inst = SncInstance.from_signal(A, T, x)
        report = check_snc(inst)
        if not report.recoverable or report.worst_margin <= 1e-3:
            continue
        known_true = IndexSet.of(A.shape[1], [k for k in T if x[k] != 0])
        size = len(known_true) + len(inst.delta)
        base = check_by_solving(A, T, inst.delta, inst.signs, known_true=known_true)
        mags = rng.uniform(0.1, 10.0, size)
        scaled = check_by_solving(A, T, inst.delta, inst.signs, magnitudes=mags,
                                  known_true=known_true)
        invariant += base and scaled
        kept += 1
    assert criterion(7, "magnitude invariance", invariant == 100, f"{invariant}/100 unchanged")


def test_criterion_8_fig1_determinism(fig1_runs, criterion):
    (a, code_a, _), (b, code_b, _) = fig1_runs
    same = (a / "fig1.csv").read_bytes() == (b / "fig1.csv").read_bytes()
    assert criterion(8, "fig1 byte-identical reruns", same,
                     f"exit codes {code_a}/{code_b}, {len((a / 'fig1.csv').read_bytes())} bytes")


def test_criterion_9_large_case_smoke(criterion):
    s = Scenario(128, 20, 8, 3)
    A = gen_uniform_matrix(52, 128, -0.5, 0.5, SeededStream(SEED).child(10, 1))
    t0 = time.perf_counter()
    est = mc_probability(A, s, 500, _mc_seed(SEED, 1), checker="solve")
    seconds = time.perf_counter() - t0
    ok = 0.0 <= est.value <= 1.0 and est.total_count == 500 and seconds <= 20 * 60
    assert criterion(9, "52x128 Monte Carlo at M=500", ok,
                     f"estimate {est.value:.4f}, {seconds:.0f}s (limit 1200s)")
