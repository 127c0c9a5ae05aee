"""Acceptance criteria 1-10, one test each.

Criteria 4-7 and 10 share one Monte Carlo run (n = 3e4, theta = 0.25,
R = 500, k_max = 4), launched twice through the CLI; expect ~10 minutes on
one core. Each test records a PASS/FAIL line printed at the end of the
pytest session.
"""
import json
import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from unicellular import cli
from unicellular import theory as th
from unicellular.cperm import enumerate_cperms, sample_cperm
from unicellular.cycle_census import (
    brute_force_cycle_count,
    count_short_cycles,
    enumerate_short_cycles,
    validate_cycle_decomposition,
)
from unicellular.decorated_map import MultiGraph, underlying_graph
from unicellular.harness import replicate_rng, sample_decorated_tree
from unicellular.plane_tree import count_paths, enumerate_plane_trees, sample_plane_tree

pytestmark = pytest.mark.acceptance

RUN_ARGS = ["experiment", "--n", "30000", "--theta", "0.25", "--replicates", "500", "--kmax", "4", "--seed", "42"]


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    """The criterion-4 command, executed twice with the same seed."""
    out = []
    for i in range(2):
        path = tmp_path_factory.mktemp(f"run{i}") / "report.json"
        code = cli.main(RUN_ARGS + ["--out", str(path)])
        out.append((code, path.read_text()))
    return out


@pytest.fixture(scope="module")
def report(runs):
    return json.loads(runs[0][1])


def test_criterion_1_theory_identities(record_criterion):
    thetas = np.linspace(0.0049, 0.49, 100)
    resid = max(abs(th.psi(th.solve_tau(x)) - 1 / (1 - 2 * x)) for x in thetas)
    tau = th.solve_tau(0.25)
    lam = th.lambdas(tau, 40)
    lam1 = abs(lam[0] - 2 * th.gamma_of_tau(tau))
    pi_sum = abs(math.fsum(th.pi_vector(tau)) - 1)
    kappa_sum = abs(math.fsum(th.kappa_vector(tau)) - 1)
    closed = np.array([th.kappa_k(k, tau) for k in range(1, 21)])
    comp = float(np.max(np.abs(th.kappa_by_composition(tau)[:20] - closed)))
    systole_mass = math.fsum(th.systole_pmf(ell, lam) for ell in range(1, 41))
    ok = resid <= 1e-12 and lam1 <= 1e-12 and pi_sum <= 1e-10 and kappa_sum <= 1e-10 and comp <= 1e-10
    ok = ok and systole_mass >= 1 - 1e-6
    detail = (
        f"psi residual {resid:.3e}, |lambda1-2gamma| {lam1:.3e}, |sum pi-1| {pi_sum:.3e}, "
        f"|sum kappa-1| {kappa_sum:.3e}, composition {comp:.3e}, systole mass(<=40) {systole_mass:.15f}"
    )
    record_criterion(1, ok, detail)
    assert ok, detail


def test_criterion_2_sampler_exactness(record_criterion):
    draws = 100_000
    pvalues = {}
    for n, m in [(3, 1), (5, 3), (7, 3), (7, 5)]:
        perms = enumerate_cperms(n, m)
        rng = np.random.default_rng(1000 * n + m)
        counts = Counter(sample_cperm(n, m, rng).cycles for _ in range(draws))
        obs = [counts[s.cycles] for s in perms]
        assert sum(obs) == draws
        pvalues[f"cperm({n},{m})[{len(perms)}]"] = sps.chisquare(obs).pvalue
    for n in range(2, 5):
        trees = enumerate_plane_trees(n)
        rng = np.random.default_rng(n)
        counts = Counter(sample_plane_tree(n, rng).key() for _ in range(draws))
        obs = [counts[t.key()] for t in trees]
        assert sum(obs) == draws
        pvalues[f"tree({n})[{len(trees)}]"] = sps.chisquare(obs).pvalue
    tree1 = {sample_plane_tree(1, np.random.default_rng(s)).key() for s in range(100)}
    sizes_ok = len(enumerate_cperms(5, 3)) == 20 and len(enumerate_cperms(7, 3)) == 784 and len(tree1) == 1
    ok = sizes_ok and all(p > 1e-3 for p in pvalues.values())
    detail = "chi-square p: " + ", ".join(f"{k} {v:.4f}" for k, v in pvalues.items())
    record_criterion(2, ok, detail)
    assert ok, detail


def test_criterion_3_census_oracle(record_criterion):
    rng = np.random.default_rng(31)
    mismatches = 0
    for _ in range(1000):
        v = int(rng.integers(1, 9))
        g = MultiGraph(v, rng.integers(0, v, size=(int(rng.integers(0, 13)), 2)))
        mismatches += count_short_cycles(g, 6) != brute_force_cycle_count(g, 6)
    detail = f"{mismatches} mismatches over 1000 graphs, k <= 6"
    record_criterion(3, mismatches == 0, detail)
    assert mismatches == 0, detail


def test_criterion_4_poisson_counts(report, record_criterion):
    checks = report["checks"]
    parts = []
    for fit in report["aggregates"]["cycles"]:
        k = fit["k"]
        parts.append(
            f"k={k}: mean {fit['mean']:.4f} vs {fit['lam']:.4f} (z {fit['z_score']:+.2f}), "
            f"disp {fit['dispersion']:.3f}, TV {fit['tv_distance']:.3f}"
        )
    parts.append(f"corr(C1,C2) {report['aggregates']['corr_c1_c2']:+.4f}")
    names = [f"cycles_{k}_{s}" for k in range(1, 5) for s in ("mean", "dispersion", "tv")] + ["corr_c1_c2"]
    failed = [n for n in names if not checks[n]]
    detail = "; ".join(parts) + (f"; failed: {', '.join(failed)}" if failed else "")
    record_criterion(4, not failed, detail)
    assert not failed, detail


def test_criterion_5_systole(report, record_criterion):
    s = report["aggregates"]["systole"]
    detail = f"TV {s['tv_distance']:.4f} (empirical {s['empirical']}, theory tail {s['theory']['tail']:.3e})"
    ok = report["checks"]["systole_tv"] and s["tv_distance"] <= 0.05
    record_criterion(5, ok, detail)
    assert ok, detail


def test_criterion_6_degrees(report, record_criterion):
    d = report["aggregates"]["degrees"]
    dev = max(abs(a - b) for a, b in zip(d["mean_fraction"][:8], d["kappa"][:8]))
    ok = dev <= 0.02
    detail = f"max_(k<=8) |N_k/m - kappa_k| = {dev:.5f}"
    record_criterion(6, ok, detail)
    assert ok, detail


def test_criterion_7_pairs(report, record_criterion):
    p = report["aggregates"]["pairs"]
    bound_violations = sum(
        row["pair_count"] < report["config"]["n"] + 1 - report["config"]["m"] for row in report["per_replicate"]
    )
    ok = p["rel_error"] <= 0.02 and bound_violations == 0
    detail = f"mean M/(n+1) {p['mean_ratio']:.6f} vs gamma {p['gamma']:.6f} (rel {p['rel_error']:.2e}); bound violations {bound_violations}"
    record_criterion(7, ok, detail)
    assert ok, detail


def test_criterion_8_tree_paths(record_criterion):
    worst = 0.0
    for seed in range(5):
        t = sample_plane_tree(100_000, np.random.default_rng(seed))
        for ell in range(1, 6):
            worst = max(worst, abs(count_paths(t, ell) / t.n - 2 * ell) / (2 * ell))
    ok = worst <= 0.05
    detail = f"max relative deviation of count_paths/n from 2*ell: {worst:.4f}"
    record_criterion(8, ok, detail)
    assert ok, detail


def test_criterion_9_decomposition(record_criterion):
    total = failures = 0
    for i in range(100):
        d = sample_decorated_tree(2000, 500, replicate_rng(9, i))
        census, cycles = enumerate_short_cycles(underlying_graph(d), 5)
        assert len(cycles) == sum(census.counts)
        total += len(cycles)
        failures += sum(not validate_cycle_decomposition(d, vs, es) for vs, es in cycles)
    ok = failures == 0 and total > 0
    detail = f"{failures} failures over {total} cycles (k <= 5) on 100 maps, n = 2000"
    record_criterion(9, ok, detail)
    assert ok, detail


def test_criterion_10_determinism(runs, record_criterion):
    bodies = []
    for code, text in runs:
        body = json.loads(text)
        body.pop("generated_at")
        bodies.append(json.dumps(body, indent=1))
    codes = [code for code, _ in runs]
    ok = bodies[0] == bodies[1] and codes == [0, 0]
    detail = f"exit codes {codes}, report bodies identical: {bodies[0] == bodies[1]}"
    record_criterion(10, ok, detail)
    assert ok, detail
