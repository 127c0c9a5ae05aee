"""Quick oracle-equivalence and identity suites behind ``unicellular selftest``."""
from __future__ import annotations

import math
from collections import Counter

import numpy as np
from scipy import stats as sps

from .cperm import enumerate_cperms, sample_cperm
from .cycle_census import brute_force_cycle_count, count_short_cycles, enumerate_short_cycles, validate_cycle_decomposition
from .decorated_map import MultiGraph, underlying_graph
from .harness import replicate_rng, sample_decorated_tree
from .plane_tree import enumerate_plane_trees, sample_plane_tree
from . import theory as th


def _theory_identities():
    thetas = np.linspace(0.0049, 0.49, 100)
    worst = max(abs(th.psi(th.solve_tau(x)) - 1 / (1 - 2 * x)) for x in thetas)
    tau = th.solve_tau(0.25)
    lam = th.lambdas(tau, 40)
    comp = th.kappa_by_composition(tau)[:20]
    closed = np.array([th.kappa_k(k, tau) for k in range(1, 21)])
    ok = (
        worst <= 1e-12
        and abs(lam[0] - 2 * th.gamma_of_tau(tau)) <= 1e-12
        and abs(math.fsum(th.pi_vector(tau)) - 1) <= 1e-10
        and abs(math.fsum(th.kappa_vector(tau)) - 1) <= 1e-10
        and np.max(np.abs(comp - closed)) <= 1e-10
        and math.fsum(th.systole_pmf(ell, lam) for ell in range(1, 41)) >= 1 - 1e-6
    )
    return ok, f"max psi residual {worst:.3e}"


def _census_oracle(graphs=300):
    rng = np.random.default_rng(0)
    bad = 0
    for _ in range(graphs):
        v = int(rng.integers(1, 9))
        g = MultiGraph(v, rng.integers(0, v, size=(int(rng.integers(0, 13)), 2)))
        bad += count_short_cycles(g, 6) != brute_force_cycle_count(g, 6)
    return bad == 0, f"{bad} mismatches over {graphs} graphs"


def _cperm_uniform(draws=20_000):
    rng = np.random.default_rng(1)
    perms = enumerate_cperms(5, 3)
    counts = Counter(sample_cperm(5, 3, rng).cycles for _ in range(draws))
    p = sps.chisquare([counts[s.cycles] for s in perms]).pvalue
    return len(perms) == 20 and p > 1e-3, f"|S^C_5,3| = {len(perms)}, chi-square p = {p:.4f}"


def _tree_uniform(draws=20_000):
    rng = np.random.default_rng(2)
    trees = enumerate_plane_trees(4)
    counts = Counter(sample_plane_tree(4, rng).key() for _ in range(draws))
    p = sps.chisquare([counts[t.key()] for t in trees]).pvalue
    return len(trees) == 14 and p > 1e-3, f"{len(trees)} trees with 4 edges, chi-square p = {p:.4f}"


def _decomposition(maps=5):
    bad = total = 0
    for i in range(maps):
        d = sample_decorated_tree(500, 125, replicate_rng(3, i))
        _, cycles = enumerate_short_cycles(underlying_graph(d), 4)
        total += len(cycles)
        bad += sum(not validate_cycle_decomposition(d, vs, es) for vs, es in cycles)
    return bad == 0, f"{bad} failures over {total} cycles"


SUITES = {
    "theory_identities": _theory_identities,
    "census_vs_brute_force": _census_oracle,
    "cperm_uniformity": _cperm_uniform,
    "tree_uniformity": _tree_uniform,
    "cycle_decomposition": _decomposition,
}


def run_selftest() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in SUITES.items():
        ok, detail = fn()
        out.append((name, bool(ok), detail))
    return out
