"""End-to-end Monte Carlo experiments on random high-genus unicellular maps.

Each replicate samples a uniform plane tree and an independent uniform
C-permutation of its vertices, builds the underlying graph, and records
short-cycle counts, systole, vertex degrees and permutation statistics. The
aggregate section compares those against :mod:`unicellular.theory`.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import stats
from .cperm import cycle_length_histogram, pair_count, sample_cperm, solve_tilt
from .cycle_census import count_short_cycles
from .decorated_map import DecoratedTree, underlying_graph
from .plane_tree import sample_plane_tree
from .theory import build_theory, pi_k


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Thresholds:
    """Pass/fail limits for the aggregate checks."""

    z_max: float = 4.0
    dispersion_low: float = 0.8
    dispersion_high: float = 1.25
    tv_max: float = 0.1
    corr_max: float = 0.15
    systole_tv_max: float = 0.05
    degree_tol: float = 0.02
    degree_check_max: int = 8
    pair_rel_tol: float = 0.02


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    theta: float
    replicates: int = 1
    seed: int = 0
    k_max: int = 6
    degree_cutoff: int = 20
    genus: int | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if not 0.0 < self.theta < 0.5:
            raise ConfigError("theta must lie in (0, 1/2)")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.k_max < 1:
            raise ConfigError("k_max must be >= 1")
        if self.degree_cutoff < 1:
            raise ConfigError("degree_cutoff must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        g = self.g
        if not 1 <= g <= self.n // 2:
            raise ConfigError(f"genus g={g} infeasible for n={self.n}: need 1 <= g <= {self.n // 2}")

    @property
    def g(self) -> int:
        if self.genus is not None:
            return self.genus
        return math.floor(self.theta * self.n + 0.5)

    @property
    def m(self) -> int:
        return self.n + 1 - 2 * self.g

    def to_dict(self) -> dict:
        d = asdict(self)
        d["g"] = self.g
        d["m"] = self.m
        return d


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for replicate ``index``, fixed by (seed, index) alone."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_decorated_tree(n: int, g: int, rng: np.random.Generator) -> DecoratedTree:
    tree = sample_plane_tree(n, rng)
    perm = sample_cperm(n + 1, n + 1 - 2 * g, rng)
    return DecoratedTree(tree, perm)


def run_replicate(cfg: ExperimentConfig, index: int) -> dict:
    rng = replicate_rng(cfg.seed, index)
    d = sample_decorated_tree(cfg.n, cfg.g, rng)
    graph = underlying_graph(d)
    census = count_short_cycles(graph, cfg.k_max)
    degrees = graph.degrees()
    deg_counts = np.bincount(degrees, minlength=cfg.degree_cutoff + 1)
    hist = cycle_length_histogram(d.perm)
    n_elems = cfg.n + 1
    pairs = pair_count(d.perm)

    violations = []
    if hist.m != cfg.m:
        violations.append(f"sum N_k = {hist.m} != m = {cfg.m}")
    if hist.n != n_elems:
        violations.append(f"sum k N_k = {hist.n} != n+1 = {n_elems}")
    if pairs < n_elems - cfg.m:
        violations.append(f"M = {pairs} < n+1-m = {n_elems - cfg.m}")
    if graph.v_count != cfg.m:
        violations.append(f"v_count = {graph.v_count} != m = {cfg.m}")
    if graph.e_count != cfg.n:
        violations.append(f"e_count = {graph.e_count} != n = {cfg.n}")
    if int(degrees.sum()) != 2 * cfg.n:
        violations.append("handshake identity fails")

    return {
        "index": index,
        "cycle_counts": list(census.counts),
        "systole": census.systole,
        # degree_counts[k-1] = #vertices of degree k for k <= cutoff, then the tail
        "degree_counts": deg_counts[1: cfg.degree_cutoff + 1].tolist() + [int(deg_counts[cfg.degree_cutoff + 1:].sum())],
        "pair_count": pairs,
        "pair_ratio": pairs / n_elems,
        "cycle_lengths": {str(k): c for k, c in hist.counts.items()},
        "violations": violations,
    }


def _aggregate(cfg: ExperimentConfig, theory, rows: list[dict]) -> tuple[dict, dict]:
    th = cfg.thresholds
    r = len(rows)
    counts = np.array([row["cycle_counts"] for row in rows], dtype=np.int64)
    agg: dict = {"cycles": [], "replicates": r}
    checks: dict = {}

    for k in range(1, cfg.k_max + 1):
        fit = stats.compare_to_poisson(counts[:, k - 1], theory.lambdas[k - 1])
        agg["cycles"].append({"k": k, **fit.to_dict()})
        checks[f"cycles_{k}_mean"] = abs(fit.mean - fit.lam) <= th.z_max * math.sqrt(fit.lam / r)
        checks[f"cycles_{k}_dispersion"] = th.dispersion_low <= fit.dispersion <= th.dispersion_high
        checks[f"cycles_{k}_tv"] = fit.tv_distance <= th.tv_max
    if cfg.k_max >= 2:
        corr = stats.pearson_r(counts[:, 0], counts[:, 1])
        agg["corr_c1_c2"] = corr
        checks["corr_c1_c2"] = abs(corr) <= th.corr_max

    systoles = [row["systole"] for row in rows]
    emp = {str(ell): systoles.count(ell) / r for ell in range(1, cfg.k_max + 1)}
    emp["tail"] = sum(s is None for s in systoles) / r
    theo = {str(ell): p for ell, p in enumerate(theory.systole_pmf, start=1)}
    theo["tail"] = 1.0 - math.fsum(theory.systole_pmf)
    sys_cmp = stats.compare_pmf(emp, theo)
    agg["systole"] = {"empirical": emp, "theory": theo, **sys_cmp}
    checks["systole_tv"] = sys_cmp["tv_distance"] <= th.systole_tv_max

    deg = np.array([row["degree_counts"] for row in rows], dtype=np.float64) / cfg.m
    mean_frac = deg.mean(axis=0)
    kappas = [theory.kappas[k - 1] if k <= len(theory.kappas) else 0.0 for k in range(1, cfg.degree_cutoff + 1)]
    kmax_check = min(th.degree_check_max, cfg.degree_cutoff)
    dev = [abs(mean_frac[k - 1] - kappas[k - 1]) for k in range(1, kmax_check + 1)]
    agg["degrees"] = {
        "mean_fraction": mean_frac[:-1].tolist(),
        "tail_fraction": float(mean_frac[-1]),
        "kappa": kappas,
        "max_abs_dev": max(dev),
    }
    checks["degrees"] = max(dev) <= th.degree_tol

    ratios = np.array([row["pair_ratio"] for row in rows])
    slack = min(row["pair_count"] - (cfg.n + 1 - cfg.m) for row in rows)
    rel = abs(ratios.mean() - theory.gamma) / theory.gamma
    agg["pairs"] = {
        "mean_ratio": float(ratios.mean()),
        "gamma": theory.gamma,
        "rel_error": float(rel),
        "min_slack": int(slack),
    }
    checks["pairs_gamma"] = rel <= th.pair_rel_tol
    checks["pairs_bound"] = slack >= 0

    total_cycles = cfg.m * r
    lengths: dict[str, float] = {}
    for row in rows:
        for k, c in row["cycle_lengths"].items():
            lengths[k] = lengths.get(k, 0.0) + c / total_cycles
    top = max(9, max(int(k) for k in lengths))
    agg["cycle_lengths"] = {
        "empirical": {str(k): lengths.get(str(k), 0.0) for k in range(1, top + 1, 2)},
        # finite-size tilt: psi(t) = (n+1)/m rather than the limiting 1/alpha
        "pi": {str(k): pi_k(k, solve_tilt(cfg.n + 1, cfg.m)) for k in range(1, top + 1, 2)},
    }
    return agg, {k: bool(v) for k, v in checks.items()}


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> dict:
    """Run all replicates and compare them with the limit laws.

    The result depends only on ``cfg``: replicate i always uses the stream
    derived from (seed, i), whatever the number of workers.
    """
    theory = build_theory(cfg.theta, cfg.k_max, cfg.degree_cutoff)
    indices = range(cfg.replicates)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_replicate, [cfg] * cfg.replicates, indices, chunksize=4))
    else:
        rows = [run_replicate(cfg, i) for i in indices]
    aggregates, checks = _aggregate(cfg, theory, rows)
    violations = [f"replicate {row['index']}: {v}" for row in rows for v in row["violations"]]
    return {
        "config": cfg.to_dict(),
        "theory": theory.to_dict(),
        "per_replicate": rows,
        "aggregates": aggregates,
        "checks": checks,
        "invariant_violations": violations,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1)


def write_csv(report: dict, path) -> None:
    """One row per replicate: cycle counts, systole, pair ratio, degree counts."""
    cfg = report["config"]
    k_max, cutoff = cfg["k_max"], cfg["degree_cutoff"]
    header = (
        ["replicate"]
        + [f"C{k}" for k in range(1, k_max + 1)]
        + ["systole", "pair_count", "pair_ratio"]
        + [f"deg{k}" for k in range(1, cutoff + 1)]
        + [f"deg_gt{cutoff}"]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in report["per_replicate"]:
            w.writerow(
                [row["index"], *row["cycle_counts"], "" if row["systole"] is None else row["systole"],
                 row["pair_count"], repr(row["pair_ratio"]), *row["degree_counts"]]
            )
