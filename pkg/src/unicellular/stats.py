"""Goodness-of-fit summaries used by the experiment harness."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class PoissonFit:
    lam: float
    n_samples: int
    mean: float
    variance: float
    z_score: float
    dispersion: float  # sample variance / sample mean
    tv_distance: float
    chi2: float
    chi2_dof: int
    chi2_pvalue: float
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}
        d["flags"] = list(self.flags)
        return d


def tv_distance(p, q) -> float:
    """Half the L1 distance between two pmfs on the same support."""
    return 0.5 * float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


def _merge_bins(observed: np.ndarray, expected: np.ndarray):
    """Merge adjacent bins left to right until every expected count >= 5."""
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= MIN_EXPECTED:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp:
            obs[-1] += acc_o
            exp[-1] += acc_e
        else:
            obs.append(acc_o)
            exp.append(acc_e)
    return np.array(obs), np.array(exp)


def chi_square(observed, expected, ddof: int = 0) -> tuple[float, int, float]:
    """Pearson chi-square with small bins merged; returns (statistic, dof, p-value)."""
    obs, exp = _merge_bins(np.asarray(observed, float), np.asarray(expected, float))
    dof = len(obs) - 1 - ddof
    if dof < 1:
        return 0.0, 0, 1.0
    stat = float(((obs - exp) ** 2 / exp).sum())
    return stat, dof, float(stats.chi2.sf(stat, dof))


def compare_to_poisson(samples, lam: float) -> PoissonFit:
    """Compare nonnegative integer samples with Poisson(lam).

    TV distance is taken on {0, ..., cutoff} plus one lumped tail bin, where
    cutoff covers every sample and all but 1e-12 of the Poisson mass.
    """
    x = np.asarray(samples, dtype=np.int64)
    if x.size == 0:
        raise ValueError("need at least one sample")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if np.any(x < 0):
        raise ValueError("samples must be nonnegative integers")
    r = x.size
    mean = float(x.mean())
    var = float(x.var(ddof=1)) if r > 1 else 0.0
    cutoff = int(max(x.max(), stats.poisson.isf(1e-12, lam)))
    support = np.arange(cutoff + 1)
    emp = np.bincount(x, minlength=cutoff + 1)[: cutoff + 1] / r
    theo = stats.poisson.pmf(support, lam)
    tail = float(stats.poisson.sf(cutoff, lam))
    tv = tv_distance(np.append(emp, 0.0), np.append(theo, tail))
    observed = np.append(np.bincount(x, minlength=cutoff + 1)[: cutoff + 1], 0)
    chi2, dof, pvalue = chi_square(observed, r * np.append(theo, tail))
    flags = []
    dispersion = var / mean if mean > 0 else float("nan")
    if var == 0.0:
        flags.append("degenerate")
    elif dispersion < 0.5:
        flags.append("underdispersed")
    elif dispersion > 2.0:
        flags.append("overdispersed")
    return PoissonFit(
        lam=lam,
        n_samples=r,
        mean=mean,
        variance=var,
        z_score=(mean - lam) / math.sqrt(lam / r),
        dispersion=dispersion,
        tv_distance=tv,
        chi2=chi2,
        chi2_dof=dof,
        chi2_pvalue=pvalue,
        flags=tuple(flags),
    )


def compare_pmf(empirical: dict, theoretical: dict) -> dict:
    """Max absolute deviation and TV distance over the union of supports."""
    keys = sorted(set(empirical) | set(theoretical), key=str)
    e = np.array([float(empirical.get(k, 0.0)) for k in keys])
    t = np.array([float(theoretical.get(k, 0.0)) for k in keys])
    diff = np.abs(e - t)
    return {"max_abs_dev": float(diff.max()) if diff.size else 0.0, "tv_distance": 0.5 * float(diff.sum())}


def pearson_r(x, y) -> float:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.std() == 0 or y.std() == 0:
        return 0.0
    return float(np.corrcoef(x, y)[0, 1])
