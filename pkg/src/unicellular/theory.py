"""Closed-form limit laws for high-genus unicellular maps.

Every quantity here is a deterministic function of the genus ratio ``theta``
(through the tilt ``tau``). These values are the reference side of every
Monte Carlo comparison made by the harness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TAIL_TOL = 1e-15
RESIDUAL_TOL = 1e-12


def phi(z: float) -> float:
    """Generating function of the odd weights 1/k: sum z^k/k over odd k."""
    if not -1.0 < z < 1.0:
        raise ValueError(f"phi is defined on (-1, 1), got {z!r}")
    return math.atanh(z)


def psi(t: float) -> float:
    """t * phi'(t) / phi(t); strictly increasing from 1 (at 0+) to infinity."""
    if not 0.0 < t < 1.0:
        raise ValueError(f"psi is defined on (0, 1), got {t!r}")
    return t / ((1.0 - t) * (1.0 + t) * math.atanh(t))


def _psi_prime(t: float) -> float:
    a = math.atanh(t)
    d = (1.0 - t) * (1.0 + t) * a
    return ((1.0 + t * t) * a - t) / (d * d)


def solve_psi(target: float) -> float:
    """Return the unique t in (0, 1) with psi(t) == target (target > 1).

    Bisection on the monotone bracket, then a few guarded Newton steps; the
    point with the smallest residual wins.
    """
    if not target > 1.0 or not math.isfinite(target):
        raise ValueError(f"psi(t) = {target!r} has no root in (0, 1); need target > 1")
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if psi(mid) < target:
            lo = mid
        else:
            hi = mid
    candidates = [c for c in (lo, hi) if 0.0 < c < 1.0]
    t = min(candidates, key=lambda c: abs(psi(c) - target))
    for _ in range(4):
        step = (psi(t) - target) / _psi_prime(t)
        nxt = t - step
        if not 0.0 < nxt < 1.0:
            break
        if abs(psi(nxt) - target) < abs(psi(t) - target):
            t = nxt
        else:
            break
    return t


def solve_tau(theta: float) -> float:
    """Tilt for genus ratio theta: psi(tau) = 1/(1 - 2 theta)."""
    if not 0.0 < theta < 0.5:
        raise ValueError(f"theta must lie in (0, 1/2), got {theta!r}")
    return solve_psi(1.0 / (1.0 - 2.0 * theta))


def gamma_of_tau(tau: float) -> float:
    """Limit of (same-cycle pairs)/n: tau^2 / (1 - tau^2)."""
    return tau * tau / ((1.0 - tau) * (1.0 + tau))


def lambda_ell(ell: int, tau: float) -> float:
    """Poisson intensity of cycles of length ell.

    Uses (rho_+^l + rho_-^l - 2) = 4 sinh^2(l * atanh(tau)), which avoids the
    cancellation of the direct form for small tau.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    s = math.sinh(ell * math.atanh(tau))
    return 2.0 * s * s / ell


def lambdas(tau: float, k_max: int) -> np.ndarray:
    return np.array([lambda_ell(ell, tau) for ell in range(1, k_max + 1)])


def pi_k(k: int, tau: float) -> float:
    """Limiting fraction of permutation cycles that have length k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k % 2 == 0:
        return 0.0
    return math.exp(k * math.log(tau)) / (k * phi(tau))


def pi_cutoff(tau: float, tol: float = TAIL_TOL) -> int:
    """Smallest odd K with sum_{odd k > K} pi_k < tol (geometric tail bound)."""
    norm = phi(tau) * (1.0 - tau * tau)
    k = 1
    while tau ** (k + 2) / ((k + 2) * norm) >= tol:
        k += 2
    return k


def pi_vector(tau: float, cutoff: int | None = None) -> np.ndarray:
    """pi_1..pi_cutoff as an array indexed by k-1."""
    if cutoff is None:
        cutoff = pi_cutoff(tau)
    return np.array([pi_k(k, tau) for k in range(1, cutoff + 1)])


def kappa_k(k: int, tau: float) -> float:
    """Limiting fraction of map vertices of degree k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = ((1.0 + tau) / 2.0) ** k - ((1.0 - tau) / 2.0) ** k
    return a / (2.0 * phi(tau) * k)


def kappa_cutoff(tau: float, tol: float = TAIL_TOL) -> int:
    q = (1.0 + tau) / 2.0
    norm = 2.0 * phi(tau) * (1.0 - q)
    k = 1
    while q ** (k + 1) / ((k + 1) * norm) >= tol:
        k += 1
    return k


def kappa_vector(tau: float, cutoff: int | None = None) -> np.ndarray:
    if cutoff is None:
        cutoff = kappa_cutoff(tau)
    return np.array([kappa_k(k, tau) for k in range(1, cutoff + 1)])


def _series_mul(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    return np.convolve(a, b)[: degree + 1]


def compose_series(outer: np.ndarray, inner: np.ndarray, degree: int) -> np.ndarray:
    """Coefficients of outer(inner(x)) up to x^degree.

    Both arguments are coefficient arrays indexed from x^0; ``inner`` must
    have zero constant term.
    """
    if inner[0] != 0:
        raise ValueError("inner series must have zero constant term")
    head = np.zeros(degree + 1)
    head[: min(len(inner), degree + 1)] = inner[: degree + 1]
    inner = head
    out = np.zeros(degree + 1)
    power = np.zeros(degree + 1)
    power[0] = 1.0
    for c in outer[: degree + 1]:
        out += c * power
        power = _series_mul(power, inner, degree)
    return out


def kappa_by_composition(tau: float, degree: int = 64) -> np.ndarray:
    """kappa_1..kappa_degree from the composition H_pi(H_rho(x)).

    H_rho has coefficients 2^-k (plane-tree degree law), H_pi has pi_k.
    Independent of the closed form in :func:`kappa_k`.
    """
    k = np.arange(degree + 1)
    rho = np.where(k >= 1, 0.5 ** k, 0.0)
    pis = np.concatenate([[0.0], pi_vector(tau, degree)])
    return compose_series(pis, rho, degree)[1:]


def systole_pmf(ell: int, lams) -> float:
    """P(Z = ell) = exp(-lambda_1 - ... - lambda_{ell-1}) * (1 - exp(-lambda_ell))."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if len(lams) < ell:
        raise ValueError(f"need lambdas through {ell}, got {len(lams)}")
    head = math.fsum(lams[: ell - 1])
    return math.exp(-head) * -math.expm1(-lams[ell - 1])


@dataclass(frozen=True)
class TheoryTable:
    theta: float
    alpha: float
    tau: float
    gamma: float
    k_max: int
    lambdas: list[float]
    systole_pmf: list[float]
    pis: list[float] = field(repr=False)
    kappas: list[float] = field(repr=False)
    pi_cutoff: int = 0
    kappa_cutoff: int = 0

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "alpha": self.alpha,
            "tau": self.tau,
            "gamma": self.gamma,
            "k_max": self.k_max,
            "lambdas": list(self.lambdas),
            "systole_pmf": list(self.systole_pmf),
            "systole_tail": 1.0 - math.fsum(self.systole_pmf),
            "pi_cutoff": self.pi_cutoff,
            "pis": list(self.pis),
            "kappa_cutoff": self.kappa_cutoff,
            "kappas": list(self.kappas),
        }


def build_theory(theta: float, k_max: int = 6, degree_cutoff: int | None = None) -> TheoryTable:
    """Assemble every limit law at genus ratio theta.

    ``degree_cutoff`` truncates the stored kappas; by default they run to the
    tail-tolerance cutoff.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    tau = solve_tau(theta)
    lams = lambdas(tau, k_max)
    kc = kappa_cutoff(tau)
    kappas = kappa_vector(tau, kc if degree_cutoff is None else degree_cutoff)
    return TheoryTable(
        theta=theta,
        alpha=1.0 - 2.0 * theta,
        tau=tau,
        gamma=gamma_of_tau(tau),
        k_max=k_max,
        lambdas=lams.tolist(),
        systole_pmf=[systole_pmf(ell, lams) for ell in range(1, k_max + 1)],
        pis=pi_vector(tau).tolist(),
        kappas=kappas.tolist(),
        pi_cutoff=pi_cutoff(tau),
        kappa_cutoff=kc,
    )
