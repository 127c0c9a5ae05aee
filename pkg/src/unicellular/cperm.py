"""Permutations with only odd cycles (C-permutations).

Cycle lengths of a uniform element of S^C_{n,m} follow a balls-in-boxes law:
P(L_1..L_m = l_1..l_m) is proportional to prod 1/l_i over odd l_i. Two exact
samplers are provided: conditioned i.i.d. draws from the tilted law
(rejection), and a log-space dynamic program for moderate sizes.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .theory import TAIL_TOL, phi, solve_psi

EXACT_MAX_N = 2000
ENUMERATE_MAX_N = 9


class SamplerBudgetExceeded(RuntimeError):
    """Rejection sampling ran out of retries."""


@dataclass(frozen=True)
class CPermutation:
    """A permutation of 0..n_elems-1 given by its cycles.

    Cycles are stored canonically: each starts at its smallest label and the
    cycles are sorted by that label.
    """

    n_elems: int
    cycles: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cycles = [tuple(int(x) for x in c) for c in self.cycles]
        if any(len(c) == 0 for c in cycles):
            raise ValueError("empty cycle")
        cycles = [c[c.index(min(c)):] + c[: c.index(min(c))] for c in cycles]
        cycles.sort(key=lambda c: c[0])
        object.__setattr__(self, "cycles", tuple(cycles))
        labels = np.fromiter(itertools.chain.from_iterable(cycles), dtype=np.int64)
        if labels.size != self.n_elems or not np.array_equal(np.sort(labels), np.arange(self.n_elems)):
            raise ValueError("cycles must partition 0..n_elems-1")
        if any(len(c) % 2 == 0 for c in cycles):
            raise ValueError("C-permutations have odd cycles only")

    @property
    def m(self) -> int:
        return len(self.cycles)

    def lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]

    def cycle_index(self) -> np.ndarray:
        """label -> index of its cycle in the canonical cycle order."""
        idx = np.empty(self.n_elems, dtype=np.int64)
        for i, c in enumerate(self.cycles):
            idx[list(c)] = i
        return idx

    def image(self) -> np.ndarray:
        """sigma as an array: image()[x] == sigma(x)."""
        out = np.empty(self.n_elems, dtype=np.int64)
        for c in self.cycles:
            out[list(c)] = c[1:] + c[:1]
        return out

    def to_dict(self) -> dict:
        return {"n_elems": self.n_elems, "cycles": [list(c) for c in self.cycles]}

    @classmethod
    def from_dict(cls, data: dict) -> "CPermutation":
        return cls(int(data["n_elems"]), tuple(tuple(c) for c in data["cycles"]))


@dataclass(frozen=True)
class CycleLengthHistogram:
    counts: dict[int, int]

    @property
    def n(self) -> int:
        return sum(k * c for k, c in self.counts.items())

    @property
    def m(self) -> int:
        return sum(self.counts.values())


def _check_feasible(n: int, m: int, allow_equal: bool) -> None:
    if n < 1 or m < 1:
        raise ValueError(f"need n, m >= 1, got n={n}, m={m}")
    if (n - m) % 2:
        raise ValueError(f"S^C_(n,m) is empty unless n = m mod 2 (n={n}, m={m})")
    if m > n or (m == n and not allow_equal):
        raise ValueError(f"need m < n for a nondegenerate tilt (n={n}, m={m})")


def solve_tilt(n: int, m: int) -> float:
    """t in (0, 1) with psi(t) = n/m."""
    _check_feasible(n, m, allow_equal=False)
    return solve_psi(n / m)


def tilted_pmf(t: float, tol: float = TAIL_TOL) -> np.ndarray:
    """P(xi = 2a + 1) for a = 0..A, truncated where the tail drops below tol.

    The tail beyond K is at most t^(K+2) / ((K+2) phi(t) (1 - t^2)).
    """
    norm = phi(t)
    k = 1
    while t ** (k + 2) / ((k + 2) * norm * (1.0 - t * t)) >= tol:
        k += 2
    ks = np.arange(1, k + 1, 2)
    logp = ks * math.log(t) - np.log(ks)
    p = np.exp(logp - logp.max())
    return p / p.sum()


def _rejection_lengths(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    t = solve_tilt(n, m)
    p = tilted_pmf(t)
    half = np.arange(p.size)
    target = (n - m) // 2
    budget = 10_000 * math.ceil(math.sqrt(m))
    batch = max(64, 4 * math.ceil(math.sqrt(m)))
    tried = 0
    while tried < budget:
        size = min(batch, budget - tried)
        # histogram of m i.i.d. draws of (xi - 1)/2; order is restored below
        hist = rng.multinomial(m, p, size=size)
        hits = np.flatnonzero(hist @ half == target)
        if hits.size:
            counts = hist[hits[0]]
            lengths = np.repeat(2 * half + 1, counts)
            return rng.permutation(lengths)
        tried += size
    raise SamplerBudgetExceeded(
        f"no odd composition of n={n} into m={m} parts after {budget} "
        f"rejection trials (budget 10^4 * ceil(sqrt(m)))"
    )


@lru_cache(maxsize=16)
def _log_table(h: int, m: int) -> np.ndarray:
    """table[j, s] = log sum over a_1..a_j >= 0 with sum s of prod 1/(2a_i + 1)."""
    logw = -np.log(2.0 * np.arange(h + 1) + 1.0)
    s_idx = np.arange(h + 1)[:, None] - np.arange(h + 1)[None, :]
    valid = s_idx >= 0
    s_idx = np.where(valid, s_idx, 0)
    table = np.full((m + 1, h + 1), -np.inf)
    table[0, 0] = 0.0
    for j in range(1, m + 1):
        terms = np.where(valid, logw[None, :] + table[j - 1][s_idx], -np.inf)
        table[j] = logsumexp(terms, axis=1)
    table.setflags(write=False)
    return table


def _exact_lengths(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    h = (n - m) // 2
    table = _log_table(h, m)
    logw = -np.log(2.0 * np.arange(h + 1) + 1.0)
    out = np.ones(m, dtype=np.int64)
    s = h
    for i in range(m):
        if s == 0:
            break
        j = m - i
        a = np.arange(s + 1)
        logp = logw[: s + 1] + table[j - 1][s - a] - table[j, s]
        p = np.exp(logp - logp.max())
        pick = int(rng.choice(s + 1, p=p / p.sum()))
        out[i] = 2 * pick + 1
        s -= pick
    # once s hits 0 every remaining part is 1 with probability one
    return out


def sample_cycle_lengths(n: int, m: int, rng: np.random.Generator, method: str = "auto") -> list[int]:
    """Cycle lengths (L_1..L_m) of a uniform C-permutation, in exchangeable order.

    method: "rejection" (tilted i.i.d. conditioned on the sum), "exact"
    (dynamic program), or "auto" (exact for n <= 2000).
    """
    _check_feasible(n, m, allow_equal=True)
    if n == m:
        return [1] * m
    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "rejection"
    if method == "exact":
        lengths = _exact_lengths(n, m, rng)
    elif method == "rejection":
        lengths = _rejection_lengths(n, m, rng)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [int(x) for x in lengths]


def sample_cperm(n_elems: int, m: int, rng: np.random.Generator, method: str = "auto") -> CPermutation:
    """Uniform element of S^C_{n_elems, m}.

    Given the lengths, a uniform labelling of the blocks together with the
    in-block order yields every permutation of that cycle type equally often.
    """
    lengths = sample_cycle_lengths(n_elems, m, rng, method=method)
    labels = rng.permutation(n_elems).tolist()
    cycles = []
    pos = 0
    for ell in lengths:
        cycles.append(tuple(labels[pos:pos + ell]))
        pos += ell
    return CPermutation(n_elems, tuple(cycles))


def _cycles_of(perm: tuple[int, ...]) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        cycles.append(tuple(cyc))
    return cycles


def enumerate_cperms(n_elems: int, m: int) -> list[CPermutation]:
    """Every element of S^C_{n_elems, m}, by brute force over S_n."""
    if n_elems > ENUMERATE_MAX_N:
        raise ValueError(f"enumeration guarded to n_elems <= {ENUMERATE_MAX_N}")
    out = []
    for perm in itertools.permutations(range(n_elems)):
        cycles = _cycles_of(perm)
        if len(cycles) == m and all(len(c) % 2 for c in cycles):
            out.append(CPermutation(n_elems, tuple(cycles)))
    return out


def cycle_length_histogram(sigma: CPermutation) -> CycleLengthHistogram:
    return CycleLengthHistogram(dict(sorted(Counter(sigma.lengths()).items())))


def pair_count(sigma: CPermutation) -> int:
    """Unordered pairs of labels sharing a cycle: sum_k C(k, 2) N_k."""
    return sum(k * (k - 1) // 2 for k in sigma.lengths())


__all__ = [
    "CPermutation",
    "CycleLengthHistogram",
    "SamplerBudgetExceeded",
    "cycle_length_histogram",
    "enumerate_cperms",
    "pair_count",
    "sample_cperm",
    "sample_cycle_lengths",
    "solve_tilt",
    "tilted_pmf",
]
