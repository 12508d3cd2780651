"""Truncated multivariate formal power series.

Coefficients live on the set of multi-indices of total degree <= N, stored
densely in graded-lexicographic order.  The four operations exported here
(powers, powers of zero-free-term series, weighted power sums, exponential)
are the building blocks of every moment-conditioning transform in this
package: the nonlinear maps between a measure's moments and its phase
function's moments are compositions of truncated log/exp expansions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "FormalSeries",
    "graded_indices",
    "series_pow",
    "series_pow_zero_free",
    "accumulate_powers",
    "series_exp",
]


@lru_cache(maxsize=None)
def graded_indices(dimension: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices with total degree <= order, graded-lex ordered.

    Graded ordering (degree first, lexicographic within a degree) is what the
    triangular power recursion requires: every coefficient of degree m depends
    only on coefficients of degree < m.
    """
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if order < 0:
        raise ValueError("order must be >= 0")
    out: list[tuple[int, ...]] = []
    for total in range(order + 1):
        out.extend(_compositions(total, dimension))
    return tuple(out)


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """Multi-indices of exact total degree, lexicographically ordered."""
    if parts == 1:
        return [(total,)]
    out = []
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            out.append((head,) + tail)
    return sorted(out, reverse=True)


@lru_cache(maxsize=None)
def _positions(dimension: int, order: int) -> dict[tuple[int, ...], int]:
    return {idx: pos for pos, idx in enumerate(graded_indices(dimension, order))}


@dataclass
class FormalSeries:
    """A power series truncated at total degree `order`.

    coeff[p] is the coefficient of x^alpha where alpha is the p-th entry of
    ``graded_indices(dimension, order)``.  Coefficients are complex
    throughout; callers with real data check imaginary parts at their own
    boundaries.
    """

    dimension: int
    order: int
    coeff: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = len(graded_indices(self.dimension, self.order))
        self.coeff = np.asarray(self.coeff, dtype=complex)
        if self.coeff.shape != (n,):
            raise ValueError(
                f"coefficient array has shape {self.coeff.shape}, expected ({n},)"
            )

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, dimension: int, order: int) -> "FormalSeries":
        n = len(graded_indices(dimension, order))
        return cls(dimension, order, np.zeros(n, dtype=complex))

    @classmethod
    def constant(cls, dimension: int, order: int, value: complex) -> "FormalSeries":
        s = cls.zeros(dimension, order)
        s.coeff[0] = value
        return s

    @classmethod
    def from_dict(
        cls,
        dimension: int,
        order: int,
        entries: dict[tuple[int, ...], complex],
    ) -> "FormalSeries":
        s = cls.zeros(dimension, order)
        pos = _positions(dimension, order)
        for idx, val in entries.items():
            key = tuple(int(i) for i in idx)
            if len(key) != dimension or any(i < 0 for i in key):
                raise ValueError(f"bad multi-index {idx}")
            if sum(key) > order:
                raise ValueError(f"index {idx} exceeds truncation order {order}")
            s.coeff[pos[key]] = val
        return s

    # -- accessors ---------------------------------------------------------

    @property
    def indices(self) -> tuple[tuple[int, ...], ...]:
        return graded_indices(self.dimension, self.order)

    @property
    def free_term(self) -> complex:
        return complex(self.coeff[0])

    def coefficient(self, index: tuple[int, ...]) -> complex:
        key = tuple(int(i) for i in index)
        if sum(key) > self.order:
            return 0.0 + 0.0j
        return complex(self.coeff[_positions(self.dimension, self.order)[key]])

    def copy(self) -> "FormalSeries":
        return FormalSeries(self.dimension, self.order, self.coeff.copy())

    def truncate(self, order: int) -> "FormalSeries":
        """Restriction to total degree <= order (order may not grow)."""
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        out = FormalSeries.zeros(self.dimension, order)
        pos = _positions(self.dimension, self.order)
        for idx in out.indices:
            out.coeff[_positions(self.dimension, order)[idx]] = self.coeff[pos[idx]]
        return out

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self._check_compatible(other)
        return FormalSeries(self.dimension, self.order, self.coeff + other.coeff)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        self._check_compatible(other)
        return FormalSeries(self.dimension, self.order, self.coeff - other.coeff)

    def scale(self, factor: complex) -> "FormalSeries":
        return FormalSeries(self.dimension, self.order, self.coeff * factor)

    def multiply(self, other: "FormalSeries") -> "FormalSeries":
        """Truncated Cauchy product."""
        self._check_compatible(other)
        table = _product_table(self.dimension, self.order)
        out = FormalSeries.zeros(self.dimension, self.order)
        a, b = self.coeff, other.coeff
        nz_a = np.nonzero(a)[0]
        for pa in nz_a:
            pairs = table[pa]
            if pairs.size:
                np.add.at(out.coeff, pairs[:, 1], a[pa] * b[pairs[:, 0]])
        return out

    def _check_compatible(self, other: "FormalSeries") -> None:
        if (self.dimension, self.order) != (other.dimension, other.order):
            raise ValueError("series dimension/order mismatch")

    # -- serialization (CLI debugging) --------------------------------------

    def to_json(self) -> dict:
        entries = [
            [list(idx), float(c.real), float(c.imag)]
            for idx, c in zip(self.indices, self.coeff)
            if c != 0
        ]
        return {"dimension": self.dimension, "order": self.order, "entries": entries}

    @classmethod
    def from_json(cls, payload: dict) -> "FormalSeries":
        s = cls.zeros(int(payload["dimension"]), int(payload["order"]))
        pos = _positions(s.dimension, s.order)
        for idx, re, im in payload["entries"]:
            s.coeff[pos[tuple(int(i) for i in idx)]] = complex(re, im)
        return s


@lru_cache(maxsize=None)
def _product_table(dimension: int, order: int) -> tuple[np.ndarray, ...]:
    """For each index position pa, the (pb, pc) pairs with alpha_a+alpha_b=alpha_c."""
    idx = graded_indices(dimension, order)
    pos = _positions(dimension, order)
    table: list[np.ndarray] = []
    for ia in idx:
        deg_a = sum(ia)
        pairs = []
        for pb, ib in enumerate(idx):
            if deg_a + sum(ib) > order:
                continue
            ic = tuple(x + y for x, y in zip(ia, ib))
            pairs.append((pb, pos[ic]))
        table.append(np.array(pairs, dtype=np.intp).reshape(-1, 2))
    return tuple(table)


def series_pow(a: FormalSeries, k: int) -> FormalSeries:
    """k-th power of a series with nonzero free term.

    Uses the triangular recursion of J.C.P. Miller (multivariate form due to
    Nakos): with B = A^k,

        b_0   = a_0^k,
        b_mu  = sum_{0 < gamma <= mu} (1/a_0)
                [ (k+1) |gamma/mu| / |mu/mu| - 1 ] a_gamma b_{mu-gamma},

    where |alpha/beta| = sum over positions with beta_i != 0 of
    alpha_i / beta_i, so |mu/mu| counts the nonzero entries of mu.  Each
    coefficient only consumes strictly lower-degree output coefficients,
    which is why truncated inputs give exact truncated outputs.
    """
    if k < 0:
        raise ValueError("exponent must be a non-negative integer")
    if a.free_term == 0:
        raise ValueError(
            "free term is zero; use series_pow_zero_free for such series"
        )
    out = FormalSeries.zeros(a.dimension, a.order)
    out.coeff[0] = a.free_term**k
    indices = a.indices
    pos = _positions(a.dimension, a.order)
    a0 = a.free_term
    for p_mu, mu in enumerate(indices):
        if p_mu == 0:
            continue
        support = [i for i, m in enumerate(mu) if m != 0]
        mu_over_mu = float(len(support))
        acc = 0.0 + 0.0j
        for gamma in itertools.product(*(range(m + 1) for m in mu)):
            if all(g == 0 for g in gamma):
                continue
            a_g = a.coeff[pos[gamma]]
            if a_g == 0:
                continue
            rest = tuple(m - g for m, g in zip(mu, gamma))
            b_rest = out.coeff[pos[rest]]
            if b_rest == 0:
                continue
            ratio = sum(gamma[i] / mu[i] for i in support)
            acc += ((k + 1) * ratio / mu_over_mu - 1.0) * a_g * b_rest
        out.coeff[p_mu] = acc / a0
    return out


def series_pow_zero_free(s: FormalSeries, k: int) -> FormalSeries:
    """k-th power of a series with zero free term.

    Shifts by one and expands binomially,
    S^k = [(S+1) - 1]^k = sum_j C(k,j) (-1)^(k-j) (S+1)^j,
    so that every power on the right has a nonzero free term and series_pow
    applies.
    """
    if k < 0:
        raise ValueError("exponent must be a non-negative integer")
    if s.free_term != 0:
        raise ValueError("free term must be zero")
    shifted = s.copy()
    shifted.coeff[0] = 1.0
    out = FormalSeries.zeros(s.dimension, s.order)
    for j in range(k + 1):
        term = series_pow(shifted, j)
        out = out + term.scale(math.comb(k, j) * (-1.0) ** (k - j))
    return out


def accumulate_powers(s: FormalSeries, weights) -> FormalSeries:
    """Weighted power sum sum_{k=1}^{K} w_k S^k, truncated.

    S must have zero free term, so S^k has minimal degree k and the sum is
    finite on any truncation.  With w_k = 1/k this is -log(1-S); with
    w_k = (-1)^(k+1)/k it is log(1+S).  Powers are built by repeated
    truncated multiplication rather than by the binomial shift, which would
    cancel catastrophically at the ~1e-12 accuracies the conditioning
    transforms are held to.
    """
    if s.free_term != 0:
        raise ValueError("free term must be zero")
    weights = np.asarray(weights, dtype=complex)
    out = FormalSeries.zeros(s.dimension, s.order)
    if weights.size == 0:
        return out
    power = s.copy()
    out = out + power.scale(weights[0])
    for k in range(2, len(weights) + 1):
        if k > s.order:
            break  # S^k vanishes beyond the truncation
        power = power.multiply(s)
        out = out + power.scale(weights[k - 1])
    return out


def series_exp(s: FormalSeries) -> FormalSeries:
    """exp(S) = sum_{k=0}^{N} S^k / k! for S with zero free term."""
    if s.free_term != 0:
        raise ValueError("free term must be zero")
    out = FormalSeries.constant(s.dimension, s.order, 1.0)
    power = FormalSeries.constant(s.dimension, s.order, 1.0)
    for k in range(1, s.order + 1):
        power = power.multiply(s).scale(1.0 / k)
        out = out + power
    return out
