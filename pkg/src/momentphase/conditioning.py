"""Moment conditioning: from a measure's moments to its phase function's.

A positive measure whose generating transform G satisfies 1 + G = exp(of the
phase transform) has phase moments obtained from a truncated logarithm of its
own moment series.  The maps here are triangular (output n depends on inputs
0..n only) and exact on the truncation, which is what makes them usable on
finite moment data.  Also here: Hankel feasibility checks, one-step min/max
moment extensions, and the recurrence generating all moments of an
exponential-polynomial weight from its leading ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .series import FormalSeries, accumulate_powers, graded_indices

__all__ = [
    "Support",
    "PowerMoments",
    "TrigMoments",
    "MultiMoments",
    "Feasibility",
    "condition_line",
    "condition_circle",
    "condition_polydisk",
    "hankel_feasibility",
    "hankel_matrices",
    "min_extension",
    "max_extension",
    "extend_exp_weight",
    "moments_to_json",
    "moments_from_json",
]

IMAG_TOL = 1e-10  # tolerated imaginary leakage when a real pipeline crosses a boundary


@dataclass(frozen=True)
class Support:
    """Support tag for 1-D power moments: the half line or an interval."""

    kind: str  # "half_line" | "interval"
    bounds: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("half_line", "interval"):
            raise ValueError(f"unknown support kind {self.kind!r}")
        if self.kind == "interval":
            if self.bounds is None or self.bounds[0] >= self.bounds[1]:
                raise ValueError("interval support needs bounds (a, b) with a < b")
        elif self.bounds is not None:
            raise ValueError("half_line support takes no bounds")

    @classmethod
    def half_line(cls) -> "Support":
        return cls("half_line")

    @classmethod
    def interval(cls, a: float, b: float) -> "Support":
        return cls("interval", (float(a), float(b)))


@dataclass
class PowerMoments:
    """Real power moments gamma_0..gamma_N of a 1-D positive measure."""

    values: np.ndarray
    support: Support

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("moment sequence must be a non-empty 1-D array")

    @property
    def order(self) -> int:
        return self.values.size - 1


@dataclass
class TrigMoments:
    """Complex trigonometric moments tau(0)..tau(M); tau(-k) = conj(tau(k))."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("moment sequence must be a non-empty 1-D array")

    @property
    def order(self) -> int:
        return self.values.size - 1


@dataclass
class MultiMoments:
    """Moments gamma_alpha, |alpha| <= order, of a measure on R^d.

    Stored densely over ``graded_indices(dimension, order)``.  Measure
    moments are real; the container is complex because conditioned phase
    moments (which reuse it) are genuinely complex.
    """

    dimension: int
    order: int
    values: np.ndarray

    def __post_init__(self) -> None:
        n = len(graded_indices(self.dimension, self.order))
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (n,):
            raise ValueError(f"expected {n} moment entries, got {self.values.shape}")

    @classmethod
    def from_dict(
        cls, dimension: int, order: int, entries: dict[tuple[int, ...], complex]
    ) -> "MultiMoments":
        s = FormalSeries.from_dict(dimension, order, entries)
        return cls(dimension, order, s.coeff)

    @property
    def indices(self) -> tuple[tuple[int, ...], ...]:
        return graded_indices(self.dimension, self.order)

    @property
    def total_mass(self) -> float:
        return float(self.values[0].real)

    def coefficient(self, index) -> complex:
        key = tuple(int(i) for i in index)
        if sum(key) > self.order:
            return 0j
        return complex(self.values[self.indices.index(key)])

    def real_values(self) -> np.ndarray:
        scale = max(1.0, np.abs(self.values).max())
        if np.abs(self.values.imag).max() > IMAG_TOL * scale:
            raise ValueError("moments carry a non-negligible imaginary part")
        return self.values.real.copy()


class Feasibility(enum.Enum):
    FEASIBLE_INTERIOR = "feasible_interior"
    BOUNDARY = "boundary"
    INFEASIBLE = "infeasible"


# ----------------------------------------------------------------------------
# conditioning transforms
# ----------------------------------------------------------------------------


def _log_expand(values: np.ndarray, upper: int) -> np.ndarray:
    """Coefficients of sum_{k=1}^{upper} (1/k) S^k where S_n+1 = values_n.

    In the variable u = 1/z the moment generating sum S = sum gamma_n u^(n+1)
    has zero free term; the weighted power sum is the truncated expansion of
    -log(1 - S).  Entry n of the result is the coefficient of u^(n+1).
    """
    n = len(values)
    s = FormalSeries.zeros(1, n)
    s.coeff[1:] = values
    weights = [1.0 / k for k in range(1, upper + 1)]
    log_series = accumulate_powers(s, weights)
    return log_series.coeff[1:].copy()


def condition_line(a_mu: PowerMoments) -> PowerMoments:
    """Phase moments of a measure on the line from its power moments.

    The phase function phi takes values in [0, 1] and satisfies
    1 + Cmu = exp(Cphi) for the Cauchy transforms; expanding the logarithm at
    infinity turns the measure moments a_mu(0..N) into the phase moments
    a_phi(0..N).  The sum of powers runs to k = N+1: the lowest-order term of
    S^k is u^k, so the coefficient of u^(N+1) receives a contribution from
    k = N+1 (a pure point mass at the origin needs exactly that term).

    The phase of a positive measure lives on the half line and is bounded by
    one, so the output support tag is half_line.
    """
    values = np.asarray(a_mu.values, dtype=float)
    if values[0] <= 0:
        raise ValueError("total mass gamma_0 must be positive")
    n = a_mu.order
    coeffs = _log_expand(values.astype(complex), n + 1)
    scale = max(1.0, np.abs(coeffs).max())
    if np.abs(coeffs.imag).max() > IMAG_TOL * scale:
        raise ValueError("phase moments acquired an imaginary part")
    return PowerMoments(coeffs.real, Support.half_line())


def condition_circle(tau_mu: TrigMoments) -> TrigMoments:
    """Phase moments of a measure on the circle from its trigonometric moments.

    With hat_tau(n) = tau(n)/tau(0), the phase moments satisfy

        sum_{k>=1} tau_phi(k) z^k
            = (i/2) sum_{k>=1} ((-1)^k / k) [ sum_{n>=1} hat_tau(n) z^n ]^k,

    i.e. a truncated -(i/2) log(1 + .), and tau_phi(0) = pi/2 independently of
    the input (the mean of the phase over the circle is fixed by the
    normalization of the exponential representation).
    """
    values = np.asarray(tau_mu.values, dtype=complex)
    tau0 = values[0]
    if abs(tau0.imag) > IMAG_TOL * max(1.0, abs(tau0)):
        raise ValueError("tau(0) must be real for a positive measure")
    if tau0.real <= 0:
        raise ValueError("tau(0) must be positive")
    m = tau_mu.order
    out = np.zeros(m + 1, dtype=complex)
    out[0] = np.pi / 2
    if m >= 1:
        s = FormalSeries.zeros(1, m)
        s.coeff[1:] = values[1:] / tau0.real
        weights = [(-1.0) ** k / k for k in range(1, m + 1)]
        log_series = accumulate_powers(s, weights)
        out[1:] = 0.5j * log_series.coeff[1:]
    return TrigMoments(out)


def condition_polydisk(a_mu: MultiMoments) -> MultiMoments:
    """Phase moments on the torus from multivariate moments on the l1 ball.

    Forms the normalized generating series
    B(z) = sum_alpha (|alpha|!/alpha!) a_mu(alpha) z^alpha / mass (free term
    one), takes the truncated logarithm and divides by 2i.  The mean value is
    pi/2 at the zero index, matching the circle normalization.
    """
    mass = a_mu.total_mass
    if mass <= 0:
        raise ValueError("total mass must be positive")
    d, n = a_mu.dimension, a_mu.order
    b_minus_1 = FormalSeries.zeros(d, n)
    gamma = a_mu.values
    for pos, alpha in enumerate(a_mu.indices):
        if pos == 0:
            continue
        total = sum(alpha)
        mult = _factorial(total)
        for ai in alpha:
            mult /= _factorial(ai)
        b_minus_1.coeff[pos] = mult * gamma[pos] / mass
    weights = [(-1.0) ** (k + 1) / k for k in range(1, n + 1)]
    log_series = accumulate_powers(b_minus_1, weights)
    out = log_series.coeff / 2j
    out[0] = np.pi / 2
    return MultiMoments(d, n, out)


def _factorial(n: int) -> float:
    out = 1.0
    for i in range(2, n + 1):
        out *= i
    return out


# ----------------------------------------------------------------------------
# feasibility and extensions
# ----------------------------------------------------------------------------


def hankel_matrices(gamma: PowerMoments) -> tuple[np.ndarray, np.ndarray]:
    """The two moment Hankel matrices formed from gamma_0..gamma_N.

    H1[i, j] = gamma_{i+j} and H2[i, j] = gamma_{i+j+1}, each as large as the
    data allows.  For data of length 2n these are the classical pair whose
    positivity characterizes solvable half-line problems.
    """
    g = np.asarray(gamma.values, dtype=float)
    length = g.size
    n1 = (length + 1) // 2
    n2 = length // 2
    h1 = np.array([[g[i + j] for j in range(n1)] for i in range(n1)])
    h2 = np.array(
        [[g[i + j + 1] for j in range(n2)] for i in range(n2)]
    ).reshape(n2, n2)
    return h1, h2


def hankel_feasibility(gamma: PowerMoments, rel_tol: float = 1e-10) -> Feasibility:
    """Classify a moment sequence by the spectra of its Hankel matrices.

    Both matrices positive definite (all eigenvalues above the scaled
    tolerance) means the data sits in the interior of the moment cone; any
    eigenvalue below minus the tolerance is infeasible; anything else is on
    the boundary (singular measures land here).
    """
    h1, h2 = hankel_matrices(gamma)
    tol = rel_tol * max(1.0, np.abs(gamma.values).max())
    eigs = [np.linalg.eigvalsh(h) for h in (h1, h2) if h.size]
    min_eig = min(e.min() for e in eigs)
    if min_eig > tol:
        return Feasibility.FEASIBLE_INTERIOR
    if min_eig < -tol:
        return Feasibility.INFEASIBLE
    return Feasibility.BOUNDARY


def min_extension(gamma: PowerMoments) -> float:
    """Smallest feasible next moment for data gamma_0..gamma_{2n-1}.

    The value gamma~_{2n} that makes the (n+1) x (n+1) Hankel determinant
    vanish; by the Schur complement of the bordered matrix this is
    b^T A^{-1} b with A the leading n x n Hankel block and
    b = (gamma_n..gamma_{2n-1}).
    """
    g = np.asarray(gamma.values, dtype=float)
    if g.size % 2 != 0:
        raise ValueError("min_extension needs an even number of moments (gamma_0..gamma_{2n-1})")
    n = g.size // 2
    a = np.array([[g[i + j] for j in range(n)] for i in range(n)])
    b = g[n:]
    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("leading Hankel block is singular") from exc
    return float(b @ sol)


def max_extension(gamma: PowerMoments, dual) -> float:
    """Largest next moment reachable by an exponential-family density.

    `dual` is a converged maxent solution whose constraints were
    gamma_0..gamma_{n-1}; the extension is the n-th moment of that density,
    evaluated on the solver's own quadrature.
    """
    if not dual.converged:
        raise ValueError("maxent dual has not converged; extension undefined")
    from .maxent import primal_eval  # local import to avoid cycle at import time

    n = gamma.values.size
    ptilde, _, _ = primal_eval(dual.alpha, dual.basis)
    nodes = dual.basis.quadrature.nodes
    return float(np.real(np.sum(nodes**n * ptilde)))


def extend_exp_weight(sigma, seed: PowerMoments, count: int) -> PowerMoments:
    """Extend moments of the density exp(P(x)) on [0, inf) by recurrence.

    For P(x) = sigma_0 + sigma_1 x + ... + sigma_n x^n with sigma_n < 0,
    integration by parts couples any n+1 consecutive moments:

        (k+1) gamma_k + sigma_1 gamma_{k+1} + 2 sigma_2 gamma_{k+2}
            + ... + n sigma_n gamma_{k+n} = 0.

    Given the first n moments the whole sequence follows; `count` further
    values are appended to the seed.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.size - 1
    if n < 1:
        raise ValueError("polynomial must have degree >= 1")
    if sigma[n] == 0:
        raise ValueError("leading coefficient must be nonzero")
    seed_vals = np.asarray(seed.values, dtype=float)
    if seed_vals.size != n:
        raise ValueError(f"seed must contain exactly {n} moments")
    out = np.empty(n + count)
    out[:n] = seed_vals
    for k in range(count):
        acc = (k + 1) * out[k]
        for i in range(1, n):
            acc += i * sigma[i] * out[k + i]
        out[k + n] = -acc / (n * sigma[n])
    return PowerMoments(out, seed.support)


# ----------------------------------------------------------------------------
# moment-file JSON schema
# ----------------------------------------------------------------------------


def moments_to_json(m) -> dict:
    """Serialize any of the three moment containers to the moment-file schema."""
    if isinstance(m, PowerMoments):
        support = (
            "half_line" if m.support.kind == "half_line" else list(m.support.bounds)
        )
        return {"kind": "power", "support": support, "values": m.values.tolist()}
    if isinstance(m, TrigMoments):
        return {
            "kind": "trig",
            "values": [[float(v.real), float(v.imag)] for v in m.values],
        }
    if isinstance(m, MultiMoments):
        entries = []
        for idx, v in zip(m.indices, m.values):
            if v != 0:
                entries.append([list(idx), float(v.real)])
        return {
            "kind": "multi",
            "dimension": m.dimension,
            "order": m.order,
            "values": entries,
        }
    raise TypeError(f"not a moment container: {type(m)!r}")


def moments_from_json(payload: dict):
    """Parse the moment-file schema back into a container."""
    kind = payload.get("kind")
    if kind == "power":
        support = payload.get("support", "half_line")
        if support == "half_line":
            sup = Support.half_line()
        else:
            sup = Support.interval(float(support[0]), float(support[1]))
        values = np.asarray(payload["values"], dtype=float)
        if values.size == 0:
            raise ValueError("empty moment sequence")
        return PowerMoments(values, sup)
    if kind == "trig":
        raw = payload["values"]
        if len(raw) == 0:
            raise ValueError("empty moment sequence")
        values = np.array([complex(re, im) for re, im in raw])
        return TrigMoments(values)
    if kind == "multi":
        d = int(payload["dimension"])
        order = int(payload["order"])
        entries = {tuple(int(i) for i in idx): float(v) for idx, v in payload["values"]}
        if not entries:
            raise ValueError("empty moment sequence")
        return MultiMoments.from_dict(d, order, entries)
    raise ValueError(f"unknown moment kind {kind!r}")
