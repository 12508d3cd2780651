"""Discretized maximum-entropy reconstruction by cyclic dual ascent.

The density is an exponential family p_j = exp[(A^T alpha)_j - 1] on a fixed
quadrature; moments are matrix products against the weighted density.  Dual
variables are updated one at a time with the multiplicative correction
lambda = log(mu_i / moment_i(alpha)), which converges once the problem has
been preconditioned so that basis values sit in (0, 1) and targets are
positive.  Non-convergence is a meaningful outcome, not an error: moment
sequences of singular measures admit no exponential-family density and the
iteration stalls on them by design.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Quadrature",
    "BasisMatrix",
    "PreconditionMeta",
    "DualSolution",
    "build_quadrature",
    "monomial_basis",
    "legendre_basis",
    "trig_basis",
    "precondition",
    "primal_eval",
    "constraint_residual",
    "fime_solve",
    "solve_power_moments",
    "solve_trig_moments",
    "circle_quadrature",
    "density_on",
    "monomial_dual",
]

EXP_CLAMP = 700.0  # exp() overflows just above this for float64


@dataclass
class Quadrature:
    """Integration nodes and positive weights on an interval."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must be matching 1-D arrays")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")


def build_quadrature(
    a: float, b: float, count: int, rule: str = "gauss"
) -> Quadrature:
    """Composite midpoint or Gauss-Legendre rule mapped to [a, b]."""
    if count < 2:
        raise ValueError("need at least two nodes")
    if b <= a:
        raise ValueError("interval must have positive length")
    if rule == "midpoint":
        h = (b - a) / count
        nodes = a + (np.arange(count) + 0.5) * h
        weights = np.full(count, h)
    elif rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(count)
        nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
        weights = 0.5 * (b - a) * w
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    return Quadrature(nodes, weights, (float(a), float(b)))


@dataclass
class BasisMatrix:
    """Row i holds basis function T_i evaluated at every quadrature node.

    Row 0 is always the constant function carrying the mass constraint.  For
    polynomial bases, `coeff_rows[i]` gives T_i in the monomial frame so the
    density can be evaluated off the quadrature grid; the trigonometric basis
    stores its mode layout instead.
    """

    values: np.ndarray
    kind: str  # "monomial" | "legendre" | "trigonometric"
    quadrature: Quadrature
    coeff_rows: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("basis matrix must be 2-D")
        if self.values.shape[1] != self.quadrature.nodes.size:
            raise ValueError("basis columns must match quadrature nodes")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def rows_at(self, points: np.ndarray) -> np.ndarray:
        """Basis rows evaluated at arbitrary points."""
        points = np.asarray(points, dtype=float)
        if self.kind in ("monomial", "legendre"):
            powers = np.vander(points, N=self.n_rows, increasing=True).T
            if self.kind == "monomial":
                return powers
            return self.coeff_rows @ powers
        # trigonometric: rows 1, cos(k.), sin(k.) for k = 1..M
        m = (self.n_rows - 1) // 2
        rows = [np.ones_like(points)]
        for k in range(1, m + 1):
            rows.append(np.cos(k * points))
            rows.append(np.sin(k * points))
        return np.vstack(rows)


def monomial_basis(quad: Quadrature, order: int) -> BasisMatrix:
    """Rows 1, x, ..., x^order at the quadrature nodes."""
    vals = np.vander(quad.nodes, N=order + 1, increasing=True).T
    return BasisMatrix(vals, "monomial", quad, coeff_rows=np.eye(order + 1))


def legendre_basis(quad: Quadrature, order: int) -> BasisMatrix:
    """Legendre polynomials shifted to the quadrature interval.

    Spans the same space as the monomials, so the maximum-entropy density is
    unchanged, but the near-orthogonal rows cut the dual iteration count by
    orders of magnitude on moment problems that are hopeless in the raw
    monomial frame.  `coeff_rows` converts row i to monomial coefficients.
    """
    a, b = quad.interval
    coeff_rows = np.zeros((order + 1, order + 1))
    affine = np.polynomial.Polynomial([-(b + a) / (b - a), 2.0 / (b - a)])
    for i in range(order + 1):
        leg = np.zeros(i + 1)
        leg[i] = 1.0
        poly = np.polynomial.Polynomial(np.polynomial.legendre.leg2poly(leg))(affine)
        coeff_rows[i, : poly.coef.size] = poly.coef
    vals = coeff_rows @ np.vander(quad.nodes, N=order + 1, increasing=True).T
    return BasisMatrix(vals, "legendre", quad, coeff_rows=coeff_rows)


def trig_basis(quad: Quadrature, max_mode: int) -> BasisMatrix:
    """Rows 1, cos(k.), sin(k.) for k = 1..max_mode."""
    rows = [np.ones_like(quad.nodes)]
    for k in range(1, max_mode + 1):
        rows.append(np.cos(k * quad.nodes))
        rows.append(np.sin(k * quad.nodes))
    return BasisMatrix(np.vstack(rows), "trigonometric", quad)


def circle_quadrature(count: int) -> Quadrature:
    """Uniform grid on [-pi, pi); the trapezoid rule is exact for trig modes."""
    nodes = -np.pi + 2 * np.pi * np.arange(count) / count
    weights = np.full(count, 2 * np.pi / count)
    return Quadrature(nodes, weights, (-np.pi, np.pi))


@dataclass
class PreconditionMeta:
    """Offsets, scales and factors of the affine row conditioning."""

    offsets: np.ndarray  # u_i
    scales: np.ndarray  # M_i
    factors: np.ndarray  # t_i
    delta: float


def precondition(
    a: np.ndarray, mu: np.ndarray, delta: float = 1.0, scale_by_rows: bool = False
) -> tuple[np.ndarray, np.ndarray, PreconditionMeta]:
    """Affine remap of rows and targets into the convergent regime.

    u_i = -min_j a_ij + delta,  M_i = max_j (u_i + a_ij),  t_i = 1/(M_i+delta),
    a'_ij = t_i (u_i + a_ij),   mu'_i = t_i (u_i + mu_i).

    Afterwards a'_ij lies in (0, 1) and mu'_i > 0 provided mu_i > -u_i, which
    holds whenever mu is normalized so that the mass entry is one and the
    remaining entries are means of basis functions.  A density solving the
    conditioned problem solves the original one: the remap is affine and the
    constant row absorbs the offsets.

    scale_by_rows switches to the historical factor t_i = 1/(n (M_i+delta))
    with n the row count; kept for comparison, converges noticeably slower.
    """
    a = np.asarray(a, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if delta <= 0:
        raise ValueError("delta must be positive")
    spread = a.max(axis=1) - a.min(axis=1)
    if np.any((spread == 0) & (a.max(axis=1) == 0)):
        raise ValueError("a basis row is identically zero")
    u = -a.min(axis=1) + delta
    m = (a + u[:, None]).max(axis=1)
    t = 1.0 / (m + delta)
    if scale_by_rows:
        t = t / a.shape[0]
    a_prime = t[:, None] * (a + u[:, None])
    mu_prime = t * (u + mu)
    if np.any(mu_prime <= 0):
        raise ValueError("conditioned moments are not all positive")
    return a_prime, mu_prime, PreconditionMeta(u, m, t, float(delta))


@dataclass
class DualSolution:
    """Converged (or stalled) dual variables of a maxent problem.

    `alpha` is expressed against the rows of `basis`, already unwound from
    the preconditioned frame, so `primal_eval(alpha, basis)` is the density
    matching the original, unnormalized moments.
    """

    alpha: np.ndarray
    converged: bool
    iterations: int
    residual_norm: float
    basis: BasisMatrix
    clipped: bool = False

    def report(self) -> dict:
        return {
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "residual_norm": float(self.residual_norm),
            "alpha": [float(v) for v in self.alpha],
        }


def primal_eval(
    alpha: np.ndarray, basis: BasisMatrix
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Density p_j = exp[(A^T alpha)_j - 1] and its weighted version.

    Exponents are clamped at EXP_CLAMP to keep runaway duals finite; the
    returned flag reports whether clamping fired.
    """
    s = basis.values.T @ np.asarray(alpha, dtype=float) - 1.0
    clipped = bool(np.any(s > EXP_CLAMP))
    p = np.exp(np.minimum(s, EXP_CLAMP))
    return basis.quadrature.weights * p, p, clipped


def constraint_residual(
    alpha: np.ndarray, basis: BasisMatrix, mu: np.ndarray
) -> tuple[np.ndarray, float]:
    """Moment mismatch h_i = moment_i(alpha) - mu_i and its Euclidean norm."""
    ptilde, _, _ = primal_eval(alpha, basis)
    h = basis.values @ ptilde - np.asarray(mu, dtype=float)
    return h, float(np.linalg.norm(h))


def fime_solve(
    basis: BasisMatrix,
    mu: np.ndarray,
    tol: float = 1e-10,
    max_sweeps: int = 100_000,
    delta: float = 1.0,
    seed: int | None = None,
) -> DualSolution:
    """Cyclic multiplicative dual ascent on the preconditioned problem.

    Each step picks the next row cyclically and shifts its dual by
    log(mu'_i / moment'_i).  The stopping rule is the unconditioned residual
    |A ptilde - mu| < tol, measured on the caller's original moment scale.
    `max_sweeps` counts individual coordinate updates; exhausting them
    returns converged=False rather than raising, because stalling is how
    infeasible (singular-measure) inputs manifest.

    Moments are normalized by the mass entry mu_0 internally; the returned
    alpha is mapped back to the caller's basis rows and scale.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size != basis.n_rows:
        raise ValueError("moment vector must match basis rows")
    if mu[0] <= 0:
        raise ValueError("mass entry mu_0 must be positive")
    mu0 = mu[0]
    mu_hat = mu / mu0
    a_prime, mu_prime, meta = precondition(basis.values, mu_hat, delta)
    n_rows = basis.n_rows
    weights = basis.quadrature.weights

    rng = np.random.default_rng(seed)
    alpha = (
        np.zeros(n_rows) if seed is None else rng.uniform(-0.5, 0.5, size=n_rows)
    )
    s = a_prime.T @ alpha
    clipped = False

    def to_native(a: np.ndarray) -> np.ndarray:
        # unwind the affine preconditioning and the mass normalization:
        # (A'^T a)_j = sum_i t_i a_i a_ij + sum_i t_i u_i a_i, and scaling
        # the density by mu0 shifts the constant-row dual by log(mu0)
        out = meta.factors * a
        out[0] += float(np.sum(a * meta.factors * meta.offsets)) + np.log(mu0)
        return out

    k = 0
    res_norm = np.inf
    while k < max_sweeps:
        for i in range(n_rows):
            exponent = s - 1.0
            if exponent.max() > EXP_CLAMP:
                clipped = True
                exponent = np.minimum(exponent, EXP_CLAMP)
            ptilde = weights * np.exp(exponent)
            lam = np.log(mu_prime[i] / (a_prime[i] @ ptilde))
            alpha[i] += lam
            s += lam * a_prime[i]
            k += 1
            if k >= max_sweeps:
                break
        # stop on the same residual that is reported: the unconditioned
        # moment mismatch of the unwound dual, on the caller's scale
        _, res_norm = constraint_residual(to_native(alpha), basis, mu)
        if res_norm < tol:
            break
        s = a_prime.T @ alpha  # refresh against incremental drift

    alpha_native = to_native(alpha)
    _, res_norm = constraint_residual(alpha_native, basis, mu)
    converged = res_norm < tol
    if clipped:
        warnings.warn("primal exponent clamped during dual ascent", RuntimeWarning)
    return DualSolution(alpha_native, converged, k, res_norm, basis, clipped)


def solve_power_moments(
    mu: np.ndarray,
    interval: tuple[float, float],
    node_count: int = 301,
    tol: float = 1e-8,
    max_sweeps: int = 500_000,
    delta: float = 1.0,
    rule: str = "gauss",
    seed: int | None = None,
) -> DualSolution:
    """Maxent density on an interval matching power moments mu_0..mu_N.

    The dual ascent runs in the shifted-Legendre frame: the targets are
    transformed exactly (mu_leg = C mu), the density is unchanged, and the
    near-orthogonal rows converge orders of magnitude faster than raw
    monomial rows.  The returned solution lives in that frame (alpha, basis,
    residual all consistent); use `monomial_dual` for the polynomial
    coefficients of log density + 1, and `constraint_residual` against a
    `monomial_basis` to measure the mismatch on the original moment scale.
    """
    mu = np.asarray(mu, dtype=float)
    order = mu.size - 1
    quad = build_quadrature(interval[0], interval[1], node_count, rule)
    basis = legendre_basis(quad, order)
    mu_leg = basis.coeff_rows @ mu
    return fime_solve(
        basis, mu_leg, tol=tol, max_sweeps=max_sweeps, delta=delta, seed=seed
    )


def monomial_dual(solution: DualSolution) -> np.ndarray:
    """Dual variables re-expressed against monomial rows 1, x, x^2, ..."""
    if solution.basis.kind == "monomial":
        return solution.alpha.copy()
    if solution.basis.kind == "legendre":
        return solution.basis.coeff_rows.T @ solution.alpha
    raise ValueError("no monomial view of a trigonometric dual")


def solve_trig_moments(
    tau_phi: np.ndarray,
    node_count: int = 1024,
    tol: float = 1e-8,
    max_sweeps: int = 500_000,
    delta: float = 1.0,
    seed: int | None = None,
) -> DualSolution:
    """Maxent density on the circle matching trigonometric moments.

    tau_phi holds complex moments tau(0)..tau(M) with
    tau(k) = (1/2pi) integral exp(-ik theta) phi(theta) dtheta; the real
    constraint vector pairs cosine and sine moments mode by mode.
    """
    tau = np.asarray(tau_phi, dtype=complex)
    m = tau.size - 1
    quad = circle_quadrature(node_count)
    basis = trig_basis(quad, m)
    mu = np.empty(2 * m + 1)
    mu[0] = 2 * np.pi * tau[0].real
    for k in range(1, m + 1):
        mu[2 * k - 1] = 2 * np.pi * tau[k].real
        mu[2 * k] = -2 * np.pi * tau[k].imag
    return fime_solve(basis, mu, tol=tol, max_sweeps=max_sweeps, delta=delta, seed=seed)


def density_on(solution: DualSolution, points: np.ndarray) -> np.ndarray:
    """Evaluate the solved density at arbitrary points of its domain."""
    rows = solution.basis.rows_at(np.asarray(points, dtype=float))
    s = rows.T @ solution.alpha - 1.0
    return np.exp(np.minimum(s, EXP_CLAMP))
