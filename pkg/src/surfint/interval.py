"""Exact negative spectrum of the interaction operator on an interval.

The operator acts as -psi'' on (-d, 0) u (0, d) with Neumann ends
psi'(+-d) = 0 and the four-parameter matching conditions at the origin
(psi_- denotes the left branch, psi_+ the right one, primes are one-sided
limits at 0):

    psi_-'(0) - psi_+'(0) = (alpha/2) (psi_-(0) + psi_+(0))
                            + (gamma/2) (psi_-'(0) + psi_+'(0))
    psi_-(0) - psi_+(0)   = -(conj(gamma)/2) (psi_-(0) + psi_+(0))
                            + (beta/2) (psi_-'(0) + psi_+'(0))

A negative eigenvalue lambda = -k^2 (k > 0) exists iff g(k) = h(k) j(k)
with

    g(k) = |gamma|^2 k (1 - e^{4kd})
    h(k) = (-2 alpha - 4 k) e^{-2kd} - 2 alpha + 4 k
    j(k) = e^{2kd} (1 + beta k / 2) + e^{4kd} (1 - beta k / 2)

Scanning uses the overflow-free rescaling
F(k) = e^{-4kd} (g - h j) = A e^{-4kd} + B e^{-2kd} + C with polynomial
coefficients (see :func:`characteristic_scaled`); F and g - h j have the
same zeros on k > 0.

Root structure for alpha, beta >= 0 (used as a built-in cross-check):

    alpha == 0 and beta == 0      -> 0 roots (any gamma)
    beta == 0, alpha > 0          -> 1 root
    beta > 0,  alpha == 0         -> 1 root
    beta > 0,  alpha > 0          -> 2 roots, except the degenerate case
    gamma == 0 and alpha*beta == 4 -> 1 root (double zero of F, no sign
                                      change; located on the factor h alone)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketFailure,
    NotAnEigenvalue,
    ScanTooCoarse,
    ValidationError,
)
from . import core

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class IntervalProblem:
    """Interval (-d, d) with the four-parameter interaction at 0."""

    alpha: float
    beta: float
    gamma: complex
    d: float

    def __post_init__(self):
        problems = []
        if complex(self.alpha).imag != 0.0:
            problems.append(f"alpha must be real, got {self.alpha!r}")
        if complex(self.beta).imag != 0.0:
            problems.append(f"beta must be real, got {self.beta!r}")
        if not (self.d > 0.0):
            problems.append(f"half-width d must be positive, got {self.d!r}")
        if problems:
            raise ValidationError(problems)
        object.__setattr__(self, "alpha", float(complex(self.alpha).real))
        object.__setattr__(self, "beta", float(complex(self.beta).real))
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "d", float(self.d))


@dataclass(frozen=True)
class RootBracket:
    k_lo: float
    k_hi: float


@dataclass(frozen=True)
class IntervalSpectrum:
    """Negative spectrum of an interval problem.

    eigenvalues: ascending (deepest first); ks: the matching k > 0 values
    (descending, lambda_i = -ks_i^2); m_interval: min(0, lowest
    eigenvalue); diagnostics: scan metadata (brackets, residuals, grid,
    k_max, expected structural count, degeneracy flag).
    """

    eigenvalues: tuple
    ks: tuple
    m_interval: float
    diagnostics: dict


def characteristic_ghj(k, prob):
    """Raw factors (g, h, j) of the eigenvalue condition g = h*j.

    Grows like e^{4kd}; use :func:`characteristic_scaled` for scanning.
    All three are real for real k.
    """
    k = np.asarray(k, dtype=float)
    a, b, d = prob.alpha, prob.beta, prob.d
    g2 = abs(prob.gamma) ** 2
    g = g2 * k * (1.0 - np.exp(4.0 * k * d))
    h = (-2.0 * a - 4.0 * k) * np.exp(-2.0 * k * d) - 2.0 * a + 4.0 * k
    j = np.exp(2.0 * k * d) * (1.0 + b * k / 2.0) + np.exp(4.0 * k * d) * (1.0 - b * k / 2.0)
    if g.ndim == 0:
        return float(g), float(h), float(j)
    return g, h, j


def characteristic_scaled(k, prob):
    """Overflow-free characteristic F(k) = e^{-4kd} (g - h j).

    F(k) = A(k) e^{-4kd} + B(k) e^{-2kd} + C(k) with

        A(k) = (alpha + 2k)(2 + beta k) + k |gamma|^2
        B(k) = 4 (alpha - beta k^2)
        C(k) = -(alpha - 2k)(-2 + beta k) - k |gamma|^2

    F(0) = 8 alpha; as k -> inf, F -> +inf when beta > 0 and -inf when
    beta == 0 (for alpha, |gamma| fixed).  Negative eigenvalues of the
    interval operator are exactly lambda = -k^2 with F(k) = 0, k > 0.
    """
    k = np.asarray(k, dtype=float)
    a, b, d = prob.alpha, prob.beta, prob.d
    g2 = abs(prob.gamma) ** 2
    A = (a + 2.0 * k) * (2.0 + b * k) + k * g2
    B = 4.0 * (a - b * k * k)
    C = -(a - 2.0 * k) * (-2.0 + b * k) - k * g2
    F = A * np.exp(-4.0 * k * d) + B * np.exp(-2.0 * k * d) + C
    if F.ndim == 0:
        return float(F)
    return F


def matching_matrix(k, prob):
    """4x4 complex matrix of the eigenvalue ansatz coefficients.

    Columns weight (A, B, C, D) in psi_-(x) = A e^{-kx} + B e^{kx} on
    (-d, 0) and psi_+(x) = C e^{-kx} + D e^{kx} on (0, d).  Rows: the two
    interaction conditions at 0, then the Neumann conditions at -d and d.
    lambda = -k^2 is an eigenvalue iff the determinant vanishes.
    """
    a, b, d = prob.alpha, prob.beta, prob.d
    g = complex(prob.gamma)
    cg = g.conjugate()
    ekd = math.exp(k * d)
    emkd = math.exp(-k * d)
    return np.array(
        [
            [
                a / 2 + k * (1 - g / 2),
                a / 2 - k * (1 - g / 2),
                a / 2 - k * (1 + g / 2),
                a / 2 + k * (1 + g / 2),
            ],
            [
                -b * k / 2 - (1 + cg / 2),
                b * k / 2 - (1 + cg / 2),
                -b * k / 2 + (1 - cg / 2),
                b * k / 2 + (1 - cg / 2),
            ],
            [-k * ekd, k * emkd, 0.0, 0.0],
            [0.0, 0.0, -k * emkd, k * ekd],
        ],
        dtype=complex,
    )


def determinant_oracle(k, prob):
    """Determinant of :func:`matching_matrix`, returned as a real number.

    Satisfies det = -(1/2) e^{-2kd} k^2 (g - h j); in particular its sign
    changes exactly at the zeros of the characteristic.  The imaginary
    part is a rounding artifact and is checked to be negligible.
    """
    det = np.linalg.det(matching_matrix(k, prob))
    scale = abs(det) + 1e-300
    if abs(det.imag) > 1e-8 * scale:
        raise ValidationError(
            f"determinant at k={k} has unexpected imaginary part {det.imag!r}"
        )
    return float(det.real)


def expected_root_count(prob):
    """Structural number of negative eigenvalues, or None if out of scope.

    Valid for alpha >= 0 and beta >= 0; other sign regimes return None
    (the scan then reports whatever it finds without a census check).
    """
    a, b = prob.alpha, prob.beta
    if a < 0.0 or b < 0.0:
        return None
    if a == 0.0 and b == 0.0:
        return 0
    if b == 0.0 or a == 0.0:
        return 1
    if is_degenerate(prob):
        return 1
    return 2


def is_degenerate(prob):
    """True when gamma == 0 and alpha*beta == 4 (within 1e-12).

    There the characteristic has a double zero that touches the axis
    without a sign change, so the root must be located on the factor h.
    """
    return (
        prob.gamma == 0
        and prob.alpha > 0.0
        and prob.beta > 0.0
        and abs(prob.alpha * prob.beta - 4.0) <= DEGENERATE_TOL
    )


def _bisect(f, lo, hi, flo, tol):
    """Plain bisection of a bracketing interval; returns (root, bracket)."""
    if not (lo < hi):
        raise BracketFailure(f"empty bracket ({lo}, {hi})")
    bracket = RootBracket(lo, hi)
    for _ in range(300):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            lo = hi = mid
            break
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    else:
        raise BracketFailure(f"bisection stalled on ({lo}, {hi})")
    return 0.5 * (lo + hi), bracket


def _degenerate_root(prob, tol):
    """Root of h(k) = 0 for the touching (double-zero) case."""

    def h(k):
        return characteristic_ghj(k, prob)[1]

    lo, flo = 0.0, -4.0 * prob.alpha
    hi = max(1.0, prob.alpha / 2.0)
    for _ in range(80):
        if h(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise BracketFailure("could not bracket the degenerate root of h")
    return _bisect(h, lo, hi, flo, tol)


def negative_spectrum(prob, k_max=None, grid=2048, tol=1e-12):
    """All negative eigenvalues lambda = -k^2 of the interval operator.

    Scans F = characteristic_scaled on a uniform k grid over (0, k_max],
    bisects every sign change to |Delta k| <= tol, and cross-checks the
    root count against :func:`expected_root_count` when alpha, beta >= 0.
    On a shortfall the scan window is extended (k_max doubled, up to three
    times, keeping the grid spacing) and then the grid is refined (4x, up
    to three times); if the census still fails, ScanTooCoarse is raised.

    k_max defaults to 2 (sqrt(-m_infinity) + 1), which covers every root
    for alpha, beta >= 0 at moderate d; for other sign regimes k_max must
    be given explicitly.
    """
    if grid < 16:
        raise ValidationError(f"grid must be at least 16, got {grid}")
    if k_max is None:
        if prob.alpha < 0.0 or prob.beta < 0.0:
            raise ValidationError(
                "k_max must be given explicitly when alpha or beta is negative"
            )
        m_inf = core.m_infinity(prob.alpha, prob.beta, prob.gamma)
        k_max = 2.0 * (math.sqrt(-m_inf) + 1.0)
    if not (k_max > 0.0):
        raise ValidationError(f"k_max must be positive, got {k_max}")

    census = expected_root_count(prob)
    degenerate = is_degenerate(prob)

    def f(k):
        return characteristic_scaled(k, prob)

    roots = []
    brackets = []
    attempts = 0
    if degenerate:
        root, bracket = _degenerate_root(prob, tol)
        roots, brackets = [root], [bracket]
        attempts = 1
        scan_k_max, scan_grid = k_max, grid
    else:
        extensions = 0
        refinements = 0
        scan_k_max, scan_grid = float(k_max), int(grid)
        while True:
            attempts += 1
            roots, brackets = _scan_roots(f, prob.alpha, scan_k_max, scan_grid, tol)
            if census is None or len(roots) >= census:
                break
            if extensions < 3:
                extensions += 1
                scan_k_max *= 2.0
                scan_grid *= 2  # keep the grid spacing while widening
                continue
            if refinements < 3:
                refinements += 1
                scan_grid *= 4
                continue
            raise ScanTooCoarse(
                f"found {len(roots)} roots, structural count is {census} "
                f"(k_max={scan_k_max}, grid={scan_grid}); coupling may be "
                "near-degenerate"
            )

    order = np.argsort([-k for k in roots])  # deepest eigenvalue first
    ks = tuple(roots[i] for i in order)
    eigenvalues = tuple(-k * k for k in ks)
    residuals = tuple(abs(f(k)) for k in ks)
    m_d = eigenvalues[0] if eigenvalues else 0.0
    diagnostics = {
        "root_count": len(ks),
        "census_expected": census,
        "degenerate": degenerate,
        "grid": int(scan_grid),
        "k_max": float(scan_k_max),
        "brackets": tuple(brackets[i] for i in order),
        "residuals": residuals,
        "scan_attempts": attempts,
    }
    return IntervalSpectrum(eigenvalues, ks, min(0.0, m_d), diagnostics)


def _scan_roots(f, alpha, k_max, grid, tol):
    ks = np.linspace(0.0, k_max, grid + 1)
    vals = f(ks[1:])
    # F(0) = 8 alpha: use it as a sentinel so a root inside the first cell
    # is caught when alpha > 0; for alpha == 0 the zero at k = 0 is not an
    # eigenvalue and must not seed a bracket.
    if alpha > 0.0:
        kk = ks
        vv = np.concatenate(([8.0 * alpha], vals))
    else:
        kk = ks[1:]
        vv = vals
    roots, brackets = [], []
    for i in np.nonzero(np.sign(vv[:-1]) * np.sign(vv[1:]) < 0)[0]:
        root, bracket = _bisect(f, float(kk[i]), float(kk[i + 1]), float(vv[i]), tol)
        roots.append(root)
        brackets.append(bracket)
    for i in np.nonzero(vv == 0.0)[0]:
        k = float(kk[i])
        if k > 0.0 and all(abs(k - r) > tol * 10 for r in roots):
            roots.append(k)
            brackets.append(RootBracket(k, k))
    return roots, brackets


def m_interval(prob, **kwargs):
    """min(0, lowest negative eigenvalue) on the interval (-d, d)."""
    return negative_spectrum(prob, **kwargs).m_interval


def m_interval_perturbed(prob, n_tau, **kwargs):
    """m_interval for the rescaled coupling (alpha/n, gamma; n*beta).

    The family weakens the diagonal interaction while keeping the
    off-diagonal part fixed; as n_tau grows the lowest eigenvalue rises
    to 0 when beta > 0.
    """
    if n_tau <= 0:
        raise ValidationError(f"n_tau must be positive, got {n_tau}")
    scaled = IntervalProblem(prob.alpha / n_tau, prob.beta * n_tau, prob.gamma, prob.d)
    return m_interval(scaled, **kwargs)


def eigenfunction_coefficients(k_root, prob, tol=1e-6):
    """Coefficients (A, B, C, D) of the eigenfunction at lambda = -k_root^2.

    The vector spans the null space of the (row-normalized) matching
    matrix, with the Neumann end relations A = B e^{-2kd}, D = C e^{-2kd}
    enforced exactly to avoid amplifying rounding in the exponentially
    small components.  The result is normalized to unit L^2 norm with the
    phase fixed so the largest component is real positive.

    Raises NotAnEigenvalue when the smallest singular value exceeds
    tol times the largest (k_root is not a spectral point), or when the
    matching conditions are violated beyond 1e-8 in relative residual.
    """
    k = float(k_root)
    if not (k > 0.0):
        raise ValidationError(f"k_root must be positive, got {k_root}")
    mat = matching_matrix(k, prob)
    norms = np.linalg.norm(mat, axis=1)
    scaled = mat / norms[:, None]
    _, svals, vh = np.linalg.svd(scaled)
    if svals[-1] > tol * svals[0]:
        raise NotAnEigenvalue(
            f"matching matrix at k={k} has relative smallest singular value "
            f"{svals[-1] / svals[0]:.3e} > {tol:.1e}"
        )
    v = vh[-1].conjugate()
    e2 = math.exp(-2.0 * k * prob.d)
    A, B, C, D = v
    A, D = B * e2, C * e2  # exact Neumann end relations
    v = np.array([A, B, C, D])
    resid = np.max(np.abs(scaled @ v)) / np.linalg.norm(v)
    if resid > 1e-8:
        raise NotAnEigenvalue(
            f"matching residual {resid:.3e} > 1e-08 at k={k}"
        )
    # ||psi||^2 = [(1 - e^{-4kd})/(2k) + 2 d e^{-2kd}] (|B|^2 + |C|^2)
    w = (1.0 - e2 * e2) / (2.0 * k) + 2.0 * prob.d * e2
    nrm = math.sqrt(w * (abs(B) ** 2 + abs(C) ** 2))
    v = v / nrm
    i = int(np.argmax(np.abs(v)))
    phase = v[i] / abs(v[i])
    v = v / phase
    return tuple(complex(x) for x in v)
