"""Root analysis and convergence classification of difference formulas.

A look-ahead formula is convergent exactly when its characteristic
polynomial satisfies the root condition: every root inside the closed unit
disk and every root on the unit circle simple.  Because p(1) = 0 by
construction, 1 is always a root and the decisive quantity is the largest
magnitude among the rest — in particular the second-largest magnitude
overall, which also sets the asymptotic decay rate of the formula's
parasitic modes.

Roots come from ``numpy.roots`` (companion-matrix eigenvalues), which is
backward stable: each computed root is an exact root of a polynomial whose
coefficients are a tiny relative perturbation of the input.  The residual
contract checked in the test suite is |p(z)| <= 1e-8 * ||p||_1 * max(1,|z|)^n
for every reported root z.

The search entry point is :func:`objective_function`, which maps a seed to
the maximum root magnitude of its formula and absorbs every degenerate
outcome into a large penalty so the optimizer sees a total function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .taylor_system import (
    Dimensions,
    NonNormalizableSeedError,
    echelon_block,
    nullvector_to_formula,
    seed_to_nullvector,
    DifferenceFormula,
)

__all__ = [
    "CIRCLE_TOL",
    "ACCEPT_TOL",
    "CLUSTER_TOL",
    "PENALTY",
    "DegenerateInputError",
    "RootReport",
    "find_roots",
    "analyze",
    "analyze_formula",
    "objective_function",
    "objective",
]

# |z| within this of 1 counts as "on the unit circle".
CIRCLE_TOL = 1e-9
# Convergence accepts max magnitude up to 1 + ACCEPT_TOL.
ACCEPT_TOL = 1e-9
# Two circle roots closer than this are treated as a repeated root.
CLUSTER_TOL = 1e-6
# Objective value assigned to seeds that break the pipeline.
PENALTY = 1e6


class DegenerateInputError(ValueError):
    """Polynomial input with no usable leading coefficient."""


@dataclass(frozen=True)
class RootReport:
    """Root-condition snapshot of one characteristic polynomial."""

    roots: tuple
    max_magnitude: float
    max_deviation: float
    second_magnitude: float
    on_circle: tuple
    convergent: bool


def _coeffs(p) -> np.ndarray:
    a = np.asarray(p, dtype=complex)
    if np.isrealobj(np.asarray(p)) or np.all(a.imag == 0):
        a = a.real.astype(float)
    if a.ndim != 1 or a.size < 2:
        raise DegenerateInputError("need at least two polynomial coefficients")
    if not np.all(np.isfinite(a)):
        raise DegenerateInputError("polynomial coefficients must be finite")
    if a[0] == 0:
        raise DegenerateInputError("leading coefficient is zero")
    return a


def find_roots(p) -> np.ndarray:
    """All roots of the polynomial ``p`` (descending powers), sorted by
    magnitude descending with (real, imag) as tie-breakers."""
    a = _coeffs(p)
    r = np.roots(a).astype(complex)  # np.roots stays real when no root is complex
    order = np.lexsort((r.imag, r.real, -np.abs(r)))
    return r[order]


def analyze(
    p,
    *,
    circle_tol: float = CIRCLE_TOL,
    accept_tol: float = ACCEPT_TOL,
    cluster_tol: float = CLUSTER_TOL,
) -> RootReport:
    """Classify the root condition of the polynomial ``p``.

    max_deviation is max|root| - 1 (signed: negative means strictly inside
    the disk).  second_magnitude is |roots[1]| of the descending-magnitude
    sort, so a repeated dominant root counts with multiplicity; for a
    degree-1 polynomial it is 0.  on_circle lists the indices of roots with
    ||z| - 1| <= circle_tol, and convergence requires the max magnitude
    below 1 + accept_tol with no two circle roots within cluster_tol of
    each other.
    """
    roots = find_roots(p)
    mags = np.abs(roots)
    max_mag = float(mags[0])
    second = float(mags[1]) if roots.size > 1 else 0.0
    on_circle = tuple(int(i) for i in np.flatnonzero(np.abs(mags - 1.0) <= circle_tol))

    convergent = max_mag <= 1.0 + accept_tol
    if convergent:
        circ = roots[list(on_circle)]
        for i in range(len(circ)):
            for j in range(i + 1, len(circ)):
                if abs(circ[i] - circ[j]) <= cluster_tol:
                    convergent = False
                    break
            if not convergent:
                break

    return RootReport(
        roots=tuple(roots),
        max_magnitude=max_mag,
        max_deviation=max_mag - 1.0,
        second_magnitude=second,
        on_circle=on_circle,
        convergent=convergent,
    )


def analyze_formula(formula: DifferenceFormula, **kw) -> RootReport:
    """Root report of a formula's characteristic polynomial."""
    return analyze([float(v) for v in formula.p], **kw)


def objective_function(
    dims: Dimensions, *, penalty: float = PENALTY
) -> Callable[[np.ndarray], float]:
    """Seed -> max root magnitude, packaged for a numerical minimizer.

    Degenerate seeds (zero, non-finite, non-normalizable, or breaking the
    eigenvalue solve) score ``penalty`` instead of raising, so the search
    can roam freely.  Values below 1 are impossible — p(1) = 0 pins a root
    at 1 — which makes 1 the global floor of the landscape.

    This closure is the innermost loop of the whole search (hundreds of
    thousands of calls per session), so it works on a preallocated
    companion matrix instead of going through the formula/report objects;
    the result agrees with ``analyze_formula(seed_to_formula(...))``.
    Each returned closure carries private scratch buffers: share one
    closure freely within a thread, but give each thread its own.
    """
    block = echelon_block(dims)
    bf = block.b_float
    s = dims.s
    d = dims.degree
    rtol = 1e-12  # matches the float-path normalization threshold

    # Companion matrix of the (monic) characteristic polynomial; only the
    # first row changes between calls.
    comp = np.zeros((d, d))
    idx = np.arange(d - 1)
    comp[idx + 1, idx] = 1.0
    q = np.empty(d)

    def f(y: np.ndarray) -> float:
        yv = np.asarray(y, dtype=float)
        if yv.shape != (s,) or not np.all(np.isfinite(yv)) or not np.any(yv):
            return penalty
        np.matmul(bf, yv, out=q[: d - s])
        np.negative(q[: d - s], out=q[: d - s])
        q[d - s :] = yv
        lead = q[0]
        if abs(lead) < rtol * np.abs(q).max():
            return penalty
        np.divide(q, lead, out=q)
        # p = [1, -sum(q), q[1:]] -> companion first row is -p[1:]
        comp[0, 0] = q.sum()
        comp[0, 1:] = -q[1:]
        try:
            roots = np.linalg.eigvals(comp)
        except np.linalg.LinAlgError:
            return penalty
        val = float(np.abs(roots).max())
        return val if np.isfinite(val) else penalty

    return f


def objective(dims: Dimensions, y, *, penalty: float = PENALTY) -> float:
    """One-off evaluation of :func:`objective_function`."""
    return objective_function(dims, penalty=penalty)(np.asarray(y, dtype=float))
