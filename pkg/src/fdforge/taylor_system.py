"""Seed-driven construction of one-step-ahead finite difference formulas.

A look-ahead formula predicts the next state x_{j+1} from the current and
earlier states x_j, ..., x_{j-ell} plus the current derivative dx_j, so the
next value is available before its time instant arrives.  The construction
runs in two stages:

1. Write the Taylor expansions of x_{j+1}, x_{j-1}, ..., x_{j-ell} around
   t_j and collect the coefficients of the derivative orders 2 .. k+1 into
   a (k+s) x k matrix of exact rationals (signed integer powers over
   factorials).
2. Any vector in the left null space of that matrix combines the expansions
   so that every higher derivative cancels.  The null space has dimension s
   and is parameterized by a length-s seed vector through the reduced row
   echelon form [I | B] of the transposed matrix: the seed fills the free
   variables, the B block completes the pivot variables.

The normalized null vector q (q[0] = 1) yields the characteristic
polynomial p = [1, -sum(q), q[1], ..., q[k+s-1]] of the difference equation

    x_{j+1} + p[1]*x_j + ... + p[k+s]*x_{j-k-s+1} = c * tau * dx_j,

with derivative weight c = 1 - sum(i * q[i], i = 1 .. k+s-1).  Cancelling
derivatives 2 .. k+1 leaves a defect of order tau^(k+2), so the formula is
exact on polynomials of degree <= k+1.

Matrix build, echelon reduction, and the exact formula path all use
``fractions.Fraction``: the entries are factorial-denominator rationals and
exact arithmetic is what makes the structural identities p(1) = 0 and
p'(1) = c hold identically.  A float64 mirror of the seed-to-polynomial map
feeds the root-magnitude minimization, which only needs speed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence, Union

import numpy as np

__all__ = [
    "K_LIMIT",
    "Dimensions",
    "TaylorMatrix",
    "EchelonBlock",
    "DifferenceFormula",
    "RankDeficientError",
    "PivotDisplacementError",
    "NonNormalizableSeedError",
    "build_taylor_matrix",
    "reduce_to_echelon",
    "echelon_block",
    "seed_to_nullvector",
    "nullvector_to_formula",
    "seed_to_formula",
]

# Guard against factorial blowup of the matrix entries; override per instance.
K_LIMIT = 8

# A float-path null vector is unusable when its leading entry is this small
# relative to the largest entry.
NORMALIZE_RTOL = 1e-12


class RankDeficientError(ArithmeticError):
    """The Taylor coefficient matrix lost rank during reduction."""


class PivotDisplacementError(ArithmeticError):
    """Echelon pivots left the leading columns, so no [I | B] block exists."""


class NonNormalizableSeedError(ValueError):
    """The seed spawns a null vector whose leading entry is (near) zero."""


@dataclass(frozen=True)
class Dimensions:
    """Problem size of a formula family.

    k is the number of derivative orders to cancel (orders 2 .. k+1), s the
    seed length.  Everything else is derived: the formula reaches back to
    x_{j-ell} with ell = k+s-1, its characteristic polynomial has degree
    k+s, and the nominal truncation order is k+2.
    """

    k: int
    s: int
    allow_large_k: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.s < 1:
            raise ValueError(f"s must be a positive integer, got {self.s}")
        if self.k > K_LIMIT and not self.allow_large_k:
            raise ValueError(
                f"k = {self.k} exceeds the factorial-growth guard k <= {K_LIMIT}; "
                "pass allow_large_k=True to override"
            )
        if self.s < self.k:
            warnings.warn(
                f"s = {self.s} < k = {self.k}: seeds shorter than k rarely reach "
                "convergent formulas; s >= k is recommended",
                stacklevel=2,
            )

    @property
    def ell(self) -> int:
        return self.k + self.s - 1

    @property
    def m(self) -> int:
        return self.k + 1

    @property
    def degree(self) -> int:
        return self.k + self.s

    @property
    def order(self) -> int:
        return self.k + 2


@dataclass(frozen=True)
class TaylorMatrix:
    """(k+s) x k grid of exact Taylor coefficients for derivatives 2 .. k+1."""

    dims: Dimensions
    rows: tuple


@dataclass(frozen=True)
class EchelonBlock:
    """The k x s non-identity block B of the reduced echelon form [I | B]."""

    dims: Dimensions
    b: tuple

    @cached_property
    def b_float(self) -> np.ndarray:
        """float64 copy of B for the optimizer's hot loop."""
        return np.array([[float(v) for v in row] for row in self.b], dtype=float)


@dataclass(frozen=True)
class DifferenceFormula:
    """A look-ahead difference formula in characteristic polynomial form.

    p holds the k+s+1 polynomial coefficients, highest power first and
    normalized to p[0] = 1; c is the weight of tau * dx_j.  Coefficients are
    all Fraction (exact path) or all float (float path).  dims is None for
    formulas entered by hand rather than generated from a seed.
    """

    dims: Union[Dimensions, None]
    p: tuple
    c: Union[float, Fraction]

    @property
    def degree(self) -> int:
        return len(self.p) - 1

    @property
    def exact(self) -> bool:
        return isinstance(self.c, Fraction)

    def as_float(self) -> "DifferenceFormula":
        return DifferenceFormula(self.dims, tuple(float(v) for v in self.p), float(self.c))


def build_taylor_matrix(dims: Dimensions) -> TaylorMatrix:
    """Assemble the exact (k+s) x k coefficient matrix.

    Row 1 belongs to x_{j+1}: entry v is 1/(v+1)!.  Row u >= 2 belongs to
    x_{j-(u-1)}: entry v is (-(u-1))^(v+1) / (v+1)!.
    """
    k = dims.k
    rows = []
    for u in range(1, dims.degree + 1):
        base = 1 if u == 1 else -(u - 1)
        rows.append(
            tuple(Fraction(base ** (v + 1), math.factorial(v + 1)) for v in range(1, k + 1))
        )
    return TaylorMatrix(dims, tuple(rows))


def reduce_to_echelon(a: TaylorMatrix) -> EchelonBlock:
    """Reduce the transpose of ``a`` to [I | B] in exact rational arithmetic.

    Raises RankDeficientError if the rank drops below k and
    PivotDisplacementError if the pivots do not occupy the first k columns
    (either would break the seed -> null vector map).
    """
    dims = a.dims
    k, n = dims.k, dims.degree
    mat = [[a.rows[r][c] for r in range(n)] for c in range(k)]

    piv_cols = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, k) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = mat[row][col]
        mat[row] = [x / inv for x in mat[row]]
        for r in range(k):
            if r != row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[row])]
        piv_cols.append(col)
        row += 1
        if row == k:
            break

    if row < k:
        raise RankDeficientError(
            f"coefficient matrix for k={k}, s={dims.s} has rank {row} < {k}"
        )
    if piv_cols != list(range(k)):
        raise PivotDisplacementError(
            f"echelon pivots fell in columns {piv_cols}, expected the first {k}"
        )
    return EchelonBlock(dims, tuple(tuple(r[k:]) for r in mat))


@lru_cache(maxsize=None)
def echelon_block(dims: Dimensions) -> EchelonBlock:
    """Cached build + reduction; the search loop hits this once per dims."""
    return reduce_to_echelon(build_taylor_matrix(dims))


def seed_to_nullvector(block: EchelonBlock, y: Sequence, *, exact: bool = False):
    """Spawn the normalized left null vector selected by seed ``y``.

    The raw null vector is q = [-B @ y, y]; it is returned divided by its
    leading entry so that q[0] = 1.  The float path rejects seeds whose
    leading entry is below NORMALIZE_RTOL relative to max|q|; the exact path
    rejects an exactly zero leading entry.
    """
    dims = block.dims
    if len(y) != dims.s:
        raise ValueError(f"seed length {len(y)} != s = {dims.s}")

    if exact:
        ys = [Fraction(v) for v in y]
        if all(v == 0 for v in ys):
            raise ValueError("seed must be nonzero")
        head = [-sum(brow[j] * ys[j] for j in range(dims.s)) for brow in block.b]
        q = head + ys
        if q[0] == 0:
            raise NonNormalizableSeedError(
                "null vector has zero leading entry; "
                "the seed generates no normalizable formula"
            )
        lead = q[0]
        return tuple(v / lead for v in q)

    yv = np.asarray(y, dtype=float)
    if yv.ndim != 1:
        raise ValueError("seed must be a flat vector")
    if not np.any(yv):
        raise ValueError("seed must be nonzero")
    q = np.concatenate([-(block.b_float @ yv), yv])
    if abs(q[0]) < NORMALIZE_RTOL * np.abs(q).max():
        raise NonNormalizableSeedError(
            f"leading null vector entry {q[0]:.3e} is negligible; "
            "the seed generates no normalizable formula"
        )
    return q / q[0]


def nullvector_to_formula(q, dims: Dimensions) -> DifferenceFormula:
    """Turn a normalized null vector into its difference formula.

    p = [1, -sum(q), q[1:]] and c = 1 - sum(i * q[i]).  Fraction input
    produces the exact formula, float input the float one.
    """
    if len(q) != dims.degree:
        raise ValueError(f"null vector length {len(q)} != degree {dims.degree}")

    if not isinstance(q, np.ndarray) and isinstance(q[0], Fraction):
        if q[0] != 1:
            raise ValueError("null vector must be normalized to q[0] = 1")
        p = [Fraction(1), -sum(q)] + list(q[1:])
        c = 1 - sum(i * q[i] for i in range(1, dims.degree))
        return DifferenceFormula(dims, tuple(p), Fraction(c))

    qv = np.asarray(q, dtype=float)
    if abs(qv[0] - 1.0) > 1e-9:
        raise ValueError("null vector must be normalized to q[0] = 1")
    p = np.empty(dims.degree + 1)
    p[0] = 1.0
    p[1] = -qv.sum()
    p[2:] = qv[1:]
    c = 1.0 - float(np.arange(1.0, dims.degree) @ qv[1:])
    return DifferenceFormula(dims, tuple(float(v) for v in p), c)


def seed_to_formula(dims: Dimensions, y: Sequence, *, exact: bool = False) -> DifferenceFormula:
    """Full seed -> formula pipeline with the echelon block cached per dims."""
    block = echelon_block(dims)
    return nullvector_to_formula(seed_to_nullvector(block, y, exact=exact), dims)
