"""Catalog of known formulas, truncation-order measurement, stability runs.

Three kinds of evidence about a difference formula live here:

* the catalog of the six convergent look-ahead formulas previously known
  from the multistep/ZNN discretization literature, labeled (A)-(F) in
  their original unnormalized integer form;
* empirical truncation order: the one-step residual on x = e^t sampled
  over dyadic step sizes, with the order read off as the log-log slope;
* recurrence simulation: run the formula as an actual multistep iteration
  against a test function with the exact derivative fed in, to show
  bounded error for convergent formulas and blowup for non-convergent
  ones.

Exact derivatives are supplied analytically so the measurements isolate
the formula's own defect from any derivative-estimation error.

Order labels are treated as lower bounds on the measured slope: the
symmetric Euler formula (A) carries the label 2 but measures slope 3 on
e^t because its residual expansion is odd in tau.  The order check
therefore passes whenever the fitted slope reaches claimed - slope_tol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .charpoly import analyze_formula
from .taylor_system import DifferenceFormula, Dimensions

__all__ = [
    "SLOPE_TOL",
    "UNDERFLOW",
    "BLOWUP_THRESHOLD",
    "TestFunction",
    "EXP",
    "SIN",
    "monomial",
    "KnownFormula",
    "OrderCheckResult",
    "RecurrenceRun",
    "catalog",
    "residual",
    "empirical_order",
    "simulate",
    "validate_catalog",
]

# Least-squares slope may fall this far below the claimed order and still pass.
SLOPE_TOL = 0.3
# Residuals below this are considered drowned in float64 rounding noise.
UNDERFLOW = 1e-14
# An iterate beyond this magnitude counts as divergence.
BLOWUP_THRESHOLD = 1e10

# Dyadic step sizes for the order fit.
_ORDER_TAUS = tuple(2.0 ** (-e) for e in range(3, 11))


@dataclass(frozen=True)
class TestFunction:
    """A scalar trajectory with its exact derivative."""

    name: str
    value: Callable[[float], float]
    derivative: Callable[[float], float]


EXP = TestFunction("exp", math.exp, math.exp)
SIN = TestFunction("sin", math.sin, math.cos)


def monomial(r: int) -> TestFunction:
    """t^r with exact derivative r*t^(r-1)."""
    if r < 0:
        raise ValueError("exponent must be >= 0")

    def deriv(t: float) -> float:
        return 0.0 if r == 0 else r * t ** (r - 1)

    return TestFunction(f"t^{r}", lambda t: t**r, deriv)


@dataclass(frozen=True)
class KnownFormula:
    """One catalog entry, kept in its original unnormalized integer form."""

    label: str
    char_poly: tuple
    c: Fraction
    claimed_order: int
    source_note: str

    def to_formula(self) -> DifferenceFormula:
        """Normalized exact DifferenceFormula (leading coefficient 1)."""
        lead = Fraction(self.char_poly[0])
        p = tuple(Fraction(v) / lead for v in self.char_poly)
        degree = len(p) - 1
        k = max(1, self.claimed_order - 2)
        dims = Dimensions(k, degree - k)
        return DifferenceFormula(dims, p, Fraction(self.c))


def catalog() -> list[KnownFormula]:
    """The six previously known convergent look-ahead formulas (A)-(F).

    char_poly holds the integer characteristic polynomial exactly as
    published, c the weight of tau * dx_j once the polynomial is
    normalized.  Every entry satisfies p(1) = 0 (the coefficients sum to
    zero) and the root condition.
    """
    return [
        KnownFormula(
            "A",
            (1, 0, -1),
            Fraction(2),
            2,
            "symmetric (central-difference) Euler predictor",
        ),
        KnownFormula(
            "B",
            (2, -3, 2, -1),
            Fraction(1),
            3,
            "three-instant look-ahead rule, first of two variants",
        ),
        KnownFormula(
            "C",
            (6, -3, -2, -1),
            Fraction(5, 3),
            3,
            "three-instant look-ahead rule, second variant",
        ),
        KnownFormula(
            "D",
            (5, -3, -1, -1),
            Fraction(8, 5),
            3,
            "four-instant forward rule",
        ),
        KnownFormula(
            "E",
            (8, 1, -6, -5, 2),
            Fraction(9, 4),
            4,
            "five-instant look-ahead rule",
        ),
        KnownFormula(
            "F",
            (13, -6, -2, -4, -3, 2),
            Fraction(24, 13),
            4,
            "six-instant look-ahead rule",
        ),
    ]


@dataclass(frozen=True)
class OrderCheckResult:
    """Outcome of fitting the residual decay rate of one formula."""

    formula_id: str
    taus: tuple
    residuals: tuple
    fitted_slope: Optional[float]
    claimed_order: int
    passed: bool
    underflow: bool


@dataclass(frozen=True)
class RecurrenceRun:
    """Outcome of iterating one formula against a test function."""

    formula: DifferenceFormula
    function_id: str
    tau: float
    steps: int
    max_error: float
    diverged: bool


def residual(f: DifferenceFormula, x: TestFunction, t: float, tau: float) -> float:
    """One-step defect of ``f`` on exact samples of ``x`` around time t.

    sum_i p[i] * x(t + (1-i)*tau) - c * tau * dx(t); zero through rounding
    on polynomials up to the formula's exactness degree.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    p = [float(v) for v in f.p]
    acc = math.fsum(p[i] * x.value(t + (1 - i) * tau) for i in range(len(p)))
    return acc - float(f.c) * tau * x.derivative(t)


def empirical_order(
    f: DifferenceFormula,
    claimed: int,
    *,
    formula_id: str = "?",
    slope_tol: float = SLOPE_TOL,
) -> OrderCheckResult:
    """Measure the truncation order of ``f`` on x = e^t at t = 0.

    |residual| is sampled over tau = 2^-3 .. 2^-10 and the slope of
    log|residual| against log tau fitted by least squares, using only the
    points above the UNDERFLOW noise floor.  Passing means slope >=
    claimed - slope_tol.  When fewer than two points survive the filter
    the slope is unfittable; that counts as a pass with the underflow
    flag set (the residual died into rounding noise faster than the fit
    could see, which no finite claimed order contradicts).
    """
    if claimed < 2:
        raise ValueError("claimed order must be >= 2")
    res = tuple(abs(residual(f, EXP, 0.0, tau)) for tau in _ORDER_TAUS)
    usable = [(tau, r) for tau, r in zip(_ORDER_TAUS, res) if r >= UNDERFLOW]
    if len(usable) < 2:
        return OrderCheckResult(
            formula_id=formula_id,
            taus=_ORDER_TAUS,
            residuals=res,
            fitted_slope=None,
            claimed_order=claimed,
            passed=True,
            underflow=True,
        )
    lt = np.log([tau for tau, _ in usable])
    lr = np.log([r for _, r in usable])
    slope = float(np.polyfit(lt, lr, 1)[0])
    return OrderCheckResult(
        formula_id=formula_id,
        taus=_ORDER_TAUS,
        residuals=res,
        fitted_slope=slope,
        claimed_order=claimed,
        passed=slope >= claimed - slope_tol,
        underflow=False,
    )


def simulate(
    f: DifferenceFormula,
    x: TestFunction,
    tau: float,
    steps: int,
    *,
    t0: float = 0.0,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> RecurrenceRun:
    """Run ``f`` as a multistep recurrence against ``x`` for ``steps`` steps.

    The first degree iterates are exact samples x(t0), ..,
    x(t0 + (degree-1)*tau); each later iterate comes from

        x_{j+1} = -(p[1]*x_j + ... + p[degree]*x_{j+1-degree}) + c*tau*dx(t_j)

    with the exact derivative fed in.  max_error is the largest deviation
    of a computed iterate from the exact trajectory; when an iterate
    passes blowup_threshold the run stops there, diverged is set, and
    max_error is the error at the detection point.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    p = [float(v) for v in f.p]
    c = float(f.c)
    d = f.degree

    hist = [x.value(t0 + j * tau) for j in range(d)]
    max_error = 0.0
    diverged = False
    for n in range(steps):
        j = d - 1 + n  # index of the newest known iterate
        t_j = t0 + j * tau
        nxt = c * tau * x.derivative(t_j) - math.fsum(
            p[i] * hist[-i] for i in range(1, d + 1)
        )
        hist.append(nxt)
        err = abs(nxt - x.value(t0 + (j + 1) * tau))
        if abs(nxt) > blowup_threshold:
            max_error = err
            diverged = True
            break
        if err > max_error:
            max_error = err

    return RecurrenceRun(
        formula=f,
        function_id=x.name,
        tau=tau,
        steps=steps,
        max_error=max_error,
        diverged=diverged,
    )


def validate_catalog(
    *,
    corrupt: Optional[str] = None,
    sim_tau: float = 0.01,
    sim_steps: int = 1000,
) -> list[dict]:
    """Full integrity check of the catalog; one result dict per entry.

    Each entry is checked for p(1) = 0, p'(1) = c (both exact), the
    root condition, the empirical order, and a bounded sin-t simulation.
    ``corrupt`` perturbs the named entry's trailing coefficient before
    checking — a negative control proving the harness can fail.
    """
    out = []
    for kf in catalog():
        char = list(kf.char_poly)
        if corrupt == kf.label:
            char[-1] += 1  # breaks p(1) = 0 and, generically, the roots
        lead = Fraction(char[0])
        p = tuple(Fraction(v) / lead for v in char)
        formula = DifferenceFormula(None, p, Fraction(kf.c))

        sums_to_zero = sum(p) == 0
        dp_at_1 = sum(i * p[len(p) - 1 - i] for i in range(1, len(p)))
        c_matches = dp_at_1 == kf.c
        report = analyze_formula(formula)
        order = empirical_order(formula, kf.claimed_order, formula_id=kf.label)
        run = simulate(formula, SIN, sim_tau, sim_steps)
        ok = (
            sums_to_zero
            and c_matches
            and report.convergent
            and order.passed
            and not run.diverged
        )
        out.append(
            {
                "label": kf.label,
                "root_at_1": sums_to_zero,
                "c_consistent": c_matches,
                "convergent": report.convergent,
                "max_magnitude": report.max_magnitude,
                "second_magnitude": report.second_magnitude,
                "fitted_slope": order.fitted_slope,
                "claimed_order": kf.claimed_order,
                "order_ok": order.passed,
                "sim_max_error": run.max_error,
                "sim_diverged": run.diverged,
                "ok": ok,
            }
        )
    return out
