"""Randomized Nelder-Mead discovery of convergent look-ahead formulas.

For fixed dimensions (k, s) the map seed -> max root magnitude is piecewise
smooth with a hard floor at 1 (the characteristic polynomial always has the
root 1).  Convergent formulas live exactly on that floor, so discovery is
global minimization: throw random Gaussian seeds at the landscape, polish
each with derivative-free Nelder-Mead, and keep the minima that reach the
floor and pass the root condition.

The search is a double loop.  Each outer run draws a fresh standard-normal
seed and minimizes it; on immediate success the run is complete, otherwise
inner restarts perturb the best seed found so far in that run and minimize
again, exploring the neighborhood of the most promising basin.  An inner
restart that lands a new formula replenishes the restart budget (total
inner attempts stay capped at twice the nominal restart count, so regions
where a whole continuum of seeds is convergent still terminate); runs that
end empty record their best objective value as a failure plateau — on hard
dimension pairs these cluster just above 1, the signature of near-miss
basins.

Reproducibility: every outer run owns a child of one ``SeedSequence``, so
results are a pure function of the rng seed and independent of the worker
count.  FD_FORGE_THREADS > 1 runs outer iterations in a thread pool;
aggregation always happens in (outer, inner) order and candidate lists are
deduplicated by polynomial coefficients.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .charpoly import PENALTY, RootReport, analyze_formula, objective_function
from .taylor_system import DifferenceFormula, Dimensions, seed_to_formula

__all__ = [
    "DEDUP_TOL",
    "SearchConfig",
    "Candidate",
    "SearchResult",
    "nelder_mead",
    "random_seed",
    "perturb",
    "discover",
    "worker_count",
]

# Two formulas whose polynomial coefficients agree within this (absolute,
# per coefficient) are the same discovery.
DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of one discovery session."""

    dims: Dimensions
    runs: int = 100
    restarts: int = 10
    rng_seed: int = 0
    nm_tol_x: float = 1e-8
    nm_tol_f: float = 1e-10
    nm_max_iter: int = 2000
    perturb_scale: float = 0.1
    penalty: float = PENALTY

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.nm_tol_x <= 0 or self.nm_tol_f <= 0:
            raise ValueError("Nelder-Mead tolerances must be positive")
        if self.nm_max_iter < 1:
            raise ValueError("nm_max_iter must be >= 1")
        if self.perturb_scale <= 0:
            raise ValueError("perturb_scale must be positive")


@dataclass(frozen=True)
class Candidate:
    """One convergent formula as discovered, with the seed and run that produced it."""

    seed_initial: tuple
    seed_final: tuple
    formula: DifferenceFormula
    report: RootReport
    outer_index: int
    inner_index: int
    nm_iterations: int


@dataclass(frozen=True)
class SearchResult:
    """Aggregate outcome of a discovery session."""

    config: SearchConfig
    candidates: tuple
    attempts: int
    failure_plateaus: tuple


def nelder_mead(
    f,
    x0: np.ndarray,
    *,
    tol_x: float = 1e-8,
    tol_f: float = 1e-10,
    max_iter: int = 2000,
):
    """Minimize ``f`` from ``x0`` with Nelder-Mead; returns (x, fun, nit).

    Standard simplex coefficients (reflection 1, expansion 2, contraction
    0.5, shrink 0.5), initial simplex displacing each coordinate by 5%
    (0.00025 when the coordinate is zero), termination when the simplex
    collapses below tol_x in x AND tol_f in f.
    """
    res = minimize(
        f,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        options={
            "xatol": tol_x,
            "fatol": tol_f,
            "maxiter": max_iter,
            "initial_simplex": None,
            "adaptive": False,
        },
    )
    return np.asarray(res.x, dtype=float), float(res.fun), int(res.nit)


def random_seed(s: int, rng: np.random.Generator) -> np.ndarray:
    """Standard-normal seed of length s, redrawn in the (measure-zero,
    float-possible) event of an exactly zero vector."""
    y = rng.standard_normal(s)
    while not np.any(y):
        y = rng.standard_normal(s)
    return y


def perturb(y: np.ndarray, rng: np.random.Generator, scale: float) -> np.ndarray:
    """Gaussian kick around ``y`` sized by its largest entry.

    scale = 0 returns y unchanged; otherwise the (probability-zero) event
    of landing exactly on the zero vector triggers a redraw.
    """
    y = np.asarray(y, dtype=float)
    amp = scale * float(np.abs(y).max())
    if amp == 0.0:
        return y.copy()
    out = y + amp * rng.standard_normal(len(y))
    while not np.any(out):
        out = y + amp * rng.standard_normal(len(y))
    return out


def worker_count() -> int:
    """Parallelism from FD_FORGE_THREADS (default 1, floor 1)."""
    raw = os.environ.get("FD_FORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _same_formula(p_a: Sequence[float], p_b: Sequence[float]) -> bool:
    if len(p_a) != len(p_b):
        return False
    return all(abs(a - b) <= DEDUP_TOL for a, b in zip(p_a, p_b))


def _run_outer(
    cfg: SearchConfig,
    outer_index: int,
    ss: np.random.SeedSequence,
    initial_seed: Optional[np.ndarray],
):
    """One outer run: fresh seed, NM polish, perturbation restarts.

    Returns (candidates, attempts, plateau) where plateau is the best
    objective value when the run found nothing (None otherwise).
    """
    rng = np.random.default_rng(ss)
    f = objective_function(cfg.dims, penalty=cfg.penalty)
    found: list[Candidate] = []
    attempts = 0

    def attempt(y0: np.ndarray, inner_index: int):
        """Polish one start point; returns (f_min, y_min, candidate|None)."""
        nonlocal attempts
        attempts += 1
        # A start point that already satisfies the root condition is a
        # finished formula: record it verbatim (zero NM iterations) instead
        # of letting the minimizer wander it off its exact coefficients.
        f0 = f(y0)
        if f0 < cfg.penalty:
            formula0 = seed_to_formula(cfg.dims, y0)
            report0 = analyze_formula(formula0)
            if report0.convergent:
                return f0, y0, Candidate(
                    seed_initial=tuple(float(v) for v in y0),
                    seed_final=tuple(float(v) for v in y0),
                    formula=formula0,
                    report=report0,
                    outer_index=outer_index,
                    inner_index=inner_index,
                    nm_iterations=0,
                )
        x, fx, nit = nelder_mead(
            f, y0, tol_x=cfg.nm_tol_x, tol_f=cfg.nm_tol_f, max_iter=cfg.nm_max_iter
        )
        if fx >= cfg.penalty:
            return fx, x, None
        try:
            formula = seed_to_formula(cfg.dims, x)
        except ValueError:
            return fx, x, None
        report = analyze_formula(formula)
        if not report.convergent:
            return fx, x, None
        return fx, x, Candidate(
            seed_initial=tuple(float(v) for v in y0),
            seed_final=tuple(float(v) for v in x),
            formula=formula,
            report=report,
            outer_index=outer_index,
            inner_index=inner_index,
            nm_iterations=nit,
        )

    y0 = random_seed(cfg.dims.s, rng) if initial_seed is None else np.asarray(
        initial_seed, dtype=float
    )
    best_f, best_y, cand = attempt(y0, 0)
    if cand is not None:
        # The opening seed already led to a formula: the run is complete.
        return [cand], attempts, None

    # Hard ceiling on inner attempts: budget resets on success may not push
    # a single outer run past twice its nominal restart count.  Without the
    # ceiling a run sitting in a region where a whole continuum of seeds is
    # convergent would reset forever.
    inner_cap = 2 * cfg.restarts
    budget = cfg.restarts
    inner = 0
    while budget > 0 and inner < inner_cap:
        inner += 1
        budget -= 1
        y = perturb(best_y, rng, cfg.perturb_scale)
        fx, x, cand = attempt(y, inner)
        if fx < best_f:
            best_f, best_y = fx, x
        if cand is not None and not any(
            _same_formula(cand.formula.p, c.formula.p) for c in found
        ):
            found.append(cand)
            # A fresh formula suggests its basin holds more: replenish the
            # budget (bounded by the ceiling above).
            budget = cfg.restarts

    plateau = None if found else best_f
    return found, attempts, plateau


def discover(
    config: SearchConfig,
    *,
    initial_seed: Optional[Sequence[float]] = None,
) -> SearchResult:
    """Run the full double-loop search described in the module docstring.

    ``initial_seed`` replaces the random draw of outer run 0 only — the
    remaining runs stay random, so a known-good start point can be verified
    and still be surrounded by fresh exploration.  Results are reproducible
    for a fixed config and independent of FD_FORGE_THREADS.
    """
    init = None if initial_seed is None else np.asarray(initial_seed, dtype=float)
    if init is not None and init.shape != (config.dims.s,):
        raise ValueError(
            f"initial seed length {init.size} != s = {config.dims.s}"
        )

    children = np.random.SeedSequence(config.rng_seed).spawn(config.runs)
    jobs = [
        (config, i, children[i], init if i == 0 else None) for i in range(config.runs)
    ]

    workers = worker_count()
    if workers == 1:
        outcomes = [_run_outer(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_outer, *job) for job in jobs]
            outcomes = [fut.result() for fut in futures]

    candidates: list[Candidate] = []
    attempts = 0
    plateaus: list[float] = []
    for found, n, plateau in outcomes:
        attempts += n
        if plateau is not None:
            plateaus.append(plateau)
        for cand in found:
            if not any(_same_formula(cand.formula.p, c.formula.p) for c in candidates):
                candidates.append(cand)

    return SearchResult(
        config=config,
        candidates=tuple(candidates),
        attempts=attempts,
        failure_plateaus=tuple(plateaus),
    )
