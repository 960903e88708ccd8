"""Fixed-point solvers for clearing recovery vectors.

The update map is piecewise linear but not a contraction in general; systems
can have a unique solution, several isolated solutions, or a continuum. The
strategy here is damped iteration run in bulk over many start points plus an
exhaustive sweep over candidate default sets, followed by verification,
clustering and flagging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

import numpy as np

from . import _engine
from .model import (
    BankId,
    ClearingState,
    FinancialSystem,
    InputError,
    _check_vector,
    state_from_row,
)
from .model import residual as _model_residual

__all__ = [
    "SolverConfig",
    "SolverCapabilityError",
    "IterationResult",
    "SolutionSet",
    "iterate",
    "solve_with_default_set",
    "find_solutions",
    "verify_solution",
]


class SolverCapabilityError(RuntimeError):
    """The instance exceeds a configured enumeration or size budget."""


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for the solvers.

    tolerance        residual (max-norm) below which a vector counts as solved
    damping          step size lambda in r <- (1-lambda) r + lambda f(r)
    max_iterations   per-start iteration budget
    corner_bank_limit  all {0,1} corners over defaultable banks are seeded
                       when there are at most this many of them
    interior_starts  number of seeded random interior starts
    seed             rng seed; results are deterministic given (system, config)
    cluster_radius   max-norm radius used to merge near-identical solutions
    enumeration_limit  hard cap on candidate default sets swept by
                       find_solutions before giving up with a capability error
    family_threshold distinct solutions sharing one default pattern before the
                     set is flagged as a suspected continuum
    """

    tolerance: float = 1e-9
    damping: float = 0.5
    max_iterations: int = 100_000
    corner_bank_limit: int = 12
    interior_starts: int = 256
    seed: int = 20260814
    cluster_radius: float = 1e-6
    enumeration_limit: int = 1 << 16
    family_threshold: int = 8

    def __post_init__(self):
        if not (self.tolerance > 0):
            raise InputError(f"tolerance must be > 0, got {self.tolerance}")
        if not (0 < self.damping <= 1):
            raise InputError(f"damping must be in (0, 1], got {self.damping}")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if self.interior_starts < 0 or self.corner_bank_limit < 0:
            raise InputError("start budgets must be >= 0")
        if not (self.cluster_radius > 0):
            raise InputError(f"cluster_radius must be > 0, got {self.cluster_radius}")


@dataclass(frozen=True)
class IterationResult:
    """Outcome of a single damped iteration run."""

    converged: bool
    recovery: Mapping[BankId, float]
    residual: float
    iterations: int
    state: Optional[ClearingState]


@dataclass(frozen=True)
class SolutionSet:
    """Verified solutions in canonical (lexicographic) order.

    flag is "unique", "multiple" or "family_suspected"; the last one means
    more than family_threshold distinct solutions share a default pattern,
    the signature of a one-parameter family.
    """

    system: FinancialSystem
    states: tuple[ClearingState, ...]
    flag: str
    tolerance: float

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[ClearingState]:
        return iter(self.states)

    def __getitem__(self, i) -> ClearingState:
        return self.states[i]

    def recoveries(self) -> list[dict[BankId, float]]:
        return [dict(s.recovery) for s in self.states]

    def payoffs_of(self, bank_id: BankId) -> tuple[float, ...]:
        return tuple(s.payoffs[bank_id] for s in self.states)

    def recoveries_of(self, bank_id: BankId) -> tuple[float, ...]:
        return tuple(s.recovery[bank_id] for s in self.states)

    def default_patterns(self) -> dict[frozenset[BankId], int]:
        counts: dict[frozenset[BankId], int] = {}
        for s in self.states:
            key = s.default_set
            counts[key] = counts.get(key, 0) + 1
        return counts


# ---------------------------------------------------------------------------
# batch driver

_TIGHT = 1e-13          # internal iteration target, below any public tolerance
_WINDOW = 64            # iterations between stagnation checks
_STALL_WINDOWS = 4      # windows without any best-residual progress -> stop
_MIN_DAMPING = 1.0 / 64
_POLISH_STEPS = 32
_SNAP = 1e-12


def _drive(cs, R0, pins, cfg, max_iterations=None):
    """Damped fixed-point iteration on every row of R0.

    pins is a bool (n, V) mask of coordinates held at 1 (the map is iterated
    on the complement). Keeps the best residual seen per row. Rows whose
    progress stalls get their damping halved (cycling detection); when nothing
    improves for several windows the loop stops early.

    Returns (R_best, residual_best, iterations) where the residual is that of
    the pinned map.
    """
    limit = cfg.max_iterations if max_iterations is None else max_iterations
    R = np.clip(np.array(R0, dtype=float), 0.0, 1.0)
    R[pins] = 1.0
    n = R.shape[0]
    lam = np.full(n, cfg.damping)
    target = min(_TIGHT, cfg.tolerance)

    best_R = R.copy()
    best_res = np.full(n, np.inf)
    window_best = best_res.copy()
    stalled = 0
    it = 0

    for it in range(1, limit + 1):
        F = _engine.evaluate(cs, R)["F"]
        F = np.where(pins, 1.0, F)
        res = np.max(np.abs(F - R), axis=1)

        better = res < best_res
        if np.any(better):
            best_res = np.where(better, res, best_res)
            best_R[better] = R[better]
        if np.all(best_res <= target):
            break

        if it % _WINDOW == 0:
            live = best_res > target
            # no improvement at all over the window on a live row: treat as a
            # cycle and damp that row harder
            cycling = live & (best_res >= window_best - 1e-15)
            lam = np.where(cycling, np.maximum(lam * 0.5, _MIN_DAMPING), lam)
            if np.all(~live | cycling) and np.all(lam[live] <= _MIN_DAMPING):
                stalled += 1
                if stalled >= _STALL_WINDOWS:
                    break
            else:
                stalled = 0
            window_best = best_res.copy()

        R = R + lam[:, None] * (F - R)
        np.clip(R, 0.0, 1.0, out=R)
        R[pins] = 1.0

    return best_R, best_res, it


def _polish(cs, R, pins, res):
    """Undamped refinement plus corner snapping, keeping only improvements."""
    best_R, best_res = R.copy(), res.copy()
    cur = R.copy()
    for _ in range(_POLISH_STEPS):
        F = _engine.evaluate(cs, cur)["F"]
        F = np.where(pins, 1.0, F)
        step_res = np.max(np.abs(F - cur), axis=1)
        better = step_res < best_res
        best_res = np.where(better, step_res, best_res)
        best_R[better] = cur[better]
        if np.all(best_res == 0.0):
            break
        cur = F

    snapped = np.where(best_R < _SNAP, 0.0, best_R)
    snapped = np.where(snapped > 1.0 - _SNAP, 1.0, snapped)
    snapped[pins] = 1.0
    if np.any(snapped != best_R):
        F = _engine.evaluate(cs, snapped)["F"]
        F = np.where(pins, 1.0, F)
        snap_res = np.max(np.abs(F - snapped), axis=1)
        keep = snap_res <= best_res
        best_res = np.where(keep, snap_res, best_res)
        best_R[keep] = snapped[keep]
    return best_R, best_res


def _full_residual(cs, R):
    return _engine.evaluate(cs, R)["residual"]


# ---------------------------------------------------------------------------
# public operations


def iterate(
    system: FinancialSystem,
    r0: Optional[Mapping[BankId, float]] = None,
    config: SolverConfig = SolverConfig(),
) -> IterationResult:
    """Damped iteration from a single start (all-par when r0 is omitted);
    converged results are verified."""
    cs = system.compiled
    if r0 is None:
        row = np.ones((1, cs.n_banks))
    else:
        row = _check_vector(system, r0)[None, :]
    pins = np.zeros_like(row, dtype=bool)
    R, res, iters = _drive(cs, row, pins, config)
    R, res = _polish(cs, R, pins, res)
    final_res = float(_full_residual(cs, R)[0])
    converged = final_res <= config.tolerance
    state = state_from_row(system, R[0]) if converged else None
    return IterationResult(
        converged=converged,
        recovery=cs.mapping(R[0]),
        residual=final_res,
        iterations=iters,
        state=state,
    )


def _consistent_with_default_set(cs, row, default_idx, tolerance):
    """a_v < l_v on the set and a_v >= l_v off it, up to a boundary tie."""
    ev = _engine.evaluate(cs, row[None, :])
    assets = ev["assets"][0]
    totals = ev["totals"][0]
    slack = tolerance * np.maximum(1.0, totals)
    in_set = np.zeros(cs.n_banks, dtype=bool)
    in_set[default_idx] = True
    # ties |a - l| <= slack are acceptable on either side
    bad_inside = in_set & (assets - totals > slack)
    bad_outside = ~in_set & (totals - assets > slack)
    return not (np.any(bad_inside) or np.any(bad_outside))


def solve_with_default_set(
    system: FinancialSystem,
    default_set,
    config: SolverConfig = SolverConfig(),
) -> Optional[ClearingState]:
    """Solve with recovery pinned to 1 off the given default set.

    Returns a verified solution consistent with the hypothesis (strictly
    undercapitalized on the set, covered off it, boundary ties allowed on
    either side), or None when the hypothesis admits none.
    """
    cs = system.compiled
    default_set = frozenset(default_set)
    unknown = default_set - set(cs.ids)
    if unknown:
        raise InputError("unknown banks in default set: " + ", ".join(sorted(unknown)))
    idx = np.array(sorted(cs.index[b] for b in default_set), dtype=np.intp)

    V = cs.n_banks
    rng = np.random.default_rng(config.seed)
    starts = np.ones((4, V))
    if idx.size:
        starts[0, idx] = 0.0
        starts[1, idx] = 0.5
        starts[3, idx] = rng.random(idx.size)
    pins = np.ones((4, V), dtype=bool)
    pins[:, idx] = False

    R, res, _ = _drive(cs, starts, pins, config)
    R, res = _polish(cs, R, pins, res)
    full = _full_residual(cs, R)
    order = np.argsort(full, kind="stable")
    for i in order:
        if full[i] > config.tolerance:
            break
        if _consistent_with_default_set(cs, R[i], idx, config.tolerance):
            return state_from_row(system, R[i])
    return None


def verify_solution(
    system: FinancialSystem,
    r: Mapping[BankId, float],
    tolerance: float = SolverConfig.tolerance,
) -> tuple[bool, float]:
    """(is r a solution at this tolerance, its residual)."""
    res = _model_residual(system, r)
    return (res <= tolerance, res)


def _canonical_order(R):
    """Stable lexicographic order of rows (first coordinate outermost)."""
    keys = tuple(R[:, j] for j in range(R.shape[1] - 1, -1, -1))
    return np.lexsort(keys)


def _cluster(R, radius):
    """Greedy max-norm clustering over canonically sorted rows."""
    reps: list[np.ndarray] = []
    for i in _canonical_order(R):
        row = R[i]
        if all(np.max(np.abs(row - rep)) > radius for rep in reps):
            reps.append(row)
    return reps


def find_solutions(
    system: FinancialSystem,
    config: SolverConfig = SolverConfig(),
    enumerate_default_sets: bool = True,
) -> SolutionSet:
    """Search for all clearing solutions of the system.

    Start points: {0,1} corners over the defaultable banks (when few enough),
    seeded random interiors, and, unless disabled, damped runs for every
    candidate default set with the complement pinned to 1. Converged rows are
    verified against the full map, merged within cluster_radius, ordered
    lexicographically and flagged.

    Banks whose external assets cover their total outgoing notionals can never
    default and are pinned to 1 throughout.
    """
    cs = system.compiled
    V = cs.n_banks
    free = np.flatnonzero(cs.defaultable)
    d = free.size
    rng = np.random.default_rng(config.seed)

    rows = [np.ones((1, V))]
    if d and d <= config.corner_bank_limit:
        corners = np.ones((1 << d, V))
        bits = ((np.arange(1 << d)[:, None] >> np.arange(d)) & 1).astype(float)
        corners[:, free] = bits
        rows.append(corners)
    if d and config.interior_starts:
        interior = np.ones((config.interior_starts, V))
        interior[:, free] = rng.random((config.interior_starts, d))
        rows.append(interior)

    if enumerate_default_sets and (1 << min(d, 60)) > config.enumeration_limit:
        raise SolverCapabilityError(
            f"default-set enumeration over {d} defaultable banks exceeds the "
            f"budget of {config.enumeration_limit} subsets; raise "
            "enumeration_limit or pass enumerate_default_sets=False"
        )

    base = np.vstack(rows)
    pins = np.zeros_like(base, dtype=bool)
    pins[:, ~cs.defaultable] = True

    if enumerate_default_sets and d:
        n_sub = 1 << d
        sub_rows = []
        sub_pins = []
        for mask in range(n_sub):
            members = free[[(mask >> k) & 1 == 1 for k in range(d)]]
            pin = np.ones(V, dtype=bool)
            pin[members] = False
            for fill in (0.0, 0.5):
                row = np.ones(V)
                row[members] = fill
                sub_rows.append(row)
                sub_pins.append(pin)
        base = np.vstack([base, np.array(sub_rows)])
        pins = np.vstack([pins, np.array(sub_pins)])

    R, res, _ = _drive(cs, base, pins, config)
    R, res = _polish(cs, R, pins, res)
    full = _full_residual(cs, R)
    good = R[full <= config.tolerance]

    if good.shape[0] == 0:
        return SolutionSet(system=system, states=(), flag="none", tolerance=config.tolerance)

    reps = _cluster(good, config.cluster_radius)
    states = tuple(state_from_row(system, rep) for rep in reps)

    patterns: dict[frozenset[BankId], int] = {}
    for s in states:
        key = s.default_set
        patterns[key] = patterns.get(key, 0) + 1
    if any(count > config.family_threshold for count in patterns.values()):
        flag = "family_suspected"
    elif len(states) > 1:
        flag = "multiple"
    else:
        flag = "unique"
    return SolutionSet(system=system, states=states, flag=flag, tolerance=config.tolerance)
