"""Shared fixtures.

Installs a session-wide observer on every ClearingState the package builds,
checking the structural payment invariants each time: recovery ranges, the
budget identity, strict seniority, pro-rata splits within the marginal level,
the payoff rule, and conservation at (near-)solutions. Any violation anywhere
in the suite fails the session.
"""

from __future__ import annotations

import math

import pytest

import netclear
from netclear.solver import SolverConfig

RANGE_TOL = 1e-12
PAY_TOL = 1e-9
CONSERVE_RESIDUAL = 1e-7
CONSERVE_TOL = 1e-8


def check_state_invariants(state) -> list[str]:
    """All violated payment invariants of one clearing state."""
    bad: list[str] = []
    system = state.system
    contracts = system.contracts

    for v, r in state.recovery.items():
        if not (-RANGE_TOL <= r <= 1.0 + RANGE_TOL) or not math.isfinite(r):
            bad.append(f"recovery out of range: r[{v}]={r}")

    by_bank_level: dict[tuple[str, int], list[int]] = {}
    outgoing: dict[str, float] = {v: 0.0 for v in state.recovery}
    for j, c in enumerate(contracts):
        by_bank_level.setdefault((c.debtor, c.priority), []).append(j)
        outgoing[c.debtor] += state.contract_payments[j]
        if state.contract_payments[j] < -RANGE_TOL:
            bad.append(f"negative payment on contract #{j}")
        if state.contract_payments[j] > state.contract_liabilities[j] + PAY_TOL:
            bad.append(f"payment exceeds liability on contract #{j}")

    for v in state.recovery:
        total = state.ledger.totals[v]
        budget = state.recovery[v] * total
        if abs(outgoing[v] - budget) > PAY_TOL * max(1.0, total):
            bad.append(
                f"budget identity broken at {v}: paid {outgoing[v]}, budget {budget}"
            )

    levels = range(1, system.priority_levels + 1)
    for v in state.recovery:
        for rho in levels:
            rows = by_bank_level.get((v, rho), [])
            if not rows:
                continue
            liab = sum(state.contract_liabilities[j] for j in rows)
            paid = sum(state.contract_payments[j] for j in rows)
            if paid <= PAY_TOL:
                continue
            # anything flows at this level only if all senior levels are full
            for senior in range(1, rho):
                srows = by_bank_level.get((v, senior), [])
                s_liab = sum(state.contract_liabilities[j] for j in srows)
                s_paid = sum(state.contract_payments[j] for j in srows)
                if s_liab - s_paid > PAY_TOL * max(1.0, s_liab):
                    bad.append(
                        f"seniority broken at {v}: level {rho} pays while level "
                        f"{senior} is short by {s_liab - s_paid}"
                    )
            # within the marginal level everyone gets the same fraction
            ratios = [
                state.contract_payments[j] / state.contract_liabilities[j]
                for j in rows
                if state.contract_liabilities[j] > 1e-12
            ]
            if ratios and max(ratios) - min(ratios) > PAY_TOL:
                bad.append(f"unequal pro-rata split at {v} level {rho}")

    for v in state.recovery:
        expect = max(state.assets[v] - state.ledger.totals[v], 0.0)
        if abs(state.payoffs[v] - expect) > PAY_TOL * max(1.0, state.ledger.totals[v]):
            bad.append(f"payoff rule broken at {v}")

    if state.residual <= CONSERVE_RESIDUAL:
        for v in state.recovery:
            total = state.ledger.totals[v]
            due = min(state.assets[v], total)
            if abs(outgoing[v] - due) > CONSERVE_TOL * max(1.0, total):
                bad.append(
                    f"conservation broken at solution for {v}: paid {outgoing[v]},"
                    f" min(assets, liabilities) {due}"
                )
    return bad


class StateRecorder:
    def __init__(self):
        self.count = 0
        self.violations: list[str] = []

    def __call__(self, state) -> None:
        self.count += 1
        if len(self.violations) < 25:
            self.violations.extend(check_state_invariants(state))


@pytest.fixture(scope="session", autouse=True)
def state_recorder():
    recorder = StateRecorder()
    netclear.set_state_observer(recorder)
    yield recorder
    netclear.set_state_observer(None)
    assert not recorder.violations, (
        f"{len(recorder.violations)} state invariant violations, first: "
        f"{recorder.violations[0]}"
    )


@pytest.fixture(scope="session")
def sweep_config() -> SolverConfig:
    """Lighter start budget for the big random sweeps; tolerance unchanged."""
    return SolverConfig(interior_starts=32, max_iterations=20000)
