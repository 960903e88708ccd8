"""Balance-sheet interventions and their evaluation.

Four action kinds: partially or fully removing an incoming debt contract,
donating external assets to another bank, injecting own external assets, and
reassigning the priority levels of a bank's outgoing contracts. Actions are
applied functionally (systems are immutable) and assessed by solving the
system before and after.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Union

from .model import (
    DEBT,
    BankId,
    Contract,
    FinancialSystem,
    InputError,
    InvalidSystemError,
    validate_system,
)
from .model import residual as state_residual
from .solver import SolutionSet, SolverConfig, find_solutions

__all__ = [
    "Action",
    "ActionError",
    "RemoveIncomingDebt",
    "Donate",
    "InjectOwnAssets",
    "Reprioritize",
    "EffectReport",
    "GammaScan",
    "acting_bank",
    "apply_action",
    "apply_actions",
    "assess",
    "optimize_partial_removal",
    "project_solution",
]


class ActionError(ValueError):
    """Malformed or inapplicable action: bad contract, wrong party, bad amount."""


@dataclass(frozen=True)
class RemoveIncomingDebt:
    """Remove a fraction of a debt contract owed to the acting bank.

    fraction is the share gamma of the notional forgiven; 1 deletes the
    contract entirely.
    """

    contract: int
    fraction: float = 1.0


@dataclass(frozen=True)
class Donate:
    """Transfer external assets from the acting bank to another bank."""

    source: BankId
    target: BankId
    amount: float


@dataclass(frozen=True)
class InjectOwnAssets:
    """Raise the acting bank's own external assets."""

    bank: BankId
    amount: float


@dataclass(frozen=True)
class Reprioritize:
    """Reassign priority levels of some of the acting bank's outgoing contracts.

    priorities maps contract index -> new level; other contracts keep theirs.
    """

    bank: BankId
    priorities: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(self, "priorities", dict(self.priorities))


Action = Union[RemoveIncomingDebt, Donate, InjectOwnAssets, Reprioritize]


def acting_bank(system: FinancialSystem, action: Action) -> BankId:
    """The bank whose balance sheet the action belongs to."""
    if isinstance(action, RemoveIncomingDebt):
        return _contract_at(system, action.contract).creditor
    if isinstance(action, Donate):
        return action.source
    if isinstance(action, InjectOwnAssets):
        return action.bank
    if isinstance(action, Reprioritize):
        return action.bank
    raise ActionError(f"unknown action type {type(action).__name__}")


def _contract_at(system: FinancialSystem, index) -> Contract:
    if not isinstance(index, int) or isinstance(index, bool):
        raise ActionError(f"contract reference must be an index, got {index!r}")
    if not (0 <= index < len(system.contracts)):
        raise ActionError(
            f"contract #{index} not found ({len(system.contracts)} contracts)"
        )
    return system.contracts[index]


def _require_bank(system: FinancialSystem, bank_id: BankId, role: str) -> None:
    if not system.has_bank(bank_id):
        raise ActionError(f"{role} {bank_id!r} is not a bank")


def _positive_amount(amount) -> float:
    try:
        value = float(amount)
    except (TypeError, ValueError):
        raise ActionError(f"amount must be a number, got {amount!r}") from None
    if not value > 0:
        raise ActionError(f"amount must be > 0, got {amount}")
    return value


def apply_action(system: FinancialSystem, action: Action) -> FinancialSystem:
    """A new system with the action applied; the input is left untouched.

    The result is not re-validated here: a full removal can orphan a CDS
    reference, which downstream validation reports.
    """
    if isinstance(action, RemoveIncomingDebt):
        contract = _contract_at(system, action.contract)
        if contract.kind != DEBT:
            raise ActionError(
                f"contract #{action.contract} is a {contract.kind}, only debt can be removed"
            )
        if not (0.0 <= action.fraction <= 1.0):
            raise ActionError(f"fraction must lie in [0, 1], got {action.fraction}")
        contracts = list(system.contracts)
        if action.fraction == 1.0:
            del contracts[action.contract]
        else:
            contracts[action.contract] = replace(
                contract, notional=contract.notional * (1.0 - action.fraction)
            )
        return system.replace(contracts=contracts)

    if isinstance(action, Donate):
        _require_bank(system, action.source, "donor")
        _require_bank(system, action.target, "recipient")
        if action.source == action.target:
            raise ActionError("donation to oneself; use an own-assets injection")
        amount = _positive_amount(action.amount)
        banks = [
            replace(b, external_assets=b.external_assets + amount)
            if b.id == action.target
            else b
            for b in system.banks
        ]
        return system.replace(banks=banks)

    if isinstance(action, InjectOwnAssets):
        _require_bank(system, action.bank, "bank")
        amount = _positive_amount(action.amount)
        banks = [
            replace(b, external_assets=b.external_assets + amount)
            if b.id == action.bank
            else b
            for b in system.banks
        ]
        return system.replace(banks=banks)

    if isinstance(action, Reprioritize):
        _require_bank(system, action.bank, "bank")
        if not action.priorities:
            raise ActionError("reprioritize with no contract assignments")
        contracts = list(system.contracts)
        for index, level in action.priorities.items():
            contract = _contract_at(system, index)
            if contract.debtor != action.bank:
                raise ActionError(
                    f"contract #{index} is owed by {contract.debtor!r}, not by {action.bank!r}"
                )
            if not isinstance(level, int) or isinstance(level, bool) or not (
                1 <= level <= system.priority_levels
            ):
                raise ActionError(
                    f"priority {level!r} outside 1..{system.priority_levels}"
                )
            contracts[index] = replace(contract, priority=level)
        return system.replace(contracts=contracts)

    raise ActionError(f"unknown action type {type(action).__name__}")


def apply_actions(system: FinancialSystem, actions) -> FinancialSystem:
    """Apply several actions touching disjoint contracts.

    Non-removals go first, then removals by descending contract index, so
    that earlier deletions cannot shift the indices later ones refer to.
    """
    removals = [a for a in actions if isinstance(a, RemoveIncomingDebt)]
    others = [a for a in actions if not isinstance(a, RemoveIncomingDebt)]
    seen: set[int] = set()
    for a in removals:
        if a.contract in seen:
            raise ActionError(f"contract #{a.contract} removed twice")
        seen.add(a.contract)
    out = system
    for a in others:
        out = apply_action(out, a)
    for a in sorted(removals, key=lambda a: a.contract, reverse=True):
        out = apply_action(out, a)
    return out


def action_cost(action: Action) -> float:
    """Out-of-pocket cost to the acting bank (donations and injections)."""
    if isinstance(action, (Donate, InjectOwnAssets)):
        return float(action.amount)
    return 0.0


@dataclass(frozen=True)
class EffectReport:
    """Before/after comparison of an action from the acting bank's viewpoint.

    Payoff and recovery multisets are sorted tuples over all solutions of the
    respective system. delta_min_net and delta_max_net compare the worst and
    best after-payoff net of cost against the corresponding before-payoff.
    """

    acting: BankId
    action: Action
    cost: float
    before: SolutionSet
    after: SolutionSet
    payoffs_before: tuple[float, ...]
    payoffs_after: tuple[float, ...]
    recoveries_before: tuple[float, ...]
    recoveries_after: tuple[float, ...]
    delta_min_net: float
    delta_max_net: float


def assess(
    system: FinancialSystem,
    action: Action,
    acting: Optional[BankId] = None,
    config: SolverConfig = SolverConfig(),
) -> EffectReport:
    """Solve before and after the action and compare the acting bank's lot.

    Raises ActionError when the action does not belong to the acting bank and
    InvalidSystemError when the modified system fails validation (for example
    a full removal orphaning a CDS reference).
    """
    inferred = acting_bank(system, action)
    if acting is None:
        acting = inferred
    elif acting != inferred:
        raise ActionError(
            f"action belongs to {inferred!r}, not to acting bank {acting!r}"
        )
    if not system.has_bank(acting):
        raise ActionError(f"acting bank {acting!r} is not a bank")

    before = find_solutions(system, config)
    modified = apply_action(system, action)
    report = validate_system(modified)
    if not report.ok:
        raise InvalidSystemError(report.violations)
    after = find_solutions(modified, config)

    cost = action_cost(action)
    payoffs_before = tuple(sorted(before.payoffs_of(acting)))
    payoffs_after = tuple(sorted(after.payoffs_of(acting)))
    recoveries_before = tuple(sorted(before.recoveries_of(acting)))
    recoveries_after = tuple(sorted(after.recoveries_of(acting)))
    return EffectReport(
        acting=acting,
        action=action,
        cost=cost,
        before=before,
        after=after,
        payoffs_before=payoffs_before,
        payoffs_after=payoffs_after,
        recoveries_before=recoveries_before,
        recoveries_after=recoveries_after,
        delta_min_net=(min(payoffs_after) - cost) - min(payoffs_before),
        delta_max_net=(max(payoffs_after) - cost) - max(payoffs_before),
    )


@dataclass(frozen=True)
class GammaScan:
    """Result of a removal-fraction sweep for one debt contract."""

    contract: int
    acting: BankId
    objective: str
    curve: tuple[tuple[float, float], ...]
    gamma_star: float
    payoff: float


def optimize_partial_removal(
    system: FinancialSystem,
    contract: int,
    acting: Optional[BankId] = None,
    grid_steps: int = 64,
    objective: str = "worst_case",
    config: SolverConfig = SolverConfig(),
) -> GammaScan:
    """Sweep the removal fraction over a uniform grid and pick the best.

    Evaluates gamma = j/grid_steps for j = 0..grid_steps; the objective is the
    acting bank's worst-case payoff over solutions ("worst_case") or the mean
    ("expected"). Ties go to the smaller gamma.
    """
    target = _contract_at(system, contract)
    if target.kind != DEBT:
        raise ActionError(f"contract #{contract} is a {target.kind}, expected debt")
    if acting is None:
        acting = target.creditor
    elif acting != target.creditor:
        raise ActionError(
            f"contract #{contract} is owed to {target.creditor!r}, not to {acting!r}"
        )
    if objective not in ("worst_case", "expected"):
        raise InputError(f"objective must be worst_case or expected, got {objective!r}")
    if grid_steps < 1:
        raise InputError(f"grid_steps must be >= 1, got {grid_steps}")

    curve: list[tuple[float, float]] = []
    best_gamma, best_value = 0.0, -float("inf")
    for j in range(grid_steps + 1):
        gamma = j / grid_steps
        modified = apply_action(system, RemoveIncomingDebt(contract, gamma))
        report = validate_system(modified)
        if not report.ok:
            raise InvalidSystemError(report.violations)
        solutions = find_solutions(modified, config)
        payoffs = solutions.payoffs_of(acting)
        value = min(payoffs) if objective == "worst_case" else sum(payoffs) / len(payoffs)
        curve.append((gamma, value))
        if value > best_value:
            best_gamma, best_value = gamma, value
    return GammaScan(
        contract=contract,
        acting=acting,
        objective=objective,
        curve=tuple(curve),
        gamma_star=best_gamma,
        payoff=best_value,
    )


def project_solution(
    system_original: FinancialSystem,
    system_modified: FinancialSystem,
    r: Mapping[BankId, float],
    acting: BankId,
    tolerance: float = 1e-8,
) -> bool:
    """Does a solution of the modified system solve the original one too?

    Applies when the acting bank stays solvent with margin in the modified
    solution: its payments are then insensitive to the modification (an own
    injection or a reprioritization), so r should clear the original system
    as well. The acting bank is part of the claim being checked, not of the
    computation: the test is simply that the original-system residual at r
    stays within tolerance.
    """
    if not system_original.has_bank(acting):
        raise ActionError(f"acting bank {acting!r} is not a bank")
    if set(system_original.bank_ids) != set(system_modified.bank_ids):
        raise InputError("original and modified systems have different banks")
    return state_residual(system_original, r) <= tolerance
