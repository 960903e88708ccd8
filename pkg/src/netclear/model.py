"""Data model for networks of debt contracts and credit default swaps.

A financial system is a set of banks with external assets plus a list of
contracts. A debt contract obliges the debtor to pay a fixed notional to the
creditor; a CDS obliges the debtor to pay notional*(1 - r_w) where r_w is the
recovery rate of a third reference bank. Contracts carry a priority level
(1 = most senior) and a debtor pays strictly by seniority out of the budget
r_v * l_v(r), splitting the marginal level pro rata.

The central objects are recovery vectors r in [0, 1]^V and the update map
f_v(r) = min(a_v(r) / l_v(r), 1) (1 when l_v(r) = 0); clearing solutions are
the fixed points of f.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Optional

import numpy as np

from . import _engine

BankId = str

DEBT = "debt"
CDS = "cds"


class InvalidSystemError(ValueError):
    """Raised when an operation receives a system that fails validation."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid system: " + "; ".join(self.violations))


class InputError(ValueError):
    """Raised for malformed operation inputs such as bad recovery vectors."""


@dataclass(frozen=True)
class Bank:
    id: BankId
    external_assets: float


@dataclass(frozen=True)
class Contract:
    """One contract row. kind is "debt" or "cds"; reference is cds-only."""

    debtor: BankId
    creditor: BankId
    notional: float
    kind: str = DEBT
    reference: Optional[BankId] = None
    priority: int = 1


@dataclass(frozen=True)
class FinancialSystem:
    banks: tuple[Bank, ...]
    contracts: tuple[Contract, ...]
    priority_levels: int = 1

    def __init__(self, banks, contracts=(), priority_levels=1):
        object.__setattr__(self, "banks", tuple(banks))
        object.__setattr__(self, "contracts", tuple(contracts))
        object.__setattr__(self, "priority_levels", int(priority_levels))

    @cached_property
    def bank_ids(self) -> tuple[BankId, ...]:
        return tuple(sorted(bank.id for bank in self.banks))

    def bank(self, bank_id: BankId) -> Bank:
        for bank in self.banks:
            if bank.id == bank_id:
                return bank
        raise InputError(f"unknown bank {bank_id!r}")

    def has_bank(self, bank_id: BankId) -> bool:
        return any(bank.id == bank_id for bank in self.banks)

    def find_contracts(self, debtor=None, creditor=None, kind=None) -> list[int]:
        """Indices of contracts matching all given filters."""
        out = []
        for i, c in enumerate(self.contracts):
            if debtor is not None and c.debtor != debtor:
                continue
            if creditor is not None and c.creditor != creditor:
                continue
            if kind is not None and c.kind != kind:
                continue
            out.append(i)
        return out

    def replace(self, banks=None, contracts=None, priority_levels=None) -> "FinancialSystem":
        return FinancialSystem(
            self.banks if banks is None else banks,
            self.contracts if contracts is None else contracts,
            self.priority_levels if priority_levels is None else priority_levels,
        )

    @cached_property
    def compiled(self) -> _engine.CompiledSystem:
        """Validated array form; raises InvalidSystemError on a bad system."""
        report = validate_system(self)
        if not report.ok:
            raise InvalidSystemError(report.violations)
        return _engine.CompiledSystem(self)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


def validate_system(system: FinancialSystem) -> ValidationReport:
    """Structural and sanity checks; returns all violations, raises nothing."""
    bad: list[str] = []
    if not system.banks:
        bad.append("system has no banks")
    if system.priority_levels < 1:
        bad.append(f"priority_levels must be >= 1, got {system.priority_levels}")

    seen: set[BankId] = set()
    for i, bank in enumerate(system.banks):
        if not isinstance(bank.id, str) or not bank.id:
            bad.append(f"banks[{i}]: id must be a non-empty string")
            continue
        if bank.id in seen:
            bad.append(f"banks[{i}]: duplicate id {bank.id!r}")
        seen.add(bank.id)
        assets = bank.external_assets
        if not np.isfinite(assets) or assets < 0:
            bad.append(f"banks[{i}] ({bank.id}): external_assets must be finite and >= 0, got {assets}")

    debtors_of_debt: set[BankId] = set()
    for c in system.contracts:
        if c.kind == DEBT and c.notional > 0:
            debtors_of_debt.add(c.debtor)

    for j, c in enumerate(system.contracts):
        where = f"contracts[{j}] ({c.debtor}->{c.creditor})"
        if c.kind not in (DEBT, CDS):
            bad.append(f"{where}: kind must be 'debt' or 'cds', got {c.kind!r}")
            continue
        for role, bank_id in (("debtor", c.debtor), ("creditor", c.creditor)):
            if bank_id not in seen:
                bad.append(f"{where}: {role} {bank_id!r} is not a bank")
        if c.debtor == c.creditor:
            bad.append(f"{where}: debtor and creditor coincide")
        if not np.isfinite(c.notional) or c.notional <= 0:
            bad.append(f"{where}: notional must be finite and > 0, got {c.notional}")
        if not (1 <= c.priority <= system.priority_levels):
            bad.append(
                f"{where}: priority {c.priority} outside 1..{system.priority_levels}"
            )
        if c.kind == CDS:
            if c.reference is None:
                bad.append(f"{where}: cds without a reference bank")
            else:
                if c.reference not in seen:
                    bad.append(f"{where}: reference {c.reference!r} is not a bank")
                if c.reference in (c.debtor, c.creditor):
                    bad.append(f"{where}: reference {c.reference!r} is a party to the contract")
                if c.reference not in debtors_of_debt:
                    bad.append(
                        f"{where}: reference {c.reference!r} has no outstanding debt contract"
                    )
        elif c.reference is not None:
            bad.append(f"{where}: debt contract must not carry a reference")

    return ValidationReport(ok=not bad, violations=tuple(bad))


# ---------------------------------------------------------------------------
# clearing evaluations


@dataclass(frozen=True)
class LiabilityLedger:
    """Liabilities at a given recovery vector, broken out by priority level."""

    pairwise: Mapping[tuple[BankId, BankId], float]
    totals: Mapping[BankId, float]
    by_level: Mapping[BankId, tuple[float, ...]]


@dataclass(frozen=True)
class ClearingState:
    """Everything observable about the system at one recovery vector."""

    system: FinancialSystem
    recovery: Mapping[BankId, float]
    ledger: LiabilityLedger
    contract_liabilities: tuple[float, ...]
    contract_payments: tuple[float, ...]
    payments: Mapping[tuple[BankId, BankId], float]
    assets: Mapping[BankId, float]
    payoffs: Mapping[BankId, float]
    update: Mapping[BankId, float]
    residual: float

    @property
    def default_set(self) -> frozenset[BankId]:
        return frozenset(v for v, r in self.recovery.items() if r < 1.0 - 1e-9)


_state_observer: Optional[Callable[[ClearingState], None]] = None


def set_state_observer(observer: Optional[Callable[[ClearingState], None]]) -> None:
    """Install a callback invoked on every ClearingState built (None clears)."""
    global _state_observer
    _state_observer = observer


def _check_vector(system: FinancialSystem, r: Mapping[BankId, float]) -> np.ndarray:
    cs = system.compiled
    extra = set(r) - set(cs.ids)
    missing = set(cs.ids) - set(r)
    if extra or missing:
        parts = []
        if missing:
            parts.append("missing banks " + ", ".join(sorted(missing)))
        if extra:
            parts.append("unknown banks " + ", ".join(sorted(map(str, extra))))
        raise InputError("bad recovery vector: " + "; ".join(parts))
    row = cs.vector(r)
    if not np.all(np.isfinite(row)):
        raise InputError("bad recovery vector: non-finite entry")
    if np.any(row < -1e-12) or np.any(row > 1.0 + 1e-12):
        raise InputError("bad recovery vector: entries must lie in [0, 1]")
    return np.clip(row, 0.0, 1.0)


def state_from_row(system: FinancialSystem, row: np.ndarray) -> ClearingState:
    """Build a ClearingState from a canonical-order (V,) recovery array."""
    cs = system.compiled
    ev = _engine.evaluate(cs, row[None, :])
    liab = ev["liab"][0]
    pay = ev["pay"][0]
    levels = ev["levels"][0]
    totals = ev["totals"][0]
    assets = ev["assets"][0]

    pairwise: dict[tuple[BankId, BankId], float] = {}
    payments: dict[tuple[BankId, BankId], float] = {}
    for j, c in enumerate(system.contracts):
        key = (c.debtor, c.creditor)
        pairwise[key] = pairwise.get(key, 0.0) + float(liab[j])
        payments[key] = payments.get(key, 0.0) + float(pay[j])

    ledger = LiabilityLedger(
        pairwise=pairwise,
        totals={bank_id: float(totals[i]) for i, bank_id in enumerate(cs.ids)},
        by_level={
            bank_id: tuple(float(x) for x in levels[i]) for i, bank_id in enumerate(cs.ids)
        },
    )
    payoffs = {
        bank_id: float(max(assets[i] - totals[i], 0.0)) for i, bank_id in enumerate(cs.ids)
    }
    state = ClearingState(
        system=system,
        recovery=cs.mapping(row),
        ledger=ledger,
        contract_liabilities=tuple(float(x) for x in liab),
        contract_payments=tuple(float(x) for x in pay),
        payments=payments,
        assets={bank_id: float(assets[i]) for i, bank_id in enumerate(cs.ids)},
        payoffs=payoffs,
        update=cs.mapping(ev["F"][0]),
        residual=float(ev["residual"][0]),
    )
    if _state_observer is not None:
        _state_observer(state)
    return state


def liabilities(system: FinancialSystem, r: Mapping[BankId, float]) -> LiabilityLedger:
    """Liability ledger at r: pairwise, per-bank totals and per-level splits."""
    return clearing_state(system, r).ledger


def payments(system: FinancialSystem, r: Mapping[BankId, float]) -> dict[tuple[BankId, BankId], float]:
    """Pairwise payments at r under the seniority waterfall."""
    return dict(clearing_state(system, r).payments)


def clearing_state(system: FinancialSystem, r: Mapping[BankId, float]) -> ClearingState:
    """Full snapshot at r: liabilities, payments, assets, payoffs, residual."""
    return state_from_row(system, _check_vector(system, r))


def update(system: FinancialSystem, r: Mapping[BankId, float]) -> dict[BankId, float]:
    """One application of the update map f at r."""
    cs = system.compiled
    row = _check_vector(system, r)
    return cs.mapping(_engine.evaluate(cs, row[None, :])["F"][0])


def residual(system: FinancialSystem, r: Mapping[BankId, float]) -> float:
    """Max-norm distance between f(r) and r; 0 exactly at a solution."""
    cs = system.compiled
    row = _check_vector(system, r)
    return float(_engine.evaluate(cs, row[None, :])["residual"][0])
