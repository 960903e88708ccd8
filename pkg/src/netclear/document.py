"""JSON document format for systems, actions and results.

A system document looks like

    {
      "priority_levels": 2,
      "banks": [{"id": "u", "external_assets": 2}, ...],
      "contracts": [
        {"debtor": "u", "creditor": "v", "notional": 2, "kind": "debt",
         "priority": 1},
        {"debtor": "w", "creditor": "v", "notional": 2, "kind": "cds",
         "reference": "u", "priority": 1}
      ]
    }

Numbers may be JSON numbers or decimal strings ("0.1"). Parse errors carry
the JSON path of the offending field; syntax errors carry line and column.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Optional, Union

from .model import CDS, DEBT, Bank, Contract, FinancialSystem
from .interventions import (
    Action,
    ActionError,
    Donate,
    EffectReport,
    GammaScan,
    InjectOwnAssets,
    RemoveIncomingDebt,
    Reprioritize,
)
from .solver import IterationResult, SolutionSet
from .model import ClearingState
from .games import AuctionMove, AuctionOutcome, AuctionState, PayoffMatrix

__all__ = [
    "DocumentError",
    "parse_document",
    "system_to_document",
    "action_from_dict",
    "action_to_dict",
    "resolve_contract",
    "state_to_dict",
    "solution_set_to_dict",
    "effect_report_to_dict",
    "gamma_scan_to_dict",
    "matrix_to_dict",
    "auction_state_to_dict",
    "auction_outcome_to_dict",
]


class DocumentError(ValueError):
    """Malformed document; the message names the offending location."""


def _fail(path: str, message: str):
    raise DocumentError(f"{path}: {message}")


def _get(obj: Mapping, path: str, key: str, required: bool = True, default=None):
    if not isinstance(obj, Mapping):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        if required:
            _fail(path, f"missing required field {key!r}")
        return default
    return obj[key]


def _number(value: Any, path: str) -> float:
    """Accept JSON numbers and decimal strings; bool is not a number here."""
    if isinstance(value, bool):
        _fail(path, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            _fail(path, f"not a decimal number: {value!r}")
    _fail(path, f"expected a number, got {type(value).__name__}")


def _integer(value: Any, path: str) -> int:
    number = _number(value, path)
    if number != int(number):
        _fail(path, f"expected an integer, got {value!r}")
    return int(number)


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        _fail(path, f"expected a non-empty string, got {value!r}")
    return value


def parse_document(source: Union[str, bytes, Mapping]) -> FinancialSystem:
    """Parse a system document (JSON text or an already-decoded mapping).

    Only structural checks happen here; run validate_system on the result for
    the semantic ones (unknown banks, bad references, value ranges).
    """
    if isinstance(source, (str, bytes)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    else:
        data = source
    if not isinstance(data, Mapping):
        _fail("$", f"expected a JSON object, got {type(data).__name__}")

    levels_raw = _get(data, "$", "priority_levels", required=False, default=1)
    levels = _integer(levels_raw, "$.priority_levels")

    banks_raw = _get(data, "$", "banks")
    if not isinstance(banks_raw, list):
        _fail("$.banks", "expected an array")
    banks = []
    for i, item in enumerate(banks_raw):
        path = f"$.banks[{i}]"
        banks.append(
            Bank(
                id=_string(_get(item, path, "id"), f"{path}.id"),
                external_assets=_number(
                    _get(item, path, "external_assets"), f"{path}.external_assets"
                ),
            )
        )

    contracts_raw = _get(data, "$", "contracts", required=False, default=[])
    if not isinstance(contracts_raw, list):
        _fail("$.contracts", "expected an array")
    contracts = []
    for i, item in enumerate(contracts_raw):
        path = f"$.contracts[{i}]"
        kind = _get(item, path, "kind", required=False, default=DEBT)
        if kind not in (DEBT, CDS):
            _fail(f"{path}.kind", f"expected 'debt' or 'cds', got {kind!r}")
        reference = _get(item, path, "reference", required=(kind == CDS), default=None)
        if reference is not None:
            reference = _string(reference, f"{path}.reference")
        contracts.append(
            Contract(
                debtor=_string(_get(item, path, "debtor"), f"{path}.debtor"),
                creditor=_string(_get(item, path, "creditor"), f"{path}.creditor"),
                notional=_number(_get(item, path, "notional"), f"{path}.notional"),
                kind=kind,
                reference=reference,
                priority=_integer(
                    _get(item, path, "priority", required=False, default=1),
                    f"{path}.priority",
                ),
            )
        )
    return FinancialSystem(banks, contracts, levels)


def _plain_number(value: float):
    """Render integral floats as ints to keep documents tidy."""
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return int(value)
    return value


def system_to_document(system: FinancialSystem) -> dict:
    doc: dict = {"priority_levels": system.priority_levels}
    doc["banks"] = [
        {"id": b.id, "external_assets": _plain_number(b.external_assets)}
        for b in system.banks
    ]
    contracts = []
    for c in system.contracts:
        row = {
            "debtor": c.debtor,
            "creditor": c.creditor,
            "notional": _plain_number(c.notional),
            "kind": c.kind,
            "priority": c.priority,
        }
        if c.kind == CDS:
            row["reference"] = c.reference
        contracts.append(row)
    doc["contracts"] = contracts
    return doc


# ---------------------------------------------------------------------------
# contract references and actions


def resolve_contract(system: FinancialSystem, ref, want_kind: Optional[str] = None) -> int:
    """Resolve a contract reference to an index.

    Accepts an integer index, a {"debtor": ..., "creditor": ...} object, or a
    "debtor->creditor" / "#index" string. Pair references must be unambiguous.
    """
    if isinstance(ref, bool):
        raise ActionError(f"bad contract reference {ref!r}")
    if isinstance(ref, int):
        index = ref
    elif isinstance(ref, str):
        if ref.startswith("#"):
            try:
                index = int(ref[1:])
            except ValueError:
                raise ActionError(f"bad contract reference {ref!r}") from None
        elif "->" in ref:
            debtor, _, creditor = ref.partition("->")
            return resolve_contract(
                system,
                {"debtor": debtor.strip(), "creditor": creditor.strip()},
                want_kind,
            )
        else:
            raise ActionError(
                f"bad contract reference {ref!r}; use an index, '#i' or 'debtor->creditor'"
            )
    elif isinstance(ref, Mapping):
        debtor = ref.get("debtor")
        creditor = ref.get("creditor")
        if not isinstance(debtor, str) or not isinstance(creditor, str):
            raise ActionError("contract reference object needs string debtor and creditor")
        matches = system.find_contracts(debtor=debtor, creditor=creditor, kind=want_kind)
        if not matches:
            raise ActionError(f"no {want_kind or 'contract'} {debtor}->{creditor}")
        if len(matches) > 1:
            raise ActionError(
                f"{debtor}->{creditor} is ambiguous ({len(matches)} contracts); use an index"
            )
        return matches[0]
    else:
        raise ActionError(f"bad contract reference {ref!r}")
    if not (0 <= index < len(system.contracts)):
        raise ActionError(
            f"contract #{index} not found ({len(system.contracts)} contracts)"
        )
    if want_kind is not None and system.contracts[index].kind != want_kind:
        raise ActionError(
            f"contract #{index} is a {system.contracts[index].kind}, expected {want_kind}"
        )
    return index


def action_from_dict(system: FinancialSystem, data: Mapping) -> Action:
    """Decode an action object against a concrete system."""
    if not isinstance(data, Mapping):
        raise ActionError(f"action must be an object, got {type(data).__name__}")
    kind = data.get("type")
    if kind == "remove_incoming_debt":
        index = resolve_contract(system, data.get("contract"), want_kind=DEBT)
        fraction = data.get("fraction", data.get("gamma", 1.0))
        return RemoveIncomingDebt(index, _number(fraction, "$.fraction"))
    if kind == "donate":
        return Donate(
            source=_string(data.get("from"), "$.from"),
            target=_string(data.get("to"), "$.to"),
            amount=_number(data.get("amount"), "$.amount"),
        )
    if kind == "inject_own_assets":
        return InjectOwnAssets(
            bank=_string(data.get("bank"), "$.bank"),
            amount=_number(data.get("amount"), "$.amount"),
        )
    if kind == "reprioritize":
        bank = _string(data.get("bank"), "$.bank")
        raw = data.get("priorities")
        if not isinstance(raw, list) or not raw:
            raise ActionError("reprioritize needs a non-empty priorities array")
        priorities: dict[int, int] = {}
        for i, item in enumerate(raw):
            if not isinstance(item, Mapping):
                raise ActionError(f"priorities[{i}] must be an object")
            index = resolve_contract(system, item.get("contract"))
            priorities[index] = _integer(item.get("priority"), f"$.priorities[{i}].priority")
        return Reprioritize(bank, priorities)
    raise ActionError(
        f"unknown action type {kind!r}; expected remove_incoming_debt, donate, "
        "inject_own_assets or reprioritize"
    )


def action_to_dict(action: Action) -> dict:
    if isinstance(action, RemoveIncomingDebt):
        return {
            "type": "remove_incoming_debt",
            "contract": action.contract,
            "fraction": action.fraction,
        }
    if isinstance(action, Donate):
        return {
            "type": "donate",
            "from": action.source,
            "to": action.target,
            "amount": action.amount,
        }
    if isinstance(action, InjectOwnAssets):
        return {"type": "inject_own_assets", "bank": action.bank, "amount": action.amount}
    if isinstance(action, Reprioritize):
        return {
            "type": "reprioritize",
            "bank": action.bank,
            "priorities": [
                {"contract": index, "priority": level}
                for index, level in sorted(action.priorities.items())
            ],
        }
    raise ActionError(f"unknown action type {type(action).__name__}")


# ---------------------------------------------------------------------------
# result serialization


def state_to_dict(state: ClearingState) -> dict:
    ids = sorted(state.recovery)
    return {
        "recovery": {v: state.recovery[v] for v in ids},
        "assets": {v: state.assets[v] for v in ids},
        "liabilities": {v: state.ledger.totals[v] for v in ids},
        "payoffs": {v: state.payoffs[v] for v in ids},
        "payments": [
            {"debtor": d, "creditor": c, "amount": amount}
            for (d, c), amount in sorted(state.payments.items())
        ],
        "default": sorted(state.default_set),
        "residual": state.residual,
    }


def solution_set_to_dict(solutions: SolutionSet) -> dict:
    return {
        "count": len(solutions),
        "flag": solutions.flag,
        "tolerance": solutions.tolerance,
        "solutions": [state_to_dict(s) for s in solutions],
    }


def iteration_result_to_dict(result: IterationResult) -> dict:
    return {
        "converged": result.converged,
        "recovery": {v: result.recovery[v] for v in sorted(result.recovery)},
        "residual": result.residual,
        "iterations": result.iterations,
    }


def effect_report_to_dict(report: EffectReport) -> dict:
    return {
        "acting": report.acting,
        "action": action_to_dict(report.action),
        "cost": report.cost,
        "before": solution_set_to_dict(report.before),
        "after": solution_set_to_dict(report.after),
        "payoffs_before": list(report.payoffs_before),
        "payoffs_after": list(report.payoffs_after),
        "recoveries_before": list(report.recoveries_before),
        "recoveries_after": list(report.recoveries_after),
        "delta_min_net": report.delta_min_net,
        "delta_max_net": report.delta_max_net,
    }


def gamma_scan_to_dict(scan: GammaScan) -> dict:
    return {
        "contract": scan.contract,
        "acting": scan.acting,
        "objective": scan.objective,
        "curve": [{"gamma": g, "payoff": p} for g, p in scan.curve],
        "gamma_star": scan.gamma_star,
        "payoff": scan.payoff,
    }


def matrix_to_dict(matrix: PayoffMatrix) -> dict:
    return {
        "scenario": matrix.scenario,
        "players": list(matrix.players),
        "strategies": [list(names) for names in matrix.strategy_names],
        "cells": [
            {
                "profile": list(profile),
                "payoffs": list(cell.payoffs),
                "costs": list(cell.costs),
                "flag": cell.flag,
                "solutions": len(cell.solutions),
            }
            for profile, cell in matrix.cells.items()
        ],
    }


def auction_move_to_dict(move: AuctionMove) -> dict:
    return {
        "player": move.player,
        "donation": move.donation,
        "cost": move.cost,
        "payoff": move.payoff,
        "gain": move.gain,
        "e_u": move.e_u,
        "e_v": move.e_v,
        "passed": move.passed,
    }


def auction_state_to_dict(state: AuctionState) -> dict:
    return {
        "epsilon": state.epsilon,
        "delta": state.delta,
        "budget": state.budget,
        "e_u": state.e_u,
        "e_v": state.e_v,
        "spent": {"u_prime": state.spent_u_prime, "v_prime": state.spent_v_prime},
        "halted": state.halted,
        "rounds": len(state.history),
        "history": [auction_move_to_dict(m) for m in state.history],
    }


def auction_outcome_to_dict(outcome: AuctionOutcome) -> dict:
    return {
        "case": outcome.case,
        "r_u": outcome.r_u,
        "r_v": outcome.r_v,
        "family_sum": outcome.family_sum,
        "q_u_prime": outcome.q_u_prime,
        "q_v_prime": outcome.q_v_prime,
    }
