"""Command line interface.

Exit codes: 0 success, 1 usage errors, 2 document/validation/action errors,
3 solver capability errors. Results go to stdout (text by default, JSON with
--format json); errors go to stderr. The default solver tolerance can be set
with the NETCLEAR_TOLERANCE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import document as doc
from .games import (
    GameError,
    auction_new,
    auction_run,
    auction_solutions,
    find_dominant,
    find_pure_nash,
    payoff_matrix,
)
from .interventions import (
    ActionError,
    Donate,
    InjectOwnAssets,
    RemoveIncomingDebt,
    Reprioritize,
    acting_bank,
    assess,
    optimize_partial_removal,
)
from .model import InputError, InvalidSystemError, validate_system
from .scenarios import _CATALOGUE, build_scenario
from .solver import SolverCapabilityError, SolverConfig, find_solutions

TOLERANCE_ENV = "NETCLEAR_TOLERANCE"


class UsageError(Exception):
    """Bad flag combinations detected after argparse."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for validation
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return SolverConfig.tolerance
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOLERANCE_ENV} is not a number: {raw!r}") from None


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise doc.DocumentError(f"cannot read {path}: {exc.strerror}") from None


def _load_system(path: str):
    system = doc.parse_document(_read_source(path))
    report = validate_system(system)
    if not report.ok:
        raise InvalidSystemError(report.violations)
    return system


def _config(args) -> SolverConfig:
    kwargs = {"tolerance": args.tol}
    if getattr(args, "seed", None) is not None:
        kwargs["seed"] = args.seed
    return SolverConfig(**kwargs)


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _fmt(value: float) -> str:
    return format(float(value), ".6g")


def _fmt_map(mapping) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in sorted(mapping.items()))


def _render_solutions(solutions, shown) -> str:
    lines = [
        f"{len(solutions)} solution{'s' if len(solutions) != 1 else ''}"
        f" ({solutions.flag}), tolerance {solutions.tolerance:g}"
    ]
    for i, state in enumerate(shown, start=1):
        lines.append(
            f"[{i}] r: {_fmt_map(state.recovery)} | payoffs: {_fmt_map(state.payoffs)}"
            f" | residual {state.residual:.3g}"
        )
    if len(shown) < len(solutions):
        lines.append(f"... {len(solutions) - len(shown)} more, use --all")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    try:
        system = doc.parse_document(_read_source(args.path))
    except doc.DocumentError as exc:
        _emit(args, {"ok": False, "violations": [str(exc)]}, f"invalid: {exc}")
        return 2
    report = validate_system(system)
    if report.ok:
        _emit(
            args,
            {"ok": True, "violations": []},
            f"ok: {len(system.banks)} banks, {len(system.contracts)} contracts",
        )
        return 0
    text = "\n".join(["invalid:"] + [f"  - {v}" for v in report.violations])
    _emit(args, {"ok": False, "violations": list(report.violations)}, text)
    return 2


def cmd_solve(args) -> int:
    system = _load_system(args.path)
    solutions = find_solutions(system, _config(args))
    shown = list(solutions) if args.all else list(solutions)[:1]
    payload = doc.system_to_document(system)
    payload["solutions"] = doc.solution_set_to_dict(solutions)
    if not args.all:
        payload["solutions"]["solutions"] = payload["solutions"]["solutions"][:1]
    _emit(args, payload, _render_solutions(solutions, shown))
    return 0


def _action_from_args(system, args):
    chosen = [
        flag
        for flag, on in (
            ("--remove-debt", args.remove_debt is not None),
            ("--donate-to", args.donate_to is not None),
            ("--inject", args.inject),
            ("--set-priority", bool(args.set_priority)),
        )
        if on
    ]
    if len(chosen) != 1:
        raise UsageError(
            "pick exactly one of --remove-debt, --donate-to, --inject, --set-priority"
        )
    if args.remove_debt is not None:
        index = doc.resolve_contract(system, _contract_ref(args.remove_debt), "debt")
        return RemoveIncomingDebt(index, args.gamma)
    if args.donate_to is not None:
        if args.bank is None:
            raise UsageError("--donate-to needs --bank (the donor)")
        if args.amount is None:
            raise UsageError("--donate-to needs --amount")
        return Donate(args.bank, args.donate_to, args.amount)
    if args.inject:
        if args.bank is None or args.amount is None:
            raise UsageError("--inject needs --bank and --amount")
        return InjectOwnAssets(args.bank, args.amount)
    if args.bank is None:
        raise UsageError("--set-priority needs --bank (the debtor)")
    priorities = {}
    for item in args.set_priority:
        ref, sep, level = item.rpartition("=")
        if not sep:
            raise UsageError(f"--set-priority expects CONTRACT=LEVEL, got {item!r}")
        try:
            priorities[doc.resolve_contract(system, _contract_ref(ref))] = int(level)
        except ValueError:
            raise UsageError(f"priority level must be an integer, got {level!r}") from None
    return Reprioritize(args.bank, priorities)


def _contract_ref(text: str):
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    return text


def cmd_assess(args) -> int:
    system = _load_system(args.path)
    action = _action_from_args(system, args)
    acting = args.bank if args.bank is not None else acting_bank(system, action)
    report = assess(system, action, acting=acting, config=_config(args))
    text = "\n".join(
        [
            f"acting bank: {report.acting}",
            f"action: {json.dumps(doc.action_to_dict(report.action))}",
            f"cost: {_fmt(report.cost)}",
            f"payoffs before: [{', '.join(map(_fmt, report.payoffs_before))}]"
            f" ({report.before.flag})",
            f"payoffs after:  [{', '.join(map(_fmt, report.payoffs_after))}]"
            f" ({report.after.flag})",
            f"recoveries before: [{', '.join(map(_fmt, report.recoveries_before))}]",
            f"recoveries after:  [{', '.join(map(_fmt, report.recoveries_after))}]",
            f"delta min net: {_fmt(report.delta_min_net)}",
            f"delta max net: {_fmt(report.delta_max_net)}",
        ]
    )
    _emit(args, doc.effect_report_to_dict(report), text)
    return 0


def cmd_scan_gamma(args) -> int:
    system = _load_system(args.path)
    index = doc.resolve_contract(system, _contract_ref(args.contract), "debt")
    scan = optimize_partial_removal(
        system,
        index,
        acting=args.bank,
        grid_steps=args.steps,
        objective=args.objective,
        config=_config(args),
    )
    lines = [f"gamma={g:.6g} payoff={p:.9g}" for g, p in scan.curve]
    lines.append(f"best: gamma={scan.gamma_star:.6g} payoff={scan.payoff:.9g}")
    _emit(args, doc.gamma_scan_to_dict(scan), "\n".join(lines))
    return 0


def _scenario_params(args) -> dict:
    params = {}
    for key in ("gamma0", "delta", "k", "epsilon", "e_u", "e_v"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


def cmd_game(args) -> int:
    scenario = build_scenario(args.name, **_scenario_params(args))
    if scenario.kind != "matrix":
        raise GameError(
            f"scenario {args.name!r} is {scenario.kind}; this command handles matrix games"
        )
    matrix = payoff_matrix(scenario, _config(args))
    nash = find_pure_nash(matrix)
    dominant = {p: find_dominant(matrix, p) for p in matrix.players}

    show_all = not (args.matrix or args.nash or args.dominant)
    lines = [f"game: {args.name}", "players: " + ", ".join(matrix.players)]
    if args.matrix or show_all:
        lines.append("payoffs (worst case over solutions):")
        for profile in matrix.profiles():
            cell = matrix.cells[profile]
            mark = "" if cell.flag in ("unique",) else f"  [{cell.flag}]"
            lines.append(
                f"  {'/'.join(profile)}: ("
                + ", ".join(f"{p:.3f}" for p in cell.payoffs)
                + ")"
                + mark
            )
    if args.nash or show_all:
        if nash:
            for profile in nash:
                cell = matrix.cells[profile]
                lines.append(
                    f"nash equilibrium: {'/'.join(profile)} payoffs ("
                    + ", ".join(f"{p:.3f}" for p in cell.payoffs)
                    + ")"
                )
        else:
            lines.append("nash equilibrium: none (pure)")
    if args.dominant or show_all:
        for player in matrix.players:
            lines.append(f"dominant for {player}: {dominant[player] or 'none'}")

    payload = doc.matrix_to_dict(matrix)
    payload["nash"] = [list(p) for p in nash]
    payload["dominant"] = dominant
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_auction(args) -> int:
    state = auction_new(
        args.epsilon, e_u=args.e_u, e_v=args.e_v, budget=args.budget
    )
    state = auction_run(state, args.rounds, first=args.first)
    outcome = auction_solutions(state)
    lines = []
    for i, move in enumerate(state.history, start=1):
        if move.passed:
            lines.append(f"round {i}: {move.player} passes, auction halts")
        else:
            target = "v" if move.player == "u_prime" else "u"
            lines.append(
                f"round {i}: {move.player} donates {move.donation:.6g} to {target}"
                f" (cost {move.cost:.6g}, payoff {move.payoff:.6g}, gain {move.gain:.6g})"
                f" e_u={move.e_u:.6g} e_v={move.e_v:.6g}"
            )
    lines.append(
        f"after {len(state.history)} rounds: e_u={state.e_u:.6g} e_v={state.e_v:.6g}"
        f" spent u_prime={state.spent_u_prime:.6g} v_prime={state.spent_v_prime:.6g}"
    )
    lines.append(
        f"position: {outcome.case}"
        f" q_u_prime={outcome.q_u_prime:.6g} q_v_prime={outcome.q_v_prime:.6g}"
    )
    payload = doc.auction_state_to_dict(state)
    payload["outcome"] = doc.auction_outcome_to_dict(outcome)
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(snapshot_dir=args.snapshot_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netclear", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument(
            "--tol",
            type=float,
            default=None,
            help=f"solver tolerance (default {SolverConfig.tolerance:g} or ${TOLERANCE_ENV})",
        )
        if seed:
            p.add_argument("--seed", type=int, default=None, help="multistart rng seed")

    p = sub.add_parser("validate", help="check a system document")
    p.add_argument("path", help="JSON file or - for stdin")
    common(p, seed=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="find clearing solutions")
    p.add_argument("path")
    p.add_argument("--all", action="store_true", help="print every solution found")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("assess", help="evaluate one action before/after")
    p.add_argument("path")
    p.add_argument("--bank", help="acting bank (inferred when possible)")
    p.add_argument("--remove-debt", metavar="CONTRACT", help="debt to remove ('u->v', '#i' or index)")
    p.add_argument("--gamma", type=float, default=1.0, help="fraction removed (default 1)")
    p.add_argument("--donate-to", metavar="BANK")
    p.add_argument("--inject", action="store_true")
    p.add_argument("--amount", type=float)
    p.add_argument(
        "--set-priority",
        action="append",
        default=[],
        metavar="CONTRACT=LEVEL",
        help="repeatable priority reassignment",
    )
    common(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("scan-gamma", help="sweep partial removal fractions")
    p.add_argument("path")
    p.add_argument("--contract", required=True, help="debt to scan ('u->v', '#i' or index)")
    p.add_argument("--bank", help="acting creditor (inferred when possible)")
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--objective", choices=("worst_case", "expected"), default="worst_case")
    common(p)
    p.set_defaults(func=cmd_scan_gamma)

    p = sub.add_parser("game", help="solve a built-in scenario's payoff matrix")
    p.add_argument("name", choices=sorted(_CATALOGUE))
    p.add_argument("--gamma0", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--matrix", action="store_true", help="print the payoff matrix")
    p.add_argument("--nash", action="store_true", help="print pure equilibria")
    p.add_argument("--dominant", action="store_true", help="print dominant strategies")
    common(p)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("auction", help="run the dollar auction")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--e-u", dest="e_u", type=float, default=0.0)
    p.add_argument("--e-v", dest="e_v", type=float, default=0.0)
    p.add_argument("--budget", type=float, default=0.5)
    p.add_argument("--first", choices=("u_prime", "v_prime"), default="u_prime")
    common(p, seed=False)
    p.set_defaults(func=cmd_auction)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--snapshot-dir", default=None, help="persist sessions as JSON here")
    p.set_defaults(func=cmd_serve, format="text")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if getattr(args, "tol", None) is None and hasattr(args, "tol"):
            args.tol = _default_tolerance()
        return args.func(args)
    except UsageError as exc:
        print(f"netclear: error: {exc}", file=sys.stderr)
        return 1
    except (doc.DocumentError, InvalidSystemError, InputError, ActionError, GameError) as exc:
        print(f"netclear: {exc}", file=sys.stderr)
        return 2
    except SolverCapabilityError as exc:
        print(f"netclear: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
