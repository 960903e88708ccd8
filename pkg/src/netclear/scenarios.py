"""Built-in scenario catalogue.

Each scenario is a small financial network that makes one strategic effect
visible in isolation, together with the players and strategy menus that turn
it into a game. Canonical instances are also bundled as JSON documents under
netclear/scenarios/ so they can be loaded as data.
"""

from __future__ import annotations

import json
from importlib import resources

from .games import GameError, GameScenario, Strategy, dollar_auction_system
from .interventions import Donate, InjectOwnAssets, RemoveIncomingDebt, Reprioritize
from .model import Bank, Contract, FinancialSystem

__all__ = [
    "build_scenario",
    "list_scenarios",
    "load_scenario_document",
    "document_names",
    "BUNDLED_DOCUMENTS",
]


def _basic_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(Bank("u", 2.0), Bank("v", 1.0), Bank("w", 0.0)),
        contracts=(
            Contract("u", "v", 2.0),
            Contract("u", "w", 2.0),
            Contract("w", "v", 2.0, kind="cds", reference="u"),
        ),
    )


def _basic_prioritized_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(Bank("u", 2.0), Bank("v", 1.0), Bank("w", 0.0)),
        contracts=(
            Contract("u", "v", 2.0, priority=2),
            Contract("u", "w", 2.0, priority=1),
            Contract("w", "v", 2.0, kind="cds", reference="u", priority=2),
        ),
        priority_levels=2,
    )


def _remove_debt_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("u", 1.0),
            Bank("v", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("s1", 2.0),
            Bank("s2", 2.0),
        ),
        contracts=(
            Contract("u", "v", 1.0),
            Contract("u", "t", 1.0),
            Contract("w", "t", 1.0),
            Contract("s1", "w", 2.0, kind="cds", reference="u"),
            Contract("s2", "v", 2.0, kind="cds", reference="w"),
        ),
    )


def _partial_removal_system(gamma0: float) -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("u", 2.0 - gamma0),
            Bank("v", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("s1", 2.0 / gamma0),
            Bank("s2", 2.0),
        ),
        contracts=(
            Contract("u", "v", 1.0),
            Contract("u", "t", 1.0),
            Contract("w", "t", 1.0),
            Contract("s1", "w", 2.0 / gamma0, kind="cds", reference="u"),
            Contract("s2", "v", 2.0, kind="cds", reference="w"),
        ),
    )


def _inject_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("u", 0.0),
            Bank("v", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("s1", 1.0),
            Bank("s2", 100.0),
        ),
        contracts=(
            Contract("v", "u", 1.0),
            Contract("u", "t", 1.0),
            Contract("w", "t", 1.0),
            Contract("s1", "w", 1.0, kind="cds", reference="u"),
            Contract("s2", "v", 100.0, kind="cds", reference="w"),
        ),
    )


def _reprioritize_system(delta: float) -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("v", 2.0),
            Bank("u", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("s1", 2.0),
            Bank("s2", delta),
        ),
        contracts=(
            Contract("v", "u", 2.0, priority=2),
            Contract("v", "t", 4.0, priority=2),
            Contract("u", "v", 2.0, priority=2),
            Contract("w", "t", 1.0, priority=2),
            Contract("s1", "w", 2.0, kind="cds", reference="u", priority=2),
            Contract("s2", "v", delta, kind="cds", reference="w", priority=2),
        ),
        priority_levels=2,
    )


def _prisoners_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("u", 5.0),
            Bank("v1", 0.0),
            Bank("v2", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("sw", 1.0),
            Bank("s1", 3.0),
            Bank("s2", 3.0),
        ),
        contracts=(
            Contract("u", "v1", 5.0),
            Contract("u", "v2", 5.0),
            Contract("u", "t", 5.0),
            Contract("w", "t", 1.0),
            Contract("sw", "w", 1.0, kind="cds", reference="u"),
            Contract("s1", "v1", 3.0, kind="cds", reference="w"),
            Contract("s2", "v2", 3.0, kind="cds", reference="w"),
        ),
    )


def _stag_hunt_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("u1", 2.0),
            Bank("u2", 2.0),
            Bank("v1", 0.0),
            Bank("v2", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("sa", 2.0),
            Bank("sb", 2.0),
            Bank("s1", 3.0),
            Bank("s2", 3.0),
        ),
        contracts=(
            Contract("u1", "v1", 2.0),
            Contract("u1", "t", 2.0),
            Contract("u2", "v2", 2.0),
            Contract("u2", "t", 2.0),
            Contract("w", "t", 1.0),
            Contract("sa", "w", 2.0, kind="cds", reference="u1"),
            Contract("sb", "w", 2.0, kind="cds", reference="u2"),
            Contract("s1", "v1", 3.0, kind="cds", reference="w"),
            Contract("s2", "v2", 3.0, kind="cds", reference="w"),
        ),
    )


def _chicken_system() -> FinancialSystem:
    return FinancialSystem(
        banks=(
            Bank("u", 0.0),
            Bank("v1", 0.0),
            Bank("v2", 0.0),
            Bank("w", 0.0),
            Bank("t", 0.0),
            Bank("sw", 1.0),
            Bank("s1", 3.0),
            Bank("s2", 3.0),
        ),
        contracts=(
            Contract("u", "t", 1.0),
            Contract("w", "t", 1.0),
            Contract("sw", "w", 1.0, kind="cds", reference="u"),
            Contract("s1", "v1", 3.0, kind="cds", reference="w"),
            Contract("s2", "v2", 3.0, kind="cds", reference="w"),
        ),
    )


def _volunteer_system(k: int) -> FinancialSystem:
    creditors = tuple(f"v{i}" for i in range(1, k + 1))
    banks = (
        Bank("u", 0.0),
        Bank("w", 0.0),
        Bank("t", 0.0),
        Bank("sw", 1.0),
        Bank("s", 3.0 * k),
    ) + tuple(Bank(v, 0.0) for v in creditors)
    contracts = (
        Contract("u", "t", 1.0),
        Contract("w", "t", 1.0),
        Contract("sw", "w", 1.0, kind="cds", reference="u"),
    ) + tuple(Contract("s", v, 3.0, kind="cds", reference="w") for v in creditors)
    return FinancialSystem(banks, contracts)


def _act_or_not(player, act_name, action, idle_name="keep"):
    return {player: (Strategy(act_name, action), Strategy(idle_name, None))}


def _remove_scenario(system, player, debtor, fraction, params, name, description):
    index = system.find_contracts(debtor=debtor, creditor=player, kind="debt")[0]
    return GameScenario(
        name=name,
        system=system,
        players=(player,),
        strategies=_act_or_not(player, "remove", RemoveIncomingDebt(index, fraction)),
        params=params,
        kind="matrix",
        description=description,
    )


def _build_basic(params):
    return GameScenario(
        name="basic",
        system=_basic_system(),
        players=(),
        strategies={},
        params={},
        kind="single",
        description="three banks and one CDS; the common debtor recovers one half",
    )


def _build_basic_prioritized(params):
    return GameScenario(
        name="basic_prioritized",
        system=_basic_prioritized_system(),
        players=(),
        strategies={},
        params={},
        kind="single",
        description="the same book with the CDS-referenced debt made senior",
    )


def _build_remove_debt(params):
    return _remove_scenario(
        _remove_debt_system(),
        "v",
        "u",
        1.0,
        {},
        "remove_debt",
        "a creditor quadruples its payoff by forgiving an incoming debt",
    )


def _build_partial_removal(params):
    gamma0 = params["gamma0"]
    return _remove_scenario(
        _partial_removal_system(gamma0),
        "v",
        "u",
        gamma0,
        {"gamma0": gamma0},
        "partial_removal",
        "forgiving a fraction of a debt pays best exactly at gamma0",
    )


def _build_inject(params):
    return GameScenario(
        name="inject",
        system=_inject_system(),
        players=("v",),
        strategies=_act_or_not("v", "inject", InjectOwnAssets("v", 1.0), "hold"),
        params={},
        kind="matrix",
        description="an own-assets injection kills the bad one of two equilibria",
    )


def _build_reprioritize(params):
    delta = params["delta"]
    system = _reprioritize_system(delta)
    index = system.find_contracts(debtor="v", creditor="u", kind="debt")[0]
    return GameScenario(
        name="reprioritize",
        system=system,
        players=("v",),
        strategies=_act_or_not("v", "raise", Reprioritize("v", {index: 1})),
        params={"delta": delta},
        kind="matrix",
        description="making one outgoing debt senior feeds back into the debtor's own recovery",
    )


def _two_creditor_removal(system, name, description):
    strategies = {}
    for player in ("v1", "v2"):
        index = system.find_contracts(creditor=player, kind="debt")[0]
        strategies[player] = (
            Strategy("cooperate", RemoveIncomingDebt(index, 1.0)),
            Strategy("defect", None),
        )
    return GameScenario(
        name=name,
        system=system,
        players=("v1", "v2"),
        strategies=strategies,
        params={},
        kind="matrix",
        description=description,
    )


def _build_prisoners(params):
    return _two_creditor_removal(
        _prisoners_system(),
        "prisoners",
        "mutual debt forgiveness beats mutual holding out, but holding out dominates",
    )


def _build_stag_hunt(params):
    return _two_creditor_removal(
        _stag_hunt_system(),
        "stag_hunt",
        "forgiveness pays only when both creditors coordinate on it",
    )


def _build_chicken(params):
    system = _chicken_system()
    strategies = {
        player: (
            Strategy("cooperate", Donate(player, "u", 1.0)),
            Strategy("defect", None),
        )
        for player in ("v1", "v2")
    }
    return GameScenario(
        name="chicken",
        system=system,
        players=("v1", "v2"),
        strategies=strategies,
        params={},
        kind="matrix",
        description="either creditor can rescue the reference bank; each prefers the other one pays",
    )


def _build_volunteer(params):
    k = params["k"]
    system = _volunteer_system(k)
    players = tuple(f"v{i}" for i in range(1, k + 1))
    strategies = {
        player: (
            Strategy("cooperate", Donate(player, "u", 1.0)),
            Strategy("defect", None),
        )
        for player in players
    }
    return GameScenario(
        name="volunteer",
        system=system,
        players=players,
        strategies=strategies,
        params={"k": k},
        kind="matrix",
        description="one donation rescues every creditor; nobody wants to be the donor",
    )


def _build_dollar_auction(params):
    epsilon = params["epsilon"]
    e_u = params["e_u"]
    e_v = params["e_v"]
    return GameScenario(
        name="dollar_auction",
        system=dollar_auction_system(epsilon, e_u, e_v),
        players=("u_prime", "v_prime"),
        strategies={},
        params={"epsilon": epsilon, "e_u": e_u, "e_v": e_v},
        kind="auction",
        description="two CDS holders escalate donations to keep the other side's bank defaulting",
    )


def _float_in(lo, hi, lo_open=False, hi_open=False):
    def check(name, value):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise GameError(f"{name} must be a number, got {value!r}") from None
        below = value <= lo if lo_open else value < lo
        above = value >= hi if hi_open else value > hi
        if below or above:
            bounds = f"{'(' if lo_open else '['}{lo}, {hi}{')' if hi_open else ']'}"
            raise GameError(f"{name} must lie in {bounds}, got {value}")
        return value

    return check


def _int_at_least(lo):
    def check(name, value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise GameError(f"{name} must be an integer, got {value!r}")
        if isinstance(value, float) and not value.is_integer():
            raise GameError(f"{name} must be an integer, got {value}")
        value = int(value)
        if value < lo:
            raise GameError(f"{name} must be >= {lo}, got {value}")
        return value

    return check


_CATALOGUE: dict[str, dict] = {
    "basic": {"build": _build_basic, "params": {}},
    "basic_prioritized": {"build": _build_basic_prioritized, "params": {}},
    "remove_debt": {"build": _build_remove_debt, "params": {}},
    "partial_removal": {
        "build": _build_partial_removal,
        "params": {"gamma0": (0.5, _float_in(0.0, 1.0, lo_open=True))},
    },
    "inject": {"build": _build_inject, "params": {}},
    "reprioritize": {
        "build": _build_reprioritize,
        "params": {"delta": (0.5, _float_in(0.0, 1e6, lo_open=True))},
    },
    "prisoners": {"build": _build_prisoners, "params": {}},
    "stag_hunt": {"build": _build_stag_hunt, "params": {}},
    "chicken": {"build": _build_chicken, "params": {}},
    "volunteer": {"build": _build_volunteer, "params": {"k": (2, _int_at_least(2))}},
    "dollar_auction": {
        "build": _build_dollar_auction,
        "params": {
            "epsilon": (0.01, _float_in(0.0, 1.0, lo_open=True, hi_open=True)),
            "e_u": (0.0, _float_in(0.0, 1.0, hi_open=True)),
            "e_v": (0.0, _float_in(0.0, 1.0, hi_open=True)),
        },
    },
}


def build_scenario(name: str, **params) -> GameScenario:
    """Instantiate a catalogue scenario; unknown names or params raise."""
    entry = _CATALOGUE.get(name)
    if entry is None:
        raise GameError(
            f"unknown scenario {name!r}; known: " + ", ".join(sorted(_CATALOGUE))
        )
    spec = entry["params"]
    unknown = set(params) - set(spec)
    if unknown:
        raise GameError(
            f"unknown parameters for {name!r}: " + ", ".join(sorted(unknown))
        )
    resolved = {}
    for key, (default, check) in spec.items():
        resolved[key] = check(key, params.get(key, default))
    return entry["build"](resolved)


def list_scenarios() -> list[dict]:
    """Catalogue metadata: name, kind, players, parameter defaults."""
    out = []
    for name in sorted(_CATALOGUE):
        scenario = build_scenario(name)
        out.append(
            {
                "name": name,
                "kind": scenario.kind,
                "players": list(scenario.players),
                "params": {
                    key: default for key, (default, _) in _CATALOGUE[name]["params"].items()
                },
                "description": scenario.description,
            }
        )
    return out


# (document stem, scenario name, params) for every bundled JSON file
BUNDLED_DOCUMENTS: tuple[tuple[str, str, dict], ...] = (
    ("basic", "basic", {}),
    ("basic_prioritized", "basic_prioritized", {}),
    ("remove_debt", "remove_debt", {}),
    ("partial_removal_0.25", "partial_removal", {"gamma0": 0.25}),
    ("partial_removal_0.5", "partial_removal", {"gamma0": 0.5}),
    ("partial_removal_0.75", "partial_removal", {"gamma0": 0.75}),
    ("partial_removal_1.0", "partial_removal", {"gamma0": 1.0}),
    ("inject", "inject", {}),
    ("reprioritize_0.5", "reprioritize", {"delta": 0.5}),
    ("reprioritize_100", "reprioritize", {"delta": 100.0}),
    ("prisoners", "prisoners", {}),
    ("stag_hunt", "stag_hunt", {}),
    ("chicken", "chicken", {}),
    ("volunteer_2", "volunteer", {"k": 2}),
    ("volunteer_3", "volunteer", {"k": 3}),
    ("volunteer_4", "volunteer", {"k": 4}),
    ("dollar_auction", "dollar_auction", {"epsilon": 0.01}),
)


def document_names() -> list[str]:
    return [stem for stem, _, _ in BUNDLED_DOCUMENTS]


def load_scenario_document(name: str) -> dict:
    """Load a bundled scenario JSON document by file stem."""
    root = resources.files(__package__) / "scenarios" / f"{name}.json"
    try:
        text = root.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise GameError(
            f"no bundled scenario document {name!r}; known: "
            + ", ".join(document_names())
        ) from None
    return json.loads(text)
