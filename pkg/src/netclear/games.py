"""Strategic games induced by interventions on a financial network.

A scenario fixes a system, a set of player banks and a small strategy menu
per player (each strategy is an action or inaction). Profiles are evaluated
by applying the chosen actions and solving the resulting system; under
solution multiplicity a player's payoff is the worst case over solutions,
and the cell is flagged.

The dollar auction is a separate sequential game: two outside banks hold CDSs
written on two symmetrically indebted banks and can donate to push the other
side's reference bank into default.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from .model import Bank, BankId, Contract, FinancialSystem, InputError
from .interventions import Action, action_cost, apply_actions
from .solver import SolutionSet, SolverConfig, find_solutions

__all__ = [
    "GameError",
    "Strategy",
    "GameScenario",
    "PayoffCell",
    "PayoffMatrix",
    "payoff_matrix",
    "find_pure_nash",
    "find_dominant",
    "AuctionState",
    "AuctionMove",
    "AuctionOutcome",
    "dollar_auction_system",
    "auction_new",
    "auction_system",
    "auction_solutions",
    "auction_step",
    "auction_run",
]

_TIE = 1e-9  # payoff comparisons below this margin count as ties


class GameError(ValueError):
    """Malformed game input: unknown player, wrong scenario kind, bad state."""


@dataclass(frozen=True)
class Strategy:
    """A named choice for one player; action None means doing nothing."""

    name: str
    action: Optional[Action] = None


@dataclass(frozen=True)
class GameScenario:
    """A system plus the strategic frame built on top of it.

    kind is "matrix" (simultaneous one-shot), "auction" (sequential dollar
    auction) or "single" (no players, just a system worth solving).
    """

    name: str
    system: FinancialSystem
    players: tuple[BankId, ...]
    strategies: Mapping[BankId, tuple[Strategy, ...]]
    params: Mapping[str, float]
    kind: str = "matrix"
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "strategies", dict(self.strategies))
        object.__setattr__(self, "params", dict(self.params))

    def strategy(self, player: BankId, name: str) -> Strategy:
        for s in self.strategies.get(player, ()):
            if s.name == name:
                return s
        raise GameError(f"player {player!r} has no strategy {name!r}")


@dataclass(frozen=True)
class PayoffCell:
    """One profile's outcome: per-player net payoffs (worst case over
    solutions, cost deducted) plus the underlying solution set."""

    payoffs: tuple[float, ...]
    costs: tuple[float, ...]
    solutions: SolutionSet

    @property
    def flag(self) -> str:
        return self.solutions.flag


@dataclass(frozen=True)
class PayoffMatrix:
    scenario: str
    players: tuple[BankId, ...]
    strategy_names: tuple[tuple[str, ...], ...]
    cells: Mapping[tuple[str, ...], PayoffCell]

    def payoff(self, profile: tuple[str, ...], player_index: Optional[int] = None):
        cell = self.cells[tuple(profile)]
        if player_index is None:
            return cell.payoffs
        return cell.payoffs[player_index]

    def profiles(self):
        return itertools.product(*self.strategy_names)


def payoff_matrix(scenario: GameScenario, config: SolverConfig = SolverConfig()) -> PayoffMatrix:
    """Solve every strategy profile of a matrix scenario."""
    if scenario.kind != "matrix":
        raise GameError(f"scenario {scenario.name!r} is {scenario.kind}, not a matrix game")
    names = tuple(
        tuple(s.name for s in scenario.strategies[p]) for p in scenario.players
    )
    cells: dict[tuple[str, ...], PayoffCell] = {}
    for profile in itertools.product(*names):
        chosen = [
            scenario.strategy(p, n) for p, n in zip(scenario.players, profile)
        ]
        actions = [s.action for s in chosen if s.action is not None]
        modified = apply_actions(scenario.system, actions)
        solutions = find_solutions(modified, config)
        costs = tuple(
            action_cost(s.action) if s.action is not None else 0.0 for s in chosen
        )
        payoffs = tuple(
            min(solutions.payoffs_of(p)) - c
            for p, c in zip(scenario.players, costs)
        )
        cells[profile] = PayoffCell(payoffs=payoffs, costs=costs, solutions=solutions)
    return PayoffMatrix(
        scenario=scenario.name,
        players=scenario.players,
        strategy_names=names,
        cells=cells,
    )


def find_pure_nash(matrix: PayoffMatrix) -> tuple[tuple[str, ...], ...]:
    """All pure profiles where no player gains from a unilateral deviation.

    Weak best response: deviations that merely tie do not break equilibrium,
    so tied profiles are all returned.
    """
    out = []
    for profile in matrix.profiles():
        cell = matrix.cells[profile]
        stable = True
        for i, player_names in enumerate(matrix.strategy_names):
            for alt in player_names:
                if alt == profile[i]:
                    continue
                deviated = profile[:i] + (alt,) + profile[i + 1 :]
                if matrix.cells[deviated].payoffs[i] > cell.payoffs[i] + _TIE:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            out.append(profile)
    return tuple(out)


def find_dominant(matrix: PayoffMatrix, player: BankId) -> Optional[str]:
    """The player's strictly dominant strategy, or None if there is none."""
    if player not in matrix.players:
        raise GameError(f"unknown player {player!r}")
    i = matrix.players.index(player)
    names = matrix.strategy_names[i]
    others = [matrix.strategy_names[j] for j in range(len(matrix.players)) if j != i]
    for cand in names:
        dominant = True
        for alt in names:
            if alt == cand:
                continue
            for combo in itertools.product(*others):
                profile_c = combo[:i] + (cand,) + combo[i:]
                profile_a = combo[:i] + (alt,) + combo[i:]
                if (
                    matrix.cells[profile_c].payoffs[i]
                    <= matrix.cells[profile_a].payoffs[i] + _TIE
                ):
                    dominant = False
                    break
            if not dominant:
                break
        if dominant:
            return cand
    return None


# ---------------------------------------------------------------------------
# dollar auction


def dollar_auction_system(
    epsilon: float, e_u: float = 0.0, e_v: float = 0.0, delta: Optional[float] = None
) -> FinancialSystem:
    """The two-sided betting network behind the dollar auction.

    Banks u and v each owe 1 and hold a CDS of weight 1 on the other, so
    whichever has fewer external assets defaults. Outside banks u_prime and
    v_prime hold CDSs of weight delta (default 6*epsilon) referencing u and v
    respectively, funded by fully covered writers.
    """
    if not epsilon > 0:
        raise GameError(f"epsilon must be > 0, got {epsilon}")
    if delta is None:
        delta = 6.0 * epsilon
    if not delta > 0:
        raise GameError(f"delta must be > 0, got {delta}")
    for name, e in (("e_u", e_u), ("e_v", e_v)):
        if not (0.0 <= e < 1.0):
            raise GameError(f"{name} must lie in [0, 1), got {e}")
    banks = (
        Bank("u", e_u),
        Bank("v", e_v),
        Bank("t", 0.0),
        Bank("u_prime", 0.0),
        Bank("v_prime", 0.0),
        Bank("ins_u", 1.0),
        Bank("ins_v", 1.0),
        Bank("bet_u", delta),
        Bank("bet_v", delta),
    )
    contracts = (
        Contract("u", "t", 1.0),
        Contract("v", "t", 1.0),
        Contract("ins_u", "u", 1.0, kind="cds", reference="v"),
        Contract("ins_v", "v", 1.0, kind="cds", reference="u"),
        Contract("bet_u", "u_prime", delta, kind="cds", reference="u"),
        Contract("bet_v", "v_prime", delta, kind="cds", reference="v"),
    )
    return FinancialSystem(banks, contracts)


@dataclass(frozen=True)
class AuctionMove:
    """One turn: either a donation of k*epsilon or a halting pass."""

    player: str
    donation: float
    cost: float
    payoff: float
    gain: float
    e_u: float
    e_v: float
    passed: bool


@dataclass(frozen=True)
class AuctionState:
    """Immutable auction position; steps return new states."""

    epsilon: float
    delta: float
    budget: float
    e_u: float
    e_v: float
    spent_u_prime: float
    spent_v_prime: float
    halted: bool
    history: tuple[AuctionMove, ...]

    def spent(self, player: str) -> float:
        if player == "u_prime":
            return self.spent_u_prime
        if player == "v_prime":
            return self.spent_v_prime
        raise GameError(f"unknown auction player {player!r}")


@dataclass(frozen=True)
class AuctionOutcome:
    """Closed-form solution classification at given external assets.

    case is "u_defaults" (e_u < e_v: unique solution, u pays e_u on the
    dollar), "v_defaults" (mirror image) or "tie_family" (e_u = e_v: a
    continuum with r_u + r_v = 1 + e_u). Payoffs for the outside betters are
    worst case over solutions, which for the tie is zero."""

    case: str
    r_u: Optional[float]
    r_v: Optional[float]
    family_sum: Optional[float]
    q_u_prime: float
    q_v_prime: float


def auction_new(
    epsilon: float,
    e_u: float = 0.0,
    e_v: float = 0.0,
    budget: float = 0.5,
    delta: Optional[float] = None,
) -> AuctionState:
    """Fresh auction; validates parameters by building the system once."""
    dollar_auction_system(epsilon, e_u, e_v, delta)
    if not budget > 0:
        raise GameError(f"budget must be > 0, got {budget}")
    return AuctionState(
        epsilon=float(epsilon),
        delta=float(6.0 * epsilon if delta is None else delta),
        budget=float(budget),
        e_u=float(e_u),
        e_v=float(e_v),
        spent_u_prime=0.0,
        spent_v_prime=0.0,
        halted=False,
        history=(),
    )


def auction_system(state: AuctionState) -> FinancialSystem:
    """The financial system at the auction's current external assets."""
    return dollar_auction_system(state.epsilon, state.e_u, state.e_v, state.delta)


def _classify(e_u: float, e_v: float, delta: float) -> AuctionOutcome:
    if e_u < e_v:
        return AuctionOutcome(
            case="u_defaults",
            r_u=e_u,
            r_v=1.0,
            family_sum=None,
            q_u_prime=delta * (1.0 - e_u),
            q_v_prime=0.0,
        )
    if e_v < e_u:
        return AuctionOutcome(
            case="v_defaults",
            r_u=1.0,
            r_v=e_v,
            family_sum=None,
            q_u_prime=0.0,
            q_v_prime=delta * (1.0 - e_v),
        )
    return AuctionOutcome(
        case="tie_family",
        r_u=None,
        r_v=None,
        family_sum=1.0 + e_u,
        q_u_prime=0.0,
        q_v_prime=0.0,
    )


def auction_solutions(state: AuctionState) -> AuctionOutcome:
    """Classify the current position in closed form."""
    return _classify(state.e_u, state.e_v, state.delta)


def _mover_sides(state: AuctionState, player: str):
    """(assets of the bank this player bets against, assets it can raise)."""
    if player == "u_prime":
        return state.e_u, state.e_v
    if player == "v_prime":
        return state.e_v, state.e_u
    raise GameError(f"unknown auction player {player!r}")


def auction_step(state: AuctionState, player: str) -> AuctionState:
    """One greedy turn for the given player.

    The player donates the minimal multiple of epsilon that pushes its
    opponent's reference bank into the losing (lower-assets) position, if and
    only if the resulting payoff gain exceeds the donation and fits the spend
    budget; otherwise it passes and the auction halts.
    """
    if state.halted:
        raise GameError("auction already halted")
    against, boost = _mover_sides(state, player)

    def _next(donation, cost, payoff, gain, passed):
        e_u, e_v = state.e_u, state.e_v
        if not passed:
            if player == "u_prime":
                e_v += donation
            else:
                e_u += donation
        move = AuctionMove(
            player=player,
            donation=donation,
            cost=cost,
            payoff=payoff,
            gain=gain,
            e_u=e_u,
            e_v=e_v,
            passed=passed,
        )
        return replace(
            state,
            e_u=e_u,
            e_v=e_v,
            spent_u_prime=state.spent_u_prime + (cost if player == "u_prime" else 0.0),
            spent_v_prime=state.spent_v_prime + (cost if player == "v_prime" else 0.0),
            halted=passed,
            history=state.history + (move,),
        )

    current = _classify(state.e_u, state.e_v, state.delta)
    q_before = current.q_u_prime if player == "u_prime" else current.q_v_prime
    if boost > against:
        # already winning: any donation would only add cost
        return _next(0.0, 0.0, q_before, 0.0, True)

    # smallest k with boost + k*epsilon > against; assets move in epsilon
    # steps so round() absorbs float drift
    k = max(1, int(round((against - boost) / state.epsilon)) + 1)
    donation = k * state.epsilon
    q_after = state.delta * (1.0 - against)
    gain = q_after - q_before
    if gain <= donation or state.spent(player) + donation > state.budget:
        return _next(0.0, 0.0, q_before, 0.0, True)
    if boost + donation >= 1.0:
        # external assets must stay below the notional owed
        return _next(0.0, 0.0, q_before, 0.0, True)
    return _next(donation, donation, q_after, gain, False)


def auction_run(state: AuctionState, rounds: int, first: str = "u_prime") -> AuctionState:
    """Alternate single steps starting with `first` until halt or the round
    budget runs out."""
    if first not in ("u_prime", "v_prime"):
        raise GameError(f"unknown auction player {first!r}")
    if rounds < 0:
        raise InputError(f"rounds must be >= 0, got {rounds}")
    order = ("u_prime", "v_prime") if first == "u_prime" else ("v_prime", "u_prime")
    for i in range(rounds):
        if state.halted:
            break
        state = auction_step(state, order[i % 2])
    return state
