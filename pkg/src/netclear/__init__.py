"""Clearing engine for financial networks of debt contracts and CDSs.

Recovery rates, payments, and payoffs for networks where banks owe fixed
debts and credit default swaps written on each other, with payment priorities,
plus tools to evaluate interventions (debt removal, donations, capital
injections, reprioritization) and the strategic games they induce.
"""

from .model import (
    Bank,
    BankId,
    ClearingState,
    Contract,
    FinancialSystem,
    InputError,
    InvalidSystemError,
    LiabilityLedger,
    ValidationReport,
    clearing_state,
    liabilities,
    payments,
    residual,
    set_state_observer,
    update,
    validate_system,
)
from .solver import (
    IterationResult,
    SolutionSet,
    SolverCapabilityError,
    SolverConfig,
    find_solutions,
    iterate,
    solve_with_default_set,
    verify_solution,
)
from .interventions import (
    Action,
    ActionError,
    Donate,
    EffectReport,
    GammaScan,
    InjectOwnAssets,
    RemoveIncomingDebt,
    Reprioritize,
    acting_bank,
    action_cost,
    apply_action,
    apply_actions,
    assess,
    optimize_partial_removal,
    project_solution,
)
from .games import (
    AuctionMove,
    AuctionOutcome,
    AuctionState,
    GameError,
    GameScenario,
    PayoffCell,
    PayoffMatrix,
    Strategy,
    auction_new,
    auction_run,
    auction_solutions,
    auction_step,
    auction_system,
    find_dominant,
    find_pure_nash,
    payoff_matrix,
)
from .scenarios import build_scenario, list_scenarios, load_scenario_document
from .document import (
    DocumentError,
    action_from_dict,
    action_to_dict,
    parse_document,
    system_to_document,
)

__version__ = "0.1.0"

__all__ = [
    "Bank",
    "BankId",
    "Contract",
    "FinancialSystem",
    "ValidationReport",
    "LiabilityLedger",
    "ClearingState",
    "InputError",
    "InvalidSystemError",
    "validate_system",
    "liabilities",
    "payments",
    "clearing_state",
    "update",
    "residual",
    "set_state_observer",
    "SolverConfig",
    "SolverCapabilityError",
    "IterationResult",
    "SolutionSet",
    "iterate",
    "solve_with_default_set",
    "find_solutions",
    "verify_solution",
    "Action",
    "ActionError",
    "RemoveIncomingDebt",
    "Donate",
    "InjectOwnAssets",
    "Reprioritize",
    "EffectReport",
    "GammaScan",
    "acting_bank",
    "action_cost",
    "apply_action",
    "apply_actions",
    "assess",
    "optimize_partial_removal",
    "project_solution",
    "GameError",
    "GameScenario",
    "Strategy",
    "PayoffCell",
    "PayoffMatrix",
    "AuctionState",
    "AuctionMove",
    "AuctionOutcome",
    "payoff_matrix",
    "find_pure_nash",
    "find_dominant",
    "auction_new",
    "auction_solutions",
    "auction_step",
    "auction_run",
    "auction_system",
    "build_scenario",
    "list_scenarios",
    "load_scenario_document",
    "DocumentError",
    "parse_document",
    "system_to_document",
    "action_from_dict",
    "action_to_dict",
    "__version__",
]
