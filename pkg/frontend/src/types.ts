// Payload shapes of the netclear HTTP service. The server is the source of
// truth for every number here; the client never recomputes payoffs.

export interface BankDoc {
  id: string;
  external_assets: number;
}

export interface ContractDoc {
  debtor: string;
  creditor: string;
  notional: number;
  kind: 'debt' | 'cds';
  priority: number;
  reference?: string;
}

export interface SystemDoc {
  priority_levels: number;
  banks: BankDoc[];
  contracts: ContractDoc[];
}

export interface Payment {
  debtor: string;
  creditor: string;
  amount: number;
}

export interface StatePayload {
  recovery: Record<string, number>;
  assets: Record<string, number>;
  liabilities: Record<string, number>;
  payoffs: Record<string, number>;
  payments: Payment[];
  default: string[];
  residual: number;
}

export type SolutionFlag = 'unique' | 'multiple' | 'family_suspected' | 'none';

export interface SolutionSetPayload {
  count: number;
  flag: SolutionFlag;
  tolerance: number;
  solutions: StatePayload[];
}

export type ActionDoc =
  | { type: 'remove_incoming_debt'; contract: number; fraction: number }
  | { type: 'donate'; from: string; to: string; amount: number }
  | { type: 'inject_own_assets'; bank: string; amount: number }
  | { type: 'reprioritize'; bank: string; priorities: { contract: number; priority: number }[] };

export interface SessionPayload {
  id: string;
  system: SystemDoc;
  actions: ActionDoc[];
  scenario: string | null;
  params: Record<string, unknown>;
  players: string[];
  kind: string;
  auction?: AuctionStatePayload;
}

export interface CommitPayload extends SessionPayload {
  solutions: SolutionSetPayload;
}

export interface EffectReportPayload {
  acting: string;
  action: ActionDoc;
  cost: number;
  before: SolutionSetPayload;
  after: SolutionSetPayload;
  payoffs_before: number[];
  payoffs_after: number[];
  recoveries_before: number[];
  recoveries_after: number[];
  delta_min_net: number;
  delta_max_net: number;
}

export interface ScenarioInfo {
  name: string;
  kind: 'single' | 'matrix' | 'auction';
  players: string[];
  params: Record<string, unknown>;
  description: string;
}

export interface MatrixPayload {
  scenario: string;
  players: string[];
  strategies: string[][];
  cells: {
    profile: string[];
    payoffs: number[];
    costs: number[];
    flag: SolutionFlag;
    solutions: number;
  }[];
  nash: string[][];
  dominant: Record<string, string | null>;
}

export interface AuctionMovePayload {
  player: string;
  donation: number;
  cost: number;
  payoff: number;
  gain: number;
  e_u: number;
  e_v: number;
  passed: boolean;
}

export interface AuctionStatePayload {
  epsilon: number;
  delta: number;
  budget: number;
  e_u: number;
  e_v: number;
  spent: { u_prime: number; v_prime: number };
  halted: boolean;
  rounds: number;
  history: AuctionMovePayload[];
}

export interface AuctionOutcomePayload {
  case: string;
  r_u: number | null;
  r_v: number | null;
  family_sum: number | null;
  q_u_prime: number;
  q_v_prime: number;
}

export interface AuctionStepPayload {
  id: string;
  state: AuctionStatePayload;
  move: AuctionMovePayload;
  outcome: AuctionOutcomePayload;
}

export interface ServiceErrorPayload {
  error: string;
  status: number;
}
