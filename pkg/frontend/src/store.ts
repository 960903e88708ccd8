import { ApiClient, ServiceError, type ApiResponse } from './api.js';
import type {
  ActionDoc,
  AuctionOutcomePayload,
  AuctionStatePayload,
  EffectReportPayload,
  SessionPayload,
  SolutionSetPayload,
  SystemDoc,
} from './types.js';

export interface PreviewResult {
  report: EffectReportPayload;
  raw: string;
}

export interface SolutionsResult {
  set: SolutionSetPayload;
  raw: string;
  // where the set sits inside `raw`: [] for the solutions endpoint,
  // ['solutions'] inside a commit/undo payload
  prefix: (string | number)[];
}

export interface StoreState {
  session: SessionPayload | null;
  solutions: SolutionsResult | null;
  selectedSolution: number;
  acting: string | null;
  preview: PreviewResult | null;
  previewPending: boolean;
  auction: AuctionStatePayload | null;
  outcome: AuctionOutcomePayload | null;
  error: string | null;
}

type Listener = (state: StoreState) => void;

// Session-scoped client state. Every number shown anywhere comes out of a
// server response kept verbatim in this store; the only computation done
// here is bookkeeping (which solution is selected, which preview is newest).
export class SessionStore {
  readonly state: StoreState = {
    session: null,
    solutions: null,
    selectedSolution: 0,
    acting: null,
    preview: null,
    previewPending: false,
    auction: null,
    outcome: null,
    error: null,
  };

  private listeners: Listener[] = [];
  private previewSeq = 0;
  private previewAbort: AbortController | null = null;

  constructor(readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private fail(err: unknown): void {
    this.state.error =
      err instanceof ServiceError ? `HTTP ${err.status}: ${err.message}` : String(err);
    this.emit();
  }

  private resetForSession(session: SessionPayload): void {
    this.state.session = session;
    this.state.solutions = null;
    this.state.selectedSolution = 0;
    this.state.acting = null;
    this.state.preview = null;
    this.state.auction = session.auction ?? null;
    this.state.outcome = null;
    this.state.error = null;
  }

  async loadScenario(name: string, params: Record<string, unknown> = {}): Promise<void> {
    try {
      const res = await this.api.openScenario(name, params);
      this.resetForSession(res.body);
      this.emit();
      if (res.body.kind !== 'auction') await this.refreshSolutions();
    } catch (err) {
      this.fail(err);
    }
  }

  async loadDocument(doc: SystemDoc): Promise<void> {
    try {
      const res = await this.api.openSystem(doc);
      this.resetForSession(res.body);
      this.emit();
      await this.refreshSolutions();
    } catch (err) {
      this.fail(err);
    }
  }

  // reattach to an existing session id (state is reconstructible from it)
  async attach(id: string): Promise<void> {
    try {
      const res = await this.api.getSession(id);
      this.resetForSession(res.body);
      this.emit();
      if (res.body.kind !== 'auction') await this.refreshSolutions();
    } catch (err) {
      this.fail(err);
    }
  }

  async refreshSolutions(): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    try {
      const res = await this.api.getSolutions(session.id);
      this.state.solutions = { set: res.body, raw: res.raw, prefix: [] };
      this.state.selectedSolution = 0;
      this.state.error = null;
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  selectSolution(index: number): void {
    const set = this.state.solutions?.set;
    if (!set || index < 0 || index >= set.solutions.length) return;
    this.state.selectedSolution = index;
    this.emit();
  }

  selectActing(bank: string | null): void {
    this.state.acting = bank;
    this.state.preview = null;
    this.emit();
  }

  // one in-flight preview per gesture; a newer draft cancels the older call
  async previewDraft(action: ActionDoc | Record<string, unknown>): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    const seq = ++this.previewSeq;
    this.previewAbort?.abort();
    const abort = new AbortController();
    this.previewAbort = abort;
    this.state.previewPending = true;
    this.emit();
    try {
      const res = await this.api.preview(
        session.id,
        action,
        this.state.acting ?? undefined,
        abort.signal,
      );
      if (seq !== this.previewSeq) return;
      this.state.preview = { report: res.body, raw: res.raw };
      this.state.previewPending = false;
      this.state.error = null;
      this.emit();
    } catch (err) {
      if (seq !== this.previewSeq) return;
      this.state.previewPending = false;
      if ((err as Error).name === 'AbortError') return;
      this.fail(err);
    }
  }

  private takeCommitPayload(res: ApiResponse<SessionPayload & { solutions: SolutionSetPayload }>): void {
    this.state.session = { ...res.body };
    this.state.solutions = { set: res.body.solutions, raw: res.raw, prefix: ['solutions'] };
    this.state.selectedSolution = 0;
    this.state.preview = null;
    this.state.error = null;
    this.emit();
  }

  async commitDraft(action: ActionDoc | Record<string, unknown>): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    try {
      this.takeCommitPayload(await this.api.commit(session.id, action));
    } catch (err) {
      this.fail(err);
    }
  }

  async undo(): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    try {
      this.takeCommitPayload(await this.api.undo(session.id));
    } catch (err) {
      this.fail(err);
    }
  }

  async stepAuction(player: string): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    try {
      const res = await this.api.auctionStep(session.id, player);
      this.state.auction = res.body.state;
      this.state.outcome = res.body.outcome;
      this.state.error = null;
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }
}
