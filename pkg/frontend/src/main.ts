import { ApiClient, type FetchLike } from './api.js';
import { createGraphView, drawScatter, familyScatter, type GraphView } from './graph.js';
import { renderAuction, renderEffect, renderError, renderSolutions } from './panels.js';
import { SessionStore } from './store.js';
import type { ActionDoc, ContractDoc, ScenarioInfo } from './types.js';

const SKELETON = `
  <header>
    <label>service <input id="base-url" size="24"></label>
    <select id="scenario-select"></select>
    <button id="load">load</button>
    <span id="session-id" class="dim"></span>
  </header>
  <div id="error" class="error-bar"></div>
  <main>
    <section class="left">
      <canvas id="network" width="640" height="480"></canvas>
      <canvas id="scatter" width="320" height="200" hidden></canvas>
    </section>
    <section class="right">
      <div class="block">
        <label>acting bank <select id="acting"><option value="">(none)</option></select></label>
      </div>
      <div class="block" id="action-block" hidden>
        <label>action <select id="action-kind">
          <option value="remove_incoming_debt">remove incoming debt</option>
          <option value="donate">donate</option>
          <option value="inject_own_assets">inject own assets</option>
          <option value="reprioritize">reprioritize</option>
        </select></label>
        <div id="fields"></div>
        <div class="buttons">
          <button id="commit" disabled>commit</button>
          <button id="undo">undo</button>
        </div>
      </div>
      <div id="preview" class="panel"></div>
      <div id="solutions" class="panel"></div>
      <div id="auction" class="panel" hidden></div>
    </section>
  </main>
`;

export interface App {
  store: SessionStore;
  root: HTMLElement;
  loadScenario(name: string): Promise<void>;
}

function option(value: string, text: string): HTMLOptionElement {
  const node = document.createElement('option');
  node.value = value;
  node.textContent = text;
  return node;
}

function contractLabel(index: number, c: ContractDoc): string {
  const kind = c.kind === 'cds' ? ` cds ref ${c.reference}` : '';
  return `#${index} ${c.debtor}->${c.creditor} (${c.notional}${kind})`;
}

export function bootApp(
  root: HTMLElement,
  baseUrl: string,
  fetchImpl?: FetchLike,
): App {
  root.innerHTML = SKELETON;
  const $ = <T extends HTMLElement>(selector: string): T => {
    const node = root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  };

  const api = new ApiClient(baseUrl, fetchImpl);
  const store = new SessionStore(api);

  const baseInput = $<HTMLInputElement>('#base-url');
  baseInput.value = baseUrl;
  baseInput.addEventListener('change', () => {
    api.baseUrl = baseInput.value;
  });

  const scenarioSelect = $<HTMLSelectElement>('#scenario-select');
  const actingSelect = $<HTMLSelectElement>('#acting');
  const kindSelect = $<HTMLSelectElement>('#action-kind');
  const fields = $<HTMLDivElement>('#fields');
  const commitButton = $<HTMLButtonElement>('#commit');
  const networkCanvas = $<HTMLCanvasElement>('#network');
  const scatterCanvas = $<HTMLCanvasElement>('#scatter');

  let graph: GraphView | null = null;
  let graphDoc: unknown = null;
  let scenarios: ScenarioInfo[] = [];
  let draft: ActionDoc | null = null;

  api
    .listScenarios()
    .then((res) => {
      scenarios = res.body.scenarios;
      scenarioSelect.textContent = '';
      for (const s of scenarios) {
        scenarioSelect.appendChild(option(s.name, `${s.name} (${s.kind})`));
      }
    })
    .catch((err) => renderError($('#error'), String(err)));

  $('#load').addEventListener('click', () => {
    void store.loadScenario(scenarioSelect.value);
  });
  $('#undo').addEventListener('click', () => void store.undo());
  commitButton.addEventListener('click', () => {
    if (draft) void store.commitDraft(draft);
  });

  actingSelect.addEventListener('change', () => {
    store.selectActing(actingSelect.value || null);
    rebuildFields();
  });
  kindSelect.addEventListener('change', rebuildFields);

  networkCanvas.addEventListener('click', (event) => {
    if (!graph) return;
    const rect = networkCanvas.getBoundingClientRect();
    const hit = graph.bankAt(event.clientX - rect.left, event.clientY - rect.top);
    if (hit) {
      actingSelect.value = hit;
      store.selectActing(hit);
      rebuildFields();
    }
  });

  function setDraft(next: ActionDoc | null): void {
    draft = next;
    commitButton.disabled = next === null;
    if (next) void store.previewDraft(next);
  }

  // rebuilds the per-kind parameter inputs; each input change re-previews
  function rebuildFields(): void {
    fields.textContent = '';
    setDraft(null);
    const session = store.state.session;
    const acting = store.state.acting;
    if (!session || !acting) return;
    const contracts = session.system.contracts;
    const kind = kindSelect.value;

    if (kind === 'remove_incoming_debt') {
      const incoming = contracts
        .map((c, i) => [i, c] as const)
        .filter(([, c]) => c.kind === 'debt' && c.creditor === acting);
      const select = document.createElement('select');
      select.id = 'contract';
      for (const [i, c] of incoming) select.appendChild(option(String(i), contractLabel(i, c)));
      const slider = document.createElement('input');
      slider.type = 'range';
      slider.id = 'gamma';
      slider.min = '0';
      slider.max = '64';
      slider.value = '64';
      const value = document.createElement('span');
      value.id = 'gamma-value';
      const update = () => {
        if (!select.value) return setDraft(null);
        // grid points match the server-side scan granularity
        const fraction = Number(slider.value) / 64;
        value.textContent = `gamma ${fraction}`;
        setDraft({
          type: 'remove_incoming_debt',
          contract: Number(select.value),
          fraction,
        });
      };
      select.addEventListener('change', update);
      slider.addEventListener('input', update);
      fields.append('contract ', select, slider, value);
      update();
      return;
    }

    if (kind === 'donate') {
      const select = document.createElement('select');
      select.id = 'donate-to';
      for (const bank of session.system.banks) {
        if (bank.id !== acting) select.appendChild(option(bank.id, bank.id));
      }
      const amount = document.createElement('input');
      amount.type = 'number';
      amount.id = 'amount';
      amount.step = '0.1';
      amount.value = '1';
      const update = () => {
        const x = Number(amount.value);
        if (!select.value || !(x > 0)) return setDraft(null);
        setDraft({ type: 'donate', from: acting, to: select.value, amount: x });
      };
      select.addEventListener('change', update);
      amount.addEventListener('input', update);
      fields.append('to ', select, ' amount ', amount);
      update();
      return;
    }

    if (kind === 'inject_own_assets') {
      const amount = document.createElement('input');
      amount.type = 'number';
      amount.id = 'amount';
      amount.step = '0.1';
      amount.value = '1';
      const update = () => {
        const x = Number(amount.value);
        if (!(x > 0)) return setDraft(null);
        setDraft({ type: 'inject_own_assets', bank: acting, amount: x });
      };
      amount.addEventListener('input', update);
      fields.append('amount ', amount);
      update();
      return;
    }

    // reprioritize: one priority spinner per outgoing contract
    const outgoing = contracts
      .map((c, i) => [i, c] as const)
      .filter(([, c]) => c.debtor === acting);
    const spinners: [number, HTMLInputElement][] = [];
    const update = () => {
      const priorities = spinners
        .filter(([, input]) => input.value !== '')
        .map(([i, input]) => ({ contract: i, priority: Number(input.value) }));
      if (priorities.length === 0) return setDraft(null);
      setDraft({ type: 'reprioritize', bank: acting, priorities });
    };
    for (const [i, c] of outgoing) {
      const row = document.createElement('div');
      const input = document.createElement('input');
      input.type = 'number';
      input.min = '1';
      input.max = String(store.state.session?.system.priority_levels ?? 1);
      input.value = String(c.priority);
      input.dataset.contract = String(i);
      input.addEventListener('input', update);
      row.append(contractLabel(i, c) + ' priority ', input);
      fields.appendChild(row);
      spinners.push([i, input]);
    }
    update();
  }

  store.subscribe((state) => {
    renderError($('#error'), state.error);
    $('#session-id').textContent = state.session ? `session ${state.session.id}` : '';
    $<HTMLDivElement>('#action-block').hidden = !state.session || state.session.kind === 'auction';

    if (state.session) {
      const current = actingSelect.value;
      actingSelect.textContent = '';
      actingSelect.appendChild(option('', '(none)'));
      for (const bank of state.session.system.banks) {
        actingSelect.appendChild(option(bank.id, bank.id));
      }
      actingSelect.value = state.acting ?? (current || '');
      if (!graph || graphDoc !== state.session.system) {
        graphDoc = state.session.system;
        graph = createGraphView(networkCanvas, state.session.system);
      }
      const selected = state.solutions?.set.solutions[state.selectedSolution] ?? null;
      graph.render(selected, state.acting);
    }

    const solutionsPanel = $<HTMLDivElement>('#solutions');
    if (state.solutions) {
      renderSolutions(solutionsPanel, state.solutions, state.selectedSolution, (i) =>
        store.selectSolution(i),
      );
      const flag = state.solutions.set.flag;
      scatterCanvas.hidden = flag !== 'family_suspected';
      if (flag === 'family_suspected' && state.session) {
        const banks = state.session.system.banks.map((b) => b.id);
        const [a, b] = banks.length >= 2 ? [banks[0], banks[1]] : [banks[0], banks[0]];
        drawScatter(scatterCanvas, familyScatter(state.solutions.set.solutions, a, b), [a, b]);
      }
    } else {
      solutionsPanel.textContent = '';
      scatterCanvas.hidden = true;
    }

    const previewPanel = $<HTMLDivElement>('#preview');
    if (state.preview) {
      renderEffect(previewPanel, state.preview.report, state.preview.raw);
    } else {
      previewPanel.textContent = state.previewPending ? 'previewing...' : '';
    }

    const auctionPanel = $<HTMLDivElement>('#auction');
    auctionPanel.hidden = state.auction === null;
    if (state.auction) {
      renderAuction(auctionPanel, state.auction, state.outcome, (player) =>
        void store.stepAuction(player),
      );
    }
  });

  return {
    store,
    root,
    loadScenario: (name: string) => store.loadScenario(name),
  };
}
