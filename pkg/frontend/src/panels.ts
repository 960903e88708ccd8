import { numberTokenAt, type JsonPath } from './rawjson.js';
import type {
  AuctionOutcomePayload,
  AuctionStatePayload,
  EffectReportPayload,
  SolutionSetPayload,
} from './types.js';
import type { SolutionsResult } from './store.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// Numbers shown to the user are the server's own bytes. When the token is
// somehow unreachable (path drifted) fall back to the parsed value rather
// than showing nothing.
function token(raw: string, path: JsonPath, parsed: number): string {
  try {
    return numberTokenAt(raw, path);
  } catch {
    return String(parsed);
  }
}

export function renderSolutions(
  container: HTMLElement,
  result: SolutionsResult,
  selected: number,
  onSelect: (index: number) => void,
): void {
  container.textContent = '';
  const set = result.set;
  container.appendChild(
    el('div', 'panel-head', `${set.count} solution${set.count === 1 ? '' : 's'} (${set.flag})`),
  );
  set.solutions.forEach((state, i) => {
    const card = el('div', 'solution' + (i === selected ? ' selected' : ''));
    card.dataset.index = String(i);
    const title = el('div', 'solution-title', `#${i + 1}`);
    if (state.default.length > 0) {
      title.appendChild(el('span', 'defaults', ` defaults: ${state.default.join(', ')}`));
    }
    card.appendChild(title);
    const table = el('table', 'solution-table');
    const head = el('tr');
    for (const h of ['bank', 'r', 'payoff']) head.appendChild(el('th', undefined, h));
    table.appendChild(head);
    for (const bank of Object.keys(state.recovery)) {
      const row = el('tr');
      row.appendChild(el('td', undefined, bank));
      row.appendChild(
        el('td', 'num', token(result.raw, [...result.prefix, 'solutions', i, 'recovery', bank], state.recovery[bank])),
      );
      const payoffCell = el('td', 'num payoff', token(result.raw, [...result.prefix, 'solutions', i, 'payoffs', bank], state.payoffs[bank]));
      payoffCell.dataset.bank = bank;
      row.appendChild(payoffCell);
      table.appendChild(row);
    }
    card.appendChild(table);
    card.addEventListener('click', () => onSelect(i));
    container.appendChild(card);
  });
}

export function renderEffect(
  container: HTMLElement,
  report: EffectReportPayload,
  raw: string,
): void {
  container.textContent = '';
  container.appendChild(el('div', 'panel-head', `previewing as ${report.acting}`));
  const rows: [string, string][] = [
    ['payoffs before', report.payoffs_before.map((v, i) => token(raw, ['payoffs_before', i], v)).join(', ')],
    ['payoffs after', report.payoffs_after.map((v, i) => token(raw, ['payoffs_after', i], v)).join(', ')],
    ['cost', token(raw, ['cost'], report.cost)],
    ['net gain (worst case)', token(raw, ['delta_min_net'], report.delta_min_net)],
    ['net gain (best case)', token(raw, ['delta_max_net'], report.delta_max_net)],
  ];
  const table = el('table', 'effect-table');
  for (const [name, value] of rows) {
    const tr = el('tr');
    tr.appendChild(el('td', undefined, name));
    const td = el('td', 'num');
    td.dataset.field = name;
    td.textContent = value;
    tr.appendChild(td);
    table.appendChild(tr);
  }
  container.appendChild(table);
  if (report.before.flag !== 'unique' || report.after.flag !== 'unique') {
    container.appendChild(
      el('div', 'note', `multiplicity: ${report.before.flag} before, ${report.after.flag} after`),
    );
  }
}

function meter(label: string, value: number, limit: number): HTMLElement {
  const wrap = el('div', 'meter');
  wrap.appendChild(el('span', 'meter-label', `${label} spent ${value}`));
  const bar = el('div', 'meter-bar');
  const fill = el('div', 'meter-fill' + (value > limit ? ' over' : ''));
  fill.style.width = `${Math.min(100, (value / (2 * limit)) * 100)}%`;
  bar.appendChild(fill);
  wrap.appendChild(bar);
  wrap.appendChild(el('span', 'meter-limit', `payoff at stake ${limit}`));
  return wrap;
}

export function renderAuction(
  container: HTMLElement,
  state: AuctionStatePayload,
  outcome: AuctionOutcomePayload | null,
  onStep: (player: string) => void,
): void {
  container.textContent = '';
  container.appendChild(
    el('div', 'panel-head', `dollar auction: epsilon ${state.epsilon}, round ${state.rounds}`),
  );
  container.appendChild(meter('u_prime', state.spent.u_prime, state.delta));
  container.appendChild(meter('v_prime', state.spent.v_prime, state.delta));
  container.appendChild(el('div', 'auction-assets', `e_u=${state.e_u} e_v=${state.e_v}`));
  if (outcome) {
    container.appendChild(el('div', 'auction-outcome', `position: ${outcome.case}`));
  }

  const controls = el('div', 'auction-controls');
  for (const player of ['u_prime', 'v_prime']) {
    const button = el('button', 'step', `${player} moves`);
    button.dataset.player = player;
    button.disabled = state.halted;
    button.addEventListener('click', () => onStep(player));
    controls.appendChild(button);
  }
  container.appendChild(controls);
  if (state.halted) container.appendChild(el('div', 'halted', 'auction halted'));

  const log = el('div', 'auction-log');
  state.history.forEach((move, i) => {
    const line = move.passed
      ? `round ${i + 1}: ${move.player} passes`
      : `round ${i + 1}: ${move.player} donates ${move.donation} (payoff ${move.payoff})`;
    log.appendChild(el('div', 'move', line));
  });
  container.appendChild(log);
}

export function renderError(container: HTMLElement, message: string | null): void {
  container.textContent = message ?? '';
  container.classList.toggle('visible', message !== null);
}

export function summarizeSet(set: SolutionSetPayload): string {
  return `${set.count} (${set.flag})`;
}
