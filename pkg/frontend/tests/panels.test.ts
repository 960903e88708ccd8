// @vitest-environment happy-dom
import { describe, expect, it } from 'vitest';
import { renderAuction, renderEffect, renderError, renderSolutions, summarizeSet } from '../src/panels.js';
import type { SolutionsResult } from '../src/store.js';
import type {
  AuctionStatePayload,
  EffectReportPayload,
  SolutionSetPayload,
  StatePayload,
} from '../src/types.js';

// Raw text as the server would send it: payoffs carry a trailing ".0" that
// JSON.parse erases. The panel must show the raw token, not the parsed value.
const RAW_SET = `{
  "count": 1,
  "flag": "unique",
  "tolerance": 1e-09,
  "solutions": [
    {
      "recovery": {"u": 1.0, "v": 1.0},
      "assets": {"u": 1.0, "v": 2.0},
      "liabilities": {"u": 1.0, "v": 0.0},
      "payoffs": {"u": 0.0, "v": 2.0},
      "payments": [],
      "default": [],
      "residual": 0.0
    }
  ],
  "all": true
}`;

function div(): HTMLElement {
  const node = document.createElement('div');
  document.body.appendChild(node);
  return node;
}

describe('renderSolutions', () => {
  it('shows payoffs byte-for-byte from the raw response', () => {
    const result: SolutionsResult = { set: JSON.parse(RAW_SET), raw: RAW_SET, prefix: [] };
    const host = div();
    renderSolutions(host, result, 0, () => {});
    const cell = host.querySelector('td.payoff[data-bank="v"]') as HTMLElement;
    expect(cell.textContent).toBe('2.0');
    expect(String((result.set.solutions[0] as StatePayload).payoffs.v)).toBe('2'); // parse loses the token
  });

  it('follows the prefix into commit payloads', () => {
    const raw = `{"id": "abc", "solutions": ${RAW_SET}}`;
    const result: SolutionsResult = {
      set: (JSON.parse(raw) as { solutions: SolutionSetPayload }).solutions,
      raw,
      prefix: ['solutions'],
    };
    const host = div();
    renderSolutions(host, result, 0, () => {});
    expect((host.querySelector('td.payoff[data-bank="v"]') as HTMLElement).textContent).toBe('2.0');
    expect((host.querySelector('td.payoff[data-bank="u"]') as HTMLElement).textContent).toBe('0.0');
  });

  it('marks the selected card and reports clicks', () => {
    const state: StatePayload = {
      recovery: { u: 1 },
      assets: { u: 1 },
      liabilities: { u: 0 },
      payoffs: { u: 1 },
      payments: [],
      default: ['u'],
      residual: 0,
    };
    const set: SolutionSetPayload = {
      count: 2,
      flag: 'multiple',
      tolerance: 1e-9,
      solutions: [state, state],
    };
    const result: SolutionsResult = { set, raw: JSON.stringify(set), prefix: [] };
    const host = div();
    let picked = -1;
    renderSolutions(host, result, 1, (i) => (picked = i));
    const cards = host.querySelectorAll('.solution');
    expect(cards).toHaveLength(2);
    expect(cards[1].className).toContain('selected');
    expect(cards[0].className).not.toContain('selected');
    expect(host.textContent).toContain('2 solutions (multiple)');
    expect(host.textContent).toContain('defaults: u');
    (cards[0] as HTMLElement).click();
    expect(picked).toBe(0);
  });
});

describe('renderEffect', () => {
  it('lists cost and payoff movement with raw tokens', () => {
    const raw = `{
      "acting": "v",
      "action": {"type": "inject_own_assets", "bank": "v", "amount": 1},
      "cost": 1.50,
      "before": {"count": 1, "flag": "unique", "tolerance": 1e-09, "solutions": []},
      "after": {"count": 1, "flag": "unique", "tolerance": 1e-09, "solutions": []},
      "payoffs_before": [0.0],
      "payoffs_after": [2.0],
      "recoveries_before": [0.5],
      "recoveries_after": [1.0],
      "delta_min_net": 0.50,
      "delta_max_net": 0.50
    }`;
    const report = JSON.parse(raw) as EffectReportPayload;
    const host = div();
    renderEffect(host, report, raw);
    const get = (field: string) =>
      (host.querySelector(`td[data-field="${field}"]`) as HTMLElement).textContent;
    expect(get('cost')).toBe('1.50');
    expect(get('payoffs before')).toBe('0.0');
    expect(get('payoffs after')).toBe('2.0');
    expect(get('net gain (worst case)')).toBe('0.50');
    expect(host.textContent).toContain('previewing as v');
    expect(host.textContent).not.toContain('multiplicity');
  });

  it('flags multiplicity changes', () => {
    const report: EffectReportPayload = {
      acting: 'u',
      action: { type: 'inject_own_assets', bank: 'u', amount: 1 },
      cost: 1,
      before: { count: 2, flag: 'multiple', tolerance: 1e-9, solutions: [] },
      after: { count: 1, flag: 'unique', tolerance: 1e-9, solutions: [] },
      payoffs_before: [0],
      payoffs_after: [1],
      recoveries_before: [0],
      recoveries_after: [1],
      delta_min_net: 0,
      delta_max_net: 0,
    };
    const host = div();
    renderEffect(host, report, JSON.stringify(report));
    expect(host.textContent).toContain('multiplicity: multiple before, unique after');
  });
});

describe('renderAuction', () => {
  const base: AuctionStatePayload = {
    epsilon: 0.25,
    delta: 2,
    budget: 10,
    e_u: 1,
    e_v: 0,
    spent: { u_prime: 2.25, v_prime: 2 },
    halted: false,
    rounds: 2,
    history: [
      { player: 'u_prime', donation: 2, cost: 2, payoff: 2, gain: 0, e_u: 3, e_v: 0, passed: false },
      { player: 'v_prime', donation: 2, cost: 2, payoff: 2, gain: 0, e_u: 3, e_v: 2, passed: false },
    ],
  };

  it('shows meters, buttons and the move log', () => {
    const host = div();
    const steps: string[] = [];
    renderAuction(host, base, null, (p) => steps.push(p));
    const buttons = host.querySelectorAll('button.step');
    expect(buttons).toHaveLength(2);
    (buttons[0] as HTMLButtonElement).click();
    expect(steps).toEqual(['u_prime']);
    expect(host.textContent).toContain('round 1: u_prime donates 2 (payoff 2)');
    expect(host.textContent).toContain('e_u=1 e_v=0');
    // u_prime has spent beyond the payoff at stake
    expect(host.querySelector('.meter-fill.over')).not.toBeNull();
    expect(host.querySelector('.halted')).toBeNull();
  });

  it('disables stepping once halted and shows the outcome', () => {
    const halted: AuctionStatePayload = {
      ...base,
      halted: true,
      history: [...base.history, { player: 'u_prime', donation: 0, cost: 0, payoff: 2, gain: 0, e_u: 3, e_v: 2, passed: true }],
    };
    const host = div();
    renderAuction(host, halted, {
      case: 'both_overpaid',
      r_u: 1,
      r_v: 1,
      family_sum: null,
      q_u_prime: -0.25,
      q_v_prime: 0,
    }, () => {});
    for (const b of Array.from(host.querySelectorAll('button.step'))) {
      expect((b as HTMLButtonElement).disabled).toBe(true);
    }
    expect(host.textContent).toContain('auction halted');
    expect(host.textContent).toContain('position: both_overpaid');
    expect(host.textContent).toContain('round 3: u_prime passes');
  });
});

describe('renderError', () => {
  it('toggles visibility with the message', () => {
    const host = div();
    renderError(host, 'HTTP 409: no such contract');
    expect(host.textContent).toBe('HTTP 409: no such contract');
    expect(host.classList.contains('visible')).toBe(true);
    renderError(host, null);
    expect(host.textContent).toBe('');
    expect(host.classList.contains('visible')).toBe(false);
  });
});

describe('summarizeSet', () => {
  it('condenses count and flag', () => {
    expect(summarizeSet({ count: 3, flag: 'family_suspected', tolerance: 1e-9, solutions: [] })).toBe(
      '3 (family_suspected)',
    );
  });
});
