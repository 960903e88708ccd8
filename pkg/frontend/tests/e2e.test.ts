// End-to-end: a real `netclear serve` process behind the full UI stack.
// The display invariant under test: every payoff shown on screen is the
// server's own JSON token, byte for byte.
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { spawn, type ChildProcessWithoutNullStreams } from 'node:child_process';
import { createServer, type AddressInfo } from 'node:net';
import { Window } from 'happy-dom';
import { ApiClient, type FetchLike } from '../src/api.js';
import { bootApp } from '../src/main.js';
import { numberTokenAt } from '../src/rawjson.js';
import { SessionStore } from '../src/store.js';

const nodeFetch: FetchLike = (url, init) => fetch(url, init);

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once('error', reject);
    probe.listen(0, '127.0.0.1', () => {
      const port = (probe.address() as AddressInfo).port;
      probe.close(() => resolve(port));
    });
  });
}

async function waitFor(pred: () => boolean, what: string, ms = 15000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!pred()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 25));
  }
}

let server: ChildProcessWithoutNullStreams;
let base: string;
const win = new Window();

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn('netclear', ['serve', '--port', String(port)], { stdio: 'pipe' });
  const deadline = Date.now() + 25000;
  for (;;) {
    try {
      const res = await fetch(`${base}/scenarios`);
      if (res.ok) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) throw new Error('service never came up');
    await new Promise((r) => setTimeout(r, 100));
  }
  // the app modules reach for the global document
  (globalThis as { document?: unknown }).document = win.document;
});

afterAll(() => {
  delete (globalThis as { document?: unknown }).document;
  server?.kill();
});

function mount() {
  const root = win.document.createElement('div');
  win.document.body.appendChild(root);
  return bootApp(root as unknown as HTMLElement, base, nodeFetch);
}

describe('removing the incoming debt through the UI', () => {
  it('shows payoff 2 for v, byte-for-byte from the commit response', async () => {
    const app = mount();
    await app.loadScenario('remove_debt');
    const state = app.store.state;
    expect(state.session?.scenario).toBe('remove_debt');
    expect(state.error).toBeNull();
    expect(app.root.querySelector('#session-id')?.textContent).toContain(state.session!.id);

    // before acting: v collects 0.5 on the distressed debt
    const before = app.root.querySelector('td.payoff[data-bank="v"]') as HTMLElement;
    expect(before.textContent).toBe(
      numberTokenAt(state.solutions!.raw, ['solutions', 0, 'payoffs', 'v']),
    );
    expect(before.textContent).toBe('0.5');

    // pick v as the acting bank; the action form defaults to
    // remove_incoming_debt with the slider at full removal
    const acting = app.root.querySelector('#acting') as unknown as HTMLSelectElement;
    acting.value = 'v';
    acting.dispatchEvent(new win.Event('change') as unknown as Event);
    const contract = app.root.querySelector('#contract') as unknown as HTMLSelectElement;
    expect(contract.value).toBe('0');
    expect(app.root.querySelector('#gamma-value')?.textContent).toBe('gamma 1');

    await waitFor(() => state.preview !== null, 'preview');
    const field = (name: string) =>
      (app.root.querySelector(`td[data-field="${name}"]`) as HTMLElement).textContent;
    expect(field('payoffs before')).toBe('0.5');
    expect(field('payoffs after')).toBe('2.0');
    expect(field('cost')).toBe('0.0');
    expect(field('net gain (worst case)')).toBe('1.5');

    (app.root.querySelector('#commit') as unknown as HTMLButtonElement).click();
    await waitFor(() => state.solutions?.prefix.length === 1, 'commit');

    const committed = state.solutions!;
    expect(committed.prefix).toEqual(['solutions']);
    const cell = app.root.querySelector('td.payoff[data-bank="v"]') as HTMLElement;
    const serverToken = numberTokenAt(committed.raw, ['solutions', 'solutions', 0, 'payoffs', 'v']);
    expect(cell.textContent).toBe(serverToken);
    expect(serverToken).toBe('2.0');
    // the parsed number would have displayed differently
    expect(String(committed.set.solutions[0].payoffs.v)).toBe('2');

    // the whole UI state hangs off the session id alone
    const other = new SessionStore(new ApiClient(base, nodeFetch));
    await other.attach(state.session!.id);
    expect(other.state.session?.actions).toEqual([
      { type: 'remove_incoming_debt', contract: 0, fraction: 1.0 },
    ]);
    expect(other.state.solutions?.set.solutions[0].payoffs.v).toBe(2);

    // undo restores the original payoff display
    (app.root.querySelector('#undo') as unknown as HTMLButtonElement).click();
    await waitFor(() => state.session?.actions.length === 0, 'undo');
    expect(
      (app.root.querySelector('td.payoff[data-bank="v"]') as HTMLElement).textContent,
    ).toBe('0.5');
  }, 60000);

  it('surfaces server rejections inline with their status code', async () => {
    const app = mount();
    await app.loadScenario('remove_debt');
    await app.store.commitDraft({ type: 'remove_incoming_debt', contract: 99, fraction: 1 });
    expect(app.store.state.error).toMatch(/^HTTP 409: /);
    const bar = app.root.querySelector('#error') as HTMLElement;
    expect(bar.textContent).toBe(app.store.state.error);
    expect(bar.classList.contains('visible')).toBe(true);
    // the session survives the rejected action
    expect(app.store.state.session?.actions).toEqual([]);
  }, 60000);
});

describe('dollar auction sessions', () => {
  it('steps players from the auction panel', async () => {
    const app = mount();
    await app.loadScenario('dollar_auction');
    const state = app.store.state;
    expect(state.session?.kind).toBe('auction');
    expect(state.auction).not.toBeNull();
    expect((app.root.querySelector('#action-block') as HTMLElement).hidden).toBe(true);
    expect((app.root.querySelector('#auction') as HTMLElement).hidden).toBe(false);

    const stepButton = app.root.querySelector(
      'button.step[data-player="u_prime"]',
    ) as unknown as HTMLButtonElement;
    stepButton.click();
    await waitFor(() => (state.auction?.rounds ?? 0) >= 1, 'auction step');
    expect(state.auction!.history[0].player).toBe('u_prime');
    expect(state.outcome).not.toBeNull();
    const log = app.root.querySelector('.auction-log') as HTMLElement;
    expect(log.textContent).toContain('round 1: u_prime');
  }, 60000);
});
