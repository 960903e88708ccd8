import { layoutNetwork, type NodePosition } from './layout.js';
import type { StatePayload, SystemDoc } from './types.js';

const DEBT_COLOR = '#4a7dbd';
const CDS_COLOR = '#c47a2c';
const REFERENCE_COLOR = '#999999';
const NODE_FILL = '#f4f1e8';
const NODE_EDGE = '#44413a';
const DEFAULT_RING = '#c0392b';
const SELECT_RING = '#2a7f4f';

export interface GraphView {
  positions: Map<string, NodePosition>;
  render(state: StatePayload | null, acting: string | null): void;
  bankAt(x: number, y: number): string | null;
}

export const NODE_RADIUS = 22;

export function createGraphView(canvas: HTMLCanvasElement, doc: SystemDoc): GraphView {
  const positions = layoutNetwork(doc, canvas.width, canvas.height);
  // happy-dom has no 2d context; everything but the drawing still works
  const ctx = canvas.getContext ? canvas.getContext('2d') : null;

  function arrow(from: NodePosition, to: NodePosition, color: string, width: number, dashed: boolean) {
    if (!ctx) return;
    const dx = to.x - from.x;
    const dy = to.y - from.y;
    const dist = Math.max(Math.hypot(dx, dy), 1e-9);
    const ux = dx / dist;
    const uy = dy / dist;
    const sx = from.x + ux * NODE_RADIUS;
    const sy = from.y + uy * NODE_RADIUS;
    const tx = to.x - ux * (NODE_RADIUS + 4);
    const ty = to.y - uy * (NODE_RADIUS + 4);
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = width;
    ctx.setLineDash(dashed ? [6, 5] : []);
    ctx.beginPath();
    ctx.moveTo(sx, sy);
    ctx.lineTo(tx, ty);
    ctx.stroke();
    ctx.setLineDash([]);
    const size = 7;
    ctx.beginPath();
    ctx.moveTo(tx, ty);
    ctx.lineTo(tx - ux * size - uy * (size / 2), ty - uy * size + ux * (size / 2));
    ctx.lineTo(tx - ux * size + uy * (size / 2), ty - uy * size - ux * (size / 2));
    ctx.closePath();
    ctx.fill();
  }

  function label(text: string, x: number, y: number, color: string) {
    if (!ctx) return;
    ctx.fillStyle = color;
    ctx.font = '12px sans-serif';
    ctx.textAlign = 'center';
    ctx.fillText(text, x, y);
  }

  function render(state: StatePayload | null, acting: string | null) {
    if (!ctx) return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);

    for (const contract of doc.contracts) {
      const from = positions.get(contract.debtor);
      const to = positions.get(contract.creditor);
      if (!from || !to) continue;
      const cds = contract.kind === 'cds';
      arrow(from, to, cds ? CDS_COLOR : DEBT_COLOR, 1 + Math.min(contract.notional, 6) * 0.5, false);
      const mx = (from.x + to.x) / 2;
      const my = (from.y + to.y) / 2;
      const tag =
        (cds ? `cds ${contract.notional}` : `${contract.notional}`) +
        (doc.priority_levels > 1 ? ` p${contract.priority}` : '');
      label(tag, mx, my - 6, cds ? CDS_COLOR : DEBT_COLOR);
      if (cds && contract.reference) {
        const ref = positions.get(contract.reference);
        if (ref) {
          ctx.strokeStyle = REFERENCE_COLOR;
          ctx.lineWidth = 1;
          ctx.setLineDash([3, 4]);
          ctx.beginPath();
          ctx.moveTo(mx, my);
          ctx.lineTo(ref.x, ref.y);
          ctx.stroke();
          ctx.setLineDash([]);
        }
      }
    }

    for (const bank of doc.banks) {
      const p = positions.get(bank.id);
      if (!p) continue;
      ctx.beginPath();
      ctx.arc(p.x, p.y, NODE_RADIUS, 0, 2 * Math.PI);
      ctx.fillStyle = NODE_FILL;
      ctx.fill();
      const defaulted = state !== null && state.default.includes(bank.id);
      ctx.strokeStyle = defaulted ? DEFAULT_RING : NODE_EDGE;
      ctx.lineWidth = defaulted ? 3 : 1.5;
      ctx.stroke();
      if (bank.id === acting) {
        ctx.beginPath();
        ctx.arc(p.x, p.y, NODE_RADIUS + 5, 0, 2 * Math.PI);
        ctx.strokeStyle = SELECT_RING;
        ctx.lineWidth = 2;
        ctx.stroke();
      }
      label(bank.id, p.x, p.y - 2, NODE_EDGE);
      const sub = state ? `r=${state.recovery[bank.id]}` : `e=${bank.external_assets}`;
      label(sub, p.x, p.y + 12, '#6b675c');
    }
  }

  function bankAt(x: number, y: number): string | null {
    for (const [id, p] of positions) {
      if (Math.hypot(p.x - x, p.y - y) <= NODE_RADIUS + 4) return id;
    }
    return null;
  }

  return { positions, render, bankAt };
}

// points for the family scatter: one (r_a, r_b) dot per sampled solution
export function familyScatter(
  solutions: StatePayload[],
  a: string,
  b: string,
): { x: number; y: number }[] {
  return solutions.map((s) => ({ x: s.recovery[a] ?? 0, y: s.recovery[b] ?? 0 }));
}

export function drawScatter(
  canvas: HTMLCanvasElement,
  points: { x: number; y: number }[],
  labels: [string, string],
): void {
  const ctx = canvas.getContext ? canvas.getContext('2d') : null;
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = '#44413a';
  ctx.lineWidth = 1;
  ctx.strokeRect(18, 6, w - 24, h - 24);
  ctx.fillStyle = '#44413a';
  ctx.font = '10px sans-serif';
  ctx.textAlign = 'center';
  ctx.fillText(labels[0], w / 2, h - 2);
  ctx.save();
  ctx.translate(8, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(labels[1], 0, 0);
  ctx.restore();
  ctx.fillStyle = '#6a3fb3';
  for (const p of points) {
    const px = 18 + p.x * (w - 24);
    const py = h - 18 - p.y * (h - 24);
    ctx.beginPath();
    ctx.arc(px, py, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}
