import type { SystemDoc } from './types.js';

export interface NodePosition {
  id: string;
  x: number;
  y: number;
}

interface Spring {
  a: number;
  b: number;
  strength: number;
}

// Deterministic spring embedder. Banks start on a circle in id order, then
// repulsion between all pairs and attraction along contracts (plus weaker
// pulls toward CDS reference entities) relax the picture. No randomness, so
// reloading a scenario always gives the same drawing.
export function layoutNetwork(
  doc: SystemDoc,
  width: number,
  height: number,
  iterations = 250,
): Map<string, NodePosition> {
  const ids = doc.banks.map((b) => b.id);
  const index = new Map(ids.map((id, i) => [id, i]));
  const n = ids.length;
  if (n === 0) return new Map();

  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) * 0.35;
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n - Math.PI / 2;
    xs[i] = cx + radius * Math.cos(angle);
    ys[i] = cy + radius * Math.sin(angle);
  }
  if (n === 1) return new Map([[ids[0], { id: ids[0], x: cx, y: cy }]]);

  const springs: Spring[] = [];
  for (const contract of doc.contracts) {
    const a = index.get(contract.debtor);
    const b = index.get(contract.creditor);
    if (a === undefined || b === undefined) continue;
    springs.push({ a, b, strength: 1 });
    if (contract.kind === 'cds' && contract.reference) {
      const r = index.get(contract.reference);
      if (r !== undefined) {
        springs.push({ a, b: r, strength: 0.3 });
        springs.push({ a: b, b: r, strength: 0.3 });
      }
    }
  }

  const area = width * height;
  const k = Math.sqrt(area / n) * 0.6;
  let temperature = Math.min(width, height) / 8;
  const cooling = Math.pow(0.01, 1 / iterations);

  const dx = new Float64Array(n);
  const dy = new Float64Array(n);
  for (let step = 0; step < iterations; step++) {
    dx.fill(0);
    dy.fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let ex = xs[i] - xs[j];
        let ey = ys[i] - ys[j];
        let dist = Math.hypot(ex, ey);
        if (dist < 1e-9) {
          // coincident nodes: split them apart along a fixed direction
          ex = 1e-3 * (i + 1);
          ey = 1e-3 * (j + 1);
          dist = Math.hypot(ex, ey);
        }
        const repulse = (k * k) / dist;
        dx[i] += (ex / dist) * repulse;
        dy[i] += (ey / dist) * repulse;
        dx[j] -= (ex / dist) * repulse;
        dy[j] -= (ey / dist) * repulse;
      }
    }
    for (const spring of springs) {
      const ex = xs[spring.a] - xs[spring.b];
      const ey = ys[spring.a] - ys[spring.b];
      const dist = Math.max(Math.hypot(ex, ey), 1e-9);
      const attract = ((dist * dist) / k) * spring.strength;
      dx[spring.a] -= (ex / dist) * attract;
      dy[spring.a] -= (ey / dist) * attract;
      dx[spring.b] += (ex / dist) * attract;
      dy[spring.b] += (ey / dist) * attract;
    }
    for (let i = 0; i < n; i++) {
      const disp = Math.hypot(dx[i], dy[i]);
      if (disp < 1e-12) continue;
      const step_i = Math.min(disp, temperature);
      xs[i] += (dx[i] / disp) * step_i;
      ys[i] += (dy[i] / disp) * step_i;
    }
    temperature *= cooling;
  }

  // normalize into the viewport with a margin
  const margin = 48;
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (let i = 0; i < n; i++) {
    minX = Math.min(minX, xs[i]);
    maxX = Math.max(maxX, xs[i]);
    minY = Math.min(minY, ys[i]);
    maxY = Math.max(maxY, ys[i]);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const out = new Map<string, NodePosition>();
  for (let i = 0; i < n; i++) {
    out.set(ids[i], {
      id: ids[i],
      x: margin + ((xs[i] - minX) / spanX) * (width - 2 * margin),
      y: margin + ((ys[i] - minY) / spanY) * (height - 2 * margin),
    });
  }
  return out;
}
