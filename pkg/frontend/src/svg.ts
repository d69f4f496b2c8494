/**
 * Hand-rolled SVG line charts: one metric per figure, one series per
 * (scheme, relay count), vertical error bars, dashed analytic overlays.
 */

import { Series } from "./series.js";

export interface FigureOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARKERS = ["circle", "square"] as const;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function fmtTick(v: number): string {
  return Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.01)
    ? v.toExponential(1)
    : String(Math.round(v * 1e6) / 1e6);
}

function marker(kind: (typeof MARKERS)[number], x: number, y: number, color: string): string {
  if (kind === "square") {
    return `<rect x="${(x - 2.6).toFixed(1)}" y="${(y - 2.6).toFixed(1)}" width="5.2" height="5.2" fill="${color}"/>`;
  }
  return `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="2.8" fill="${color}"/>`;
}

export function renderFigure(seriesList: Series[], opts: FigureOptions): string {
  const W = opts.width ?? 720;
  const H = opts.height ?? 420;
  const ml = 64;
  const mr = 16;
  const mt = 40;
  const mb = 52;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const xs = seriesList.flatMap((s) => s.points.map((p) => p.snr_db));
  const ys = seriesList.flatMap((s) => [
    ...s.points.flatMap((p) => [p.value - p.stderr, p.value + p.stderr]),
    ...s.analytic.map((p) => p.value),
  ]);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  let yMin = Math.min(...ys);
  let yMax = Math.max(...ys);
  const pad = (yMax - yMin || Math.abs(yMax) || 1) * 0.06;
  yMin -= pad;
  yMax += pad;

  const xOf = (v: number) => ml + ((v - xMin) / (xMax - xMin || 1)) * pw;
  const yOf = (v: number) => mt + ph - ((v - yMin) / (yMax - yMin || 1)) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${W / 2}" y="${mt - 16}" text-anchor="middle" font-size="14" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;

  // grid and ticks
  const yTicks = niceTicks(yMin, yMax, 6);
  for (const v of yTicks) {
    const y = yOf(v);
    s += `<line x1="${ml}" y1="${y.toFixed(1)}" x2="${ml + pw}" y2="${y.toFixed(1)}" stroke="#eee"/>\n`;
    s += `<text x="${ml - 6}" y="${(y + 3.5).toFixed(1)}" text-anchor="end" font-size="10" fill="#444">${esc(fmtTick(v))}</text>\n`;
  }
  const xTicks = niceTicks(xMin, xMax, 8);
  for (const v of xTicks) {
    const x = xOf(v);
    s += `<line x1="${x.toFixed(1)}" y1="${mt + ph}" x2="${x.toFixed(1)}" y2="${mt + ph + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${x.toFixed(1)}" y="${mt + ph + 16}" text-anchor="middle" font-size="10" fill="#444">${esc(fmtTick(v))}</text>\n`;
  }
  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 14}" text-anchor="middle" font-size="12" fill="#222">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="16" y="${mt + ph / 2}" text-anchor="middle" font-size="12" fill="#222" transform="rotate(-90,16,${mt + ph / 2})">${esc(opts.yLabel)}</text>\n`;

  // series: analytic overlays first so samples sit on top
  seriesList.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    if (series.analytic.length > 0) {
      const pts = series.analytic
        .map((p) => `${xOf(p.snr_db).toFixed(1)},${yOf(p.value).toFixed(1)}`)
        .join(" ");
      s += `<polyline fill="none" stroke="${color}" stroke-width="1.2" stroke-dasharray="6,4" opacity="0.75" points="${pts}"/>\n`;
    }
  });
  seriesList.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const kind = MARKERS[idx % MARKERS.length];
    const pts = series.points
      .map((p) => `${xOf(p.snr_db).toFixed(1)},${yOf(p.value).toFixed(1)}`)
      .join(" ");
    s += `<polyline fill="none" stroke="${color}" stroke-width="1.6" points="${pts}"/>\n`;
    for (const p of series.points) {
      const x = xOf(p.snr_db);
      if (p.stderr > 0) {
        const yLo = yOf(p.value - p.stderr);
        const yHi = yOf(p.value + p.stderr);
        s += `<line x1="${x.toFixed(1)}" y1="${yLo.toFixed(1)}" x2="${x.toFixed(1)}" y2="${yHi.toFixed(1)}" stroke="${color}" stroke-width="1"/>\n`;
        for (const yc of [yLo, yHi]) {
          s += `<line x1="${(x - 3).toFixed(1)}" y1="${yc.toFixed(1)}" x2="${(x + 3).toFixed(1)}" y2="${yc.toFixed(1)}" stroke="${color}" stroke-width="1"/>\n`;
        }
      }
      s += marker(kind, x, yOf(p.value), color) + "\n";
    }
  });

  // legend
  const hasAnalytic = seriesList.some((series) => series.analytic.length > 0);
  const entries = seriesList.map((series) => series.label).concat(hasAnalytic ? ["analytic"] : []);
  const legendW = Math.max(...entries.map((e) => e.length)) * 6.4 + 34;
  const legendH = entries.length * 15 + 8;
  const lx = ml + pw - legendW - 6;
  const ly = mt + 6;
  s += `<rect x="${lx}" y="${ly}" width="${legendW}" height="${legendH}" rx="3" fill="#fff" fill-opacity="0.88" stroke="#ccc" stroke-width="0.5"/>\n`;
  seriesList.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const yRow = ly + 12 + idx * 15;
    s += `<line x1="${lx + 6}" y1="${yRow}" x2="${lx + 24}" y2="${yRow}" stroke="${color}" stroke-width="1.6"/>\n`;
    s += marker(MARKERS[idx % MARKERS.length], lx + 15, yRow, color) + "\n";
    s += `<text x="${lx + 29}" y="${yRow + 3.5}" font-size="10" fill="#333">${esc(series.label)}</text>\n`;
  });
  if (hasAnalytic) {
    const yRow = ly + 12 + seriesList.length * 15;
    s += `<line x1="${lx + 6}" y1="${yRow}" x2="${lx + 24}" y2="${yRow}" stroke="#555" stroke-width="1.2" stroke-dasharray="6,4"/>\n`;
    s += `<text x="${lx + 29}" y="${yRow + 3.5}" font-size="10" fill="#333">analytic</text>\n`;
  }

  s += "</svg>\n";
  return s;
}
