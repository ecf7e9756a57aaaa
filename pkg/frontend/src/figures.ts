/**
 * Figure rendering for clocksync traces.
 *
 * Pure consumer: every number drawn comes verbatim from an input CSV;
 * nothing is re-estimated here.
 */

import { PtpRow, TraceRow } from "./schema.js";
import { Scale, YScale, axes, esc, extent, polyline, svgDocument } from "./svg.js";

const PANEL_W = 300;
const PANEL_H = 200;
const MARGIN = { left: 62, right: 62, top: 28, bottom: 36 };

export interface Panel {
  title: string;
  rows: TraceRow[];
}

export interface PanelOptions {
  cols?: number;
  yScale?: YScale;
}

export function panelTitle(name: string, rows: TraceRow[]): string {
  if (rows.length > 0) return `step ${rows[0].step_s} s`;
  return name;
}

function renderPanel(
  panel: Panel,
  ox: number,
  oy: number,
  yScale: YScale,
): string {
  const inner = {
    x0: ox + MARGIN.left,
    x1: ox + PANEL_W - MARGIN.right,
    y0: oy + PANEL_H - MARGIN.bottom,
    y1: oy + MARGIN.top,
  };
  const parts: string[] = [];
  parts.push(
    `<text x="${ox + PANEL_W / 2}" y="${oy + 16}" font-size="11" text-anchor="middle" fill="#111">${esc(panel.title)}</text>`,
  );
  if (panel.rows.length === 0) {
    parts.push(
      `<text x="${ox + PANEL_W / 2}" y="${oy + PANEL_H / 2}" font-size="9" text-anchor="middle" fill="#999">no data</text>`,
    );
    return parts.join("\n");
  }
  const xs = panel.rows.map((r) => r.sim_time_s);
  const ys = panel.rows.map((r) => r.offset_after_s);
  const x = new Scale(extent(xs), { min: inner.x0, max: inner.x1 });
  const y = new Scale(extent(ys), { min: inner.y0, max: inner.y1 }, yScale);
  parts.push(axes(x, y, { xLabel: "time (s)", yLabel: "offset (s)" }));
  parts.push(polyline(xs, ys, x, y, "#1f6fb5"));
  return parts.join("\n");
}

/** One panel per input trace: offset_after_s against sim_time_s. */
export function renderConvergencePanels(
  panels: Panel[],
  opts: PanelOptions = {},
): string {
  const cols = Math.max(1, opts.cols ?? Math.min(3, panels.length || 1));
  const rows = Math.max(1, Math.ceil(panels.length / cols));
  const body = panels
    .map((panel, i) =>
      renderPanel(
        panel,
        (i % cols) * PANEL_W,
        Math.floor(i / cols) * PANEL_H,
        opts.yScale ?? "linear",
      ),
    )
    .join("\n");
  return svgDocument(cols * PANEL_W, rows * PANEL_H, body);
}

export interface OverlaySeries {
  time: number[];
  offset: number[];
  offsetLabel: string;
  freq: number[];
  freqLabel: string;
}

export function overlayFromTrace(rows: TraceRow[]): OverlaySeries {
  return {
    time: rows.map((r) => r.sim_time_s),
    offset: rows.map((r) => r.offset_before_s),
    offsetLabel: "offset (s)",
    freq: rows.map((r) => r.freq_corr_ppm),
    freqLabel: "freq corr (ppm)",
  };
}

export function overlayFromPtp(rows: PtpRow[]): OverlaySeries {
  return {
    time: rows.map((r) => r.timestamp_s),
    offset: rows.map((r) => r.master_offset_ns),
    offsetLabel: "offset (ns)",
    freq: rows.map((r) => r.freq_adj_ppb),
    freqLabel: "freq adj (ppb)",
  };
}

/** Dual-axis overlay of offset and mean-removed frequency correction. */
export function renderOffsetFreqOverlay(series: OverlaySeries): string {
  const W = 640;
  const H = 320;
  const inner = {
    x0: MARGIN.left,
    x1: W - MARGIN.right,
    y0: H - MARGIN.bottom,
    y1: MARGIN.top,
  };
  const finite = series.freq.filter((v) => Number.isFinite(v));
  const mean =
    finite.length > 0 ? finite.reduce((a, b) => a + b, 0) / finite.length : 0;
  const freqFluct = series.freq.map((v) => v - mean);

  const x = new Scale(extent(series.time), { min: inner.x0, max: inner.x1 });
  const yOff = new Scale(extent(series.offset), { min: inner.y0, max: inner.y1 });
  const yFreq = new Scale(extent(freqFluct), { min: inner.y0, max: inner.y1 });

  const parts: string[] = [];
  parts.push(
    `<text x="${W / 2}" y="16" font-size="11" text-anchor="middle" fill="#111">offset and mean-removed frequency correction</text>`,
  );
  parts.push(
    axes(x, yOff, { xLabel: "time (s)", yLabel: series.offsetLabel }),
  );
  parts.push(axes(x, yFreq, { yLabel: `${series.freqLabel} - mean`, side: "right" }));
  parts.push(polyline(series.time, series.offset, x, yOff, "#d4a017"));
  parts.push(polyline(series.time, freqFluct, x, yFreq, "#1f6fb5"));
  parts.push(
    `<text x="${inner.x0 + 6}" y="${inner.y1 + 10}" font-size="9" fill="#d4a017">offset</text>`,
  );
  parts.push(
    `<text x="${inner.x0 + 6}" y="${inner.y1 + 22}" font-size="9" fill="#1f6fb5">frequency</text>`,
  );
  return svgDocument(W, H, parts.join("\n"));
}
