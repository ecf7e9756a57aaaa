/**
 * CSV schemas emitted by the clocksync simulator.
 *
 * Two inputs are understood: the synchronization trace CSV (one row per
 * controller step) and the ptp4l analysis CSV (one row per log record).
 * Schema violations raise a SchemaError naming the offending column.
 */

import Papa from "papaparse";

export const TRACE_COLUMNS = [
  "step_index",
  "sim_time_s",
  "step_s",
  "offset_before_s",
  "offset_after_s",
  "freq_corr_ppm",
  "drift_corr_per_s",
  "alpha_hat",
  "beta_hat",
  "theta_hat_s",
  "d_hat_s",
  "n_used",
  "n_filtered",
] as const;

export const PTP_COLUMNS = [
  "timestamp_s",
  "master_offset_ns",
  "servo_state",
  "freq_adj_ppb",
  "path_delay_ns",
] as const;

export interface TraceRow {
  step_index: number;
  sim_time_s: number;
  step_s: number;
  offset_before_s: number;
  offset_after_s: number;
  freq_corr_ppm: number;
  drift_corr_per_s: number;
  alpha_hat: number;
  beta_hat: number;
  theta_hat_s: number;
  d_hat_s: number;
  n_used: number;
  n_filtered: number;
}

export interface PtpRow {
  timestamp_s: number;
  master_offset_ns: number;
  servo_state: number;
  freq_adj_ppb: number;
  path_delay_ns: number;
}

export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, detail: string) {
    super(`column ${JSON.stringify(column)}: ${detail}`);
    this.name = "SchemaError";
    this.column = column;
  }
}

function parseRows(
  text: string,
  columns: readonly string[],
): Record<string, number>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const col of columns) {
    if (!fields.includes(col)) {
      throw new SchemaError(col, "missing from header");
    }
  }
  return parsed.data.map((raw, i) => {
    const row: Record<string, number> = {};
    for (const col of columns) {
      const value = Number(raw[col]);
      if (raw[col] === undefined || raw[col] === "" || Number.isNaN(value)) {
        // nan is a legal float cell (failed estimator step)
        if ((raw[col] ?? "").trim() === "nan") {
          row[col] = NaN;
          continue;
        }
        throw new SchemaError(col, `row ${i + 1} is not numeric`);
      }
      row[col] = value;
    }
    return row;
  });
}

export function parseTraceCsv(text: string): TraceRow[] {
  return parseRows(text, TRACE_COLUMNS) as unknown as TraceRow[];
}

export function parsePtpCsv(text: string): PtpRow[] {
  return parseRows(text, PTP_COLUMNS) as unknown as PtpRow[];
}

/** Header sniffing so the CLI can accept either input kind. */
export function detectKind(text: string): "trace" | "ptp" {
  const header = text.slice(0, text.indexOf("\n")).trim();
  if (header === TRACE_COLUMNS.join(",")) return "trace";
  if (header === PTP_COLUMNS.join(",")) return "ptp";
  throw new SchemaError(header.split(",")[0] ?? "", "unrecognized header");
}
