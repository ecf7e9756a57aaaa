#!/usr/bin/env node
/**
 * Batch figure rendering from clocksync CSVs.
 *
 *   clocksync-figures panels trace1.csv trace2.csv ... --out fig.svg
 *   clocksync-figures overlay trace_or_ptp.csv --out fig.svg
 *
 * Exit code 0 on success; schema violations print one
 * "error: SchemaError: ..." line and exit 1.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import {
  overlayFromPtp,
  overlayFromTrace,
  panelTitle,
  renderConvergencePanels,
  renderOffsetFreqOverlay,
} from "./figures.js";
import { SchemaError, detectKind, parsePtpCsv, parseTraceCsv } from "./schema.js";

export function runPanels(
  inputs: string[],
  out: string,
  opts: { cols?: number; log?: boolean },
): void {
  const panels = inputs.map((path) => {
    const rows = parseTraceCsv(readFileSync(path, "utf8"));
    return { title: panelTitle(basename(path, ".csv"), rows), rows };
  });
  const svg = renderConvergencePanels(panels, {
    cols: opts.cols,
    yScale: opts.log ? "symlog" : "linear",
  });
  writeFileSync(out, svg);
}

export function runOverlay(input: string, out: string): void {
  const text = readFileSync(input, "utf8");
  const series =
    detectKind(text) === "trace"
      ? overlayFromTrace(parseTraceCsv(text))
      : overlayFromPtp(parsePtpCsv(text));
  writeFileSync(out, renderOffsetFreqOverlay(series));
}

export function main(argv: string[]): number {
  try {
    yargs(argv)
      .scriptName("clocksync-figures")
      .command(
        "panels <csv..>",
        "render one convergence panel per trace CSV",
        (y) =>
          y
            .positional("csv", { array: true, type: "string", demandOption: true })
            .option("out", { type: "string", demandOption: true })
            .option("cols", { type: "number" })
            .option("log", { type: "boolean", default: false }),
        (args) =>
          runPanels(args.csv as string[], args.out, {
            cols: args.cols,
            log: args.log,
          }),
      )
      .command(
        "overlay <csv>",
        "render a dual-axis offset/frequency overlay",
        (y) =>
          y
            .positional("csv", { type: "string", demandOption: true })
            .option("out", { type: "string", demandOption: true }),
        (args) => runOverlay(args.csv as string, args.out),
      )
      .demandCommand(1)
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseSync();
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`error: SchemaError: ${err.message}\n`);
    } else {
      const msg = err instanceof Error ? err.message : String(err);
      process.stderr.write(`error: ${msg}\n`);
    }
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(basename(process.argv[1]));
if (isMain) {
  process.exit(main(hideBin(process.argv)));
}
