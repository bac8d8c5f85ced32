/**
 * Figure builders for the two CSV kinds the solver emits:
 *
 * - convergence histories (log-y error vs iteration, one line per
 *   method/coarse-space combination), and
 * - spectral-radius sweeps (radius vs overlap size, one line per operator).
 */

import { CsvTable, numberAt, parseCsv, requireColumn, SchemaError } from "./csv.js";
import { renderLineChart, Series } from "./svg.js";

export interface NamedCsv {
  path: string;
  text: string;
}

function seriesLabel(method: string, coarse: string): string {
  return coarse === "" || coarse === "none" ? method : `${method} (${coarse})`;
}

export function convergenceSeries(tables: CsvTable[]): Series[] {
  const byLabel = new Map<string, Series>();
  for (const table of tables) {
    const method = requireColumn(table, "method");
    const coarse = requireColumn(table, "coarse");
    const iteration = requireColumn(table, "iteration");
    const relError = requireColumn(table, "rel_error");
    if (table.rows.length === 0) {
      throw new SchemaError(`${table.source}: no data rows`);
    }
    for (const row of table.rows) {
      const label = seriesLabel(row[method] ?? "?", row[coarse] ?? "");
      const x = numberAt(table, row, iteration);
      const y = numberAt(table, row, relError);
      if (x === null || y === null) continue;
      let series = byLabel.get(label);
      if (!series) {
        series = { label, points: [] };
        byLabel.set(label, series);
      }
      series.points.push({ x, y });
    }
  }
  const out = [...byLabel.values()];
  for (const s of out) s.points.sort((a, b) => a.x - b.x);
  return out;
}

export function radiiSeries(tables: CsvTable[]): Series[] {
  const byOperator = new Map<string, Series>();
  for (const table of tables) {
    const operator = requireColumn(table, "operator");
    const nOv = requireColumn(table, "n_ov");
    const rho = requireColumn(table, "rho_numeric");
    if (table.rows.length === 0) {
      throw new SchemaError(`${table.source}: no data rows`);
    }
    for (const row of table.rows) {
      const label = row[operator] ?? "?";
      const x = numberAt(table, row, nOv);
      const y = numberAt(table, row, rho);
      if (x === null || y === null) continue;
      let series = byOperator.get(label);
      if (!series) {
        series = { label, points: [] };
        byOperator.set(label, series);
      }
      series.points.push({ x, y });
    }
  }
  const out = [...byOperator.values()];
  for (const s of out) s.points.sort((a, b) => a.x - b.x);
  return out;
}

export function renderConvergenceFigure(inputs: NamedCsv[]): string {
  const tables = inputs.map((f) => parseCsv(f.text, f.path));
  const series = convergenceSeries(tables);
  if (series.length === 0) {
    throw new SchemaError("convergence figure: no series found");
  }
  return renderLineChart(series, {
    title: "Error decay per iteration",
    xLabel: "iteration",
    yLabel: "relative error",
    yScale: "log",
  });
}

export function renderRadiiFigure(inputs: NamedCsv[]): string {
  const tables = inputs.map((f) => parseCsv(f.text, f.path));
  const series = radiiSeries(tables);
  if (series.length === 0) {
    throw new SchemaError("radius figure: no series found");
  }
  return renderLineChart(series, {
    title: "Two-level spectral radii vs overlap",
    xLabel: "interior overlap columns",
    yLabel: "spectral radius",
    yScale: "linear",
  });
}
