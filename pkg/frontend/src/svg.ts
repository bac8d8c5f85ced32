/** Minimal deterministic SVG line charts (no DOM, no runtime deps). */

import { formatTick, linearScale, logScale, Scale } from "./scale.js";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  yScale: "linear" | "log";
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const MARGIN = { top: 42, right: 180, bottom: 52, left: 76 };

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderLineChart(series: Series[], options: ChartOptions): string {
  if (series.length === 0) {
    throw new Error("nothing to plot: no series");
  }
  const width = options.width ?? 820;
  const height = options.height ?? 540;
  const plotX0 = MARGIN.left;
  const plotX1 = width - MARGIN.right;
  const plotY0 = height - MARGIN.bottom; // pixel y grows downwards
  const plotY1 = MARGIN.top;

  const drawable = series.map((s) => ({
    label: s.label,
    points:
      options.yScale === "log" ? s.points.filter((p) => p.y > 0) : s.points.slice(),
  }));
  const allPoints = drawable.flatMap((s) => s.points);
  if (allPoints.length === 0) {
    throw new Error("nothing to plot: all points were filtered out");
  }
  const xs = allPoints.map((p) => p.x);
  const ys = allPoints.map((p) => p.y);
  const xScale = linearScale(Math.min(...xs), Math.max(...xs), plotX0, plotX1);
  const yScale: Scale =
    options.yScale === "log"
      ? logScale(Math.min(...ys), Math.max(...ys), plotY0, plotY1)
      : linearScale(Math.min(...ys), Math.max(...ys), plotY0, plotY1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" data-yscale="${options.yScale}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${(plotX0 + plotX1) / 2}" y="24" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="16">${escapeXml(options.title)}</text>`,
  );

  // grid and ticks
  for (const tick of yScale.ticks) {
    const y = yScale.toPixel(tick).toFixed(2);
    parts.push(
      `<line x1="${plotX0}" y1="${y}" x2="${plotX1}" y2="${y}" stroke="#dddddd"/>`,
      `<text x="${plotX0 - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
        `font-family="sans-serif" font-size="11" class="ytick">` +
        `${formatTick(tick, yScale.kind)}</text>`,
    );
  }
  for (const tick of xScale.ticks) {
    const x = xScale.toPixel(tick).toFixed(2);
    parts.push(
      `<line x1="${x}" y1="${plotY0}" x2="${x}" y2="${plotY1}" stroke="#eeeeee"/>`,
      `<text x="${x}" y="${plotY0 + 18}" text-anchor="middle" ` +
        `font-family="sans-serif" font-size="11" class="xtick">` +
        `${formatTick(tick, xScale.kind)}</text>`,
    );
  }
  parts.push(
    `<line x1="${plotX0}" y1="${plotY0}" x2="${plotX1}" y2="${plotY0}" stroke="black"/>`,
    `<line x1="${plotX0}" y1="${plotY0}" x2="${plotX0}" y2="${plotY1}" stroke="black"/>`,
    `<text x="${(plotX0 + plotX1) / 2}" y="${height - 12}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="13">${escapeXml(options.xLabel)}</text>`,
    `<text x="20" y="${(plotY0 + plotY1) / 2}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="13" ` +
      `transform="rotate(-90 20 ${(plotY0 + plotY1) / 2})">${escapeXml(options.yLabel)}</text>`,
  );

  drawable.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const coords = s.points
      .map((p) => `${xScale.toPixel(p.x).toFixed(2)},${yScale.toPixel(p.y).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline class="series" data-label="${escapeXml(s.label)}" points="${coords}" ` +
        `fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${xScale.toPixel(p.x).toFixed(2)}" cy="${yScale.toPixel(p.y).toFixed(2)}" ` +
          `r="2.4" fill="${color}"/>`,
      );
    }
    const legendY = MARGIN.top + 18 * i;
    parts.push(
      `<line x1="${plotX1 + 12}" y1="${legendY}" x2="${plotX1 + 34}" y2="${legendY}" ` +
        `stroke="${color}" stroke-width="2"/>`,
      `<text x="${plotX1 + 40}" y="${legendY}" dominant-baseline="middle" ` +
        `font-family="sans-serif" font-size="12" class="legend">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
