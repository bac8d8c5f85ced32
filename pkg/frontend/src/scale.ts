/** Axis scales and tick generation for the SVG charts. */

export interface Scale {
  /** Map a data value to a pixel coordinate. */
  toPixel(value: number): number;
  ticks: number[];
  kind: "linear" | "log";
}

export function linearScale(
  min: number,
  max: number,
  pixelStart: number,
  pixelEnd: number,
  tickCount = 6,
): Scale {
  if (max === min) {
    max = min + 1;
    min = min - 1;
  }
  const step = niceStep((max - min) / Math.max(tickCount - 1, 1));
  const lo = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let t = lo; t <= max + 1e-12 * Math.abs(max); t += step) {
    ticks.push(roundTo(t, step));
  }
  return {
    kind: "linear",
    ticks,
    toPixel: (v) => pixelStart + ((v - min) / (max - min)) * (pixelEnd - pixelStart),
  };
}

export function logScale(min: number, max: number, pixelStart: number, pixelEnd: number): Scale {
  if (min <= 0 || max <= 0) {
    throw new Error(`log scale needs positive bounds, got [${min}, ${max}]`);
  }
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const every = Math.max(1, Math.ceil((hi - lo) / 8)); // at most ~9 decade labels
  const ticks: number[] = [];
  for (let d = lo; d <= hi; d += every) ticks.push(10 ** d);
  const logMin = Math.log10(min);
  const logMax = Math.log10(max) === logMin ? logMin + 1 : Math.log10(max);
  return {
    kind: "log",
    ticks,
    toPixel: (v) =>
      pixelStart + ((Math.log10(v) - logMin) / (logMax - logMin)) * (pixelEnd - pixelStart),
  };
}

function niceStep(raw: number): number {
  const magnitude = 10 ** Math.floor(Math.log10(raw));
  const unit = raw / magnitude;
  const nice = unit < 1.5 ? 1 : unit < 3.5 ? 2 : unit < 7.5 ? 5 : 10;
  return nice * magnitude;
}

function roundTo(value: number, step: number): number {
  const digits = Math.max(0, -Math.floor(Math.log10(step)) + 1);
  return Number(value.toFixed(digits));
}

export function formatTick(value: number, kind: "linear" | "log"): string {
  if (kind === "log") {
    const exp = Math.round(Math.log10(value));
    return `1e${exp}`;
  }
  return String(value);
}
