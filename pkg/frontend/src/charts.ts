import type { DecisionBlock, LossCurveData } from "./api.js";

// Hand-rolled SVG: the charts draw exactly what the API returned, no
// smoothing or resampling on the client.

export interface Frame {
  width: number;
  height: number;
  pad: number;
}

export const CURVE_FRAME: Frame = { width: 640, height: 240, pad: 30 };
export const LINE_FRAME: Frame = { width: 640, height: 200, pad: 30 };

function px(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

export function xScale(frame: Frame, dom: [number, number]): (v: number) => number {
  const span = dom[1] - dom[0] || 1;
  return (v) => frame.pad + ((v - dom[0]) / span) * (frame.width - 2 * frame.pad);
}

export function yScale(frame: Frame, dom: [number, number]): (v: number) => number {
  const span = dom[1] - dom[0] || 1;
  return (v) =>
    frame.height - frame.pad - ((v - dom[0]) / span) * (frame.height - 2 * frame.pad);
}

export function linePath(
  xs: number[],
  ys: number[],
  frame: Frame,
  xdom: [number, number],
  ydom: [number, number],
): string {
  if (xs.length === 0 || xs.length !== ys.length) return "";
  const sx = xScale(frame, xdom);
  const sy = yScale(frame, ydom);
  const parts = xs.map(
    (x, i) => `${i === 0 ? "M" : "L"}${px(sx(x))},${px(sy(ys[i]))}`,
  );
  return parts.join(" ");
}

function vMarker(
  frame: Frame,
  sx: (v: number) => number,
  tau: number,
  cls: string,
  label: string,
): string {
  const x = px(sx(tau));
  return (
    `<line class="${cls}" data-tau="${tau}" x1="${x}" y1="${frame.pad}" ` +
    `x2="${x}" y2="${frame.height - frame.pad}"></line>` +
    `<text class="${cls}-label" x="${x}" y="${frame.pad - 6}">${label}</text>`
  );
}

/** Loss curve with vertical markers at tau_free, tau_capacity, tau_star. */
export function lossCurveSvg(
  curve: LossCurveData,
  decision: DecisionBlock,
  frame: Frame = CURVE_FRAME,
): string {
  const ymax = Math.max(...curve.losses, decision.loss_at_tau_star, 1e-9);
  const sx = xScale(frame, [0, 1]);
  const path = linePath(curve.taus, curve.losses, frame, [0, 1], [0, ymax]);
  const axisY = px(frame.height - frame.pad);
  return (
    `<svg viewBox="0 0 ${frame.width} ${frame.height}" role="img" aria-label="loss curve">` +
    `<line class="axis" x1="${px(frame.pad)}" y1="${axisY}" ` +
    `x2="${px(frame.width - frame.pad)}" y2="${axisY}"></line>` +
    `<path class="loss-curve" d="${path}" fill="none"></path>` +
    vMarker(frame, sx, decision.tau_free, "marker-tau-free", "free") +
    vMarker(frame, sx, decision.tau_capacity, "marker-tau-capacity", "cap") +
    vMarker(frame, sx, decision.tau_star, "marker-tau-star", "deployed") +
    `</svg>`
  );
}

export interface CapacityPoint {
  capacity: number;
  recall: number;
}

/** Recall as a function of the capacity budget, from a client-side sweep. */
export function capacityLineSvg(
  points: CapacityPoint[],
  frame: Frame = LINE_FRAME,
): string {
  const ordered = [...points].sort((a, b) => a.capacity - b.capacity);
  const sx = xScale(frame, [0, 1]);
  const sy = yScale(frame, [0, 1]);
  const path = linePath(
    ordered.map((p) => p.capacity),
    ordered.map((p) => p.recall),
    frame,
    [0, 1],
    [0, 1],
  );
  const dots = ordered
    .map(
      (p) =>
        `<circle class="capacity-dot" data-capacity="${p.capacity}" ` +
        `data-recall="${p.recall}" cx="${px(sx(p.capacity))}" cy="${px(sy(p.recall))}" r="3"></circle>`,
    )
    .join("");
  const axisY = px(frame.height - frame.pad);
  return (
    `<svg viewBox="0 0 ${frame.width} ${frame.height}" role="img" aria-label="recall versus capacity">` +
    `<line class="axis" x1="${px(frame.pad)}" y1="${axisY}" ` +
    `x2="${px(frame.width - frame.pad)}" y2="${axisY}"></line>` +
    `<path class="capacity-line" d="${path}" fill="none"></path>` +
    dots +
    `</svg>`
  );
}

/** Horizontal 0..1 gauge; the bar length is the raw API value. */
export function gaugeSvg(value: number, width = 160, height = 14): string {
  const frac = Math.min(1, Math.max(0, value));
  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="gauge">` +
    `<rect class="gauge-track" x="0" y="0" width="${width}" height="${height}"></rect>` +
    `<rect class="gauge-fill" data-value="${value}" x="0" y="0" ` +
    `width="${px(frac * width)}" height="${height}"></rect>` +
    `</svg>`
  );
}
