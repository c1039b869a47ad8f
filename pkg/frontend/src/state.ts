import type { ScenarioParams, ScenarioResponse } from "./api.js";

// Slider ranges deliberately extend past the usual weight grids so the
// saturation regime (weights rise, threshold stops moving) is visible.
export const SLIDER_BOUNDS = {
  alpha: { min: 0, max: 5, step: 0.1 },
  beta: { min: 0, max: 3, step: 0.1 },
  gamma: { min: 0, max: 4, step: 0.1 },
  capacity: { min: 0.01, max: 1, step: 0.01 },
} as const;

export type ParamName = keyof typeof SLIDER_BOUNDS;

export const DEFAULT_PARAMS: ScenarioParams = {
  alpha: 2,
  beta: 1,
  gamma: 1,
  capacity: 0.25,
};

export function clampParam(name: ParamName, value: number): number {
  const { min, max } = SLIDER_BOUNDS[name];
  if (!Number.isFinite(value)) return min;
  return Math.min(max, Math.max(min, value));
}

export interface PinnedScenario {
  label: string;
  params: ScenarioParams;
  response: ScenarioResponse;
}

export interface PinDiff {
  label: string;
  recall: number;
  disparity: number;
  intervention_rate: number;
}

export class ScenarioStore {
  datasetId: string | null = null;
  params: ScenarioParams = { ...DEFAULT_PARAMS };
  lastResponse: ScenarioResponse | null = null;
  lastError: string | null = null;
  pins: PinnedScenario[] = [];

  setParam(name: ParamName, value: number): number {
    const clamped = clampParam(name, value);
    this.params = { ...this.params, [name]: clamped };
    return clamped;
  }

  setResponse(response: ScenarioResponse): void {
    this.lastResponse = response;
    this.lastError = null;
  }

  setError(message: string): void {
    this.lastError = message;
  }

  pin(label?: string): PinnedScenario | null {
    if (this.lastResponse === null) return null;
    const entry: PinnedScenario = {
      label: label ?? `pin ${this.pins.length + 1}`,
      params: { ...this.lastResponse.params },
      response: this.lastResponse,
    };
    this.pins = [...this.pins, entry];
    return entry;
  }

  unpin(index: number): void {
    this.pins = this.pins.filter((_, i) => i !== index);
  }

  clearPins(): void {
    this.pins = [];
  }

  /** Current-minus-pinned deltas of the headline metrics, all API-sourced. */
  diffs(): PinDiff[] {
    const current = this.lastResponse;
    if (current === null) return [];
    return this.pins.map((p) => ({
      label: p.label,
      recall: current.metrics.recall - p.response.metrics.recall,
      disparity: current.metrics.disparity - p.response.metrics.disparity,
      intervention_rate:
        current.metrics.intervention_rate - p.response.metrics.intervention_rate,
    }));
  }
}
