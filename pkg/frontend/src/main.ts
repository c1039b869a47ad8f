import { ApiClient, type ScenarioParams, type ScenarioResponse } from "./api.js";
import { RequestScheduler } from "./scheduler.js";
import { ScenarioStore, SLIDER_BOUNDS, type ParamName } from "./state.js";
import {
  readSliders,
  renderCapacityLine,
  renderDatasets,
  renderDiffs,
  renderError,
  renderResponse,
  renderSkeleton,
  setSliders,
} from "./view.js";

interface EvaluateJob {
  datasetId: string;
  params: ScenarioParams;
}

export interface ControllerOptions {
  delayMs?: number;
}

export interface Controller {
  root: HTMLElement;
  client: ApiClient;
  store: ScenarioStore;
  scheduler: RequestScheduler<EvaluateJob, ScenarioResponse>;
  ready: Promise<void>;
  refresh(): void;
  traceCapacityLine(): Promise<void>;
}

/** Twenty budget levels from 0.05 to 1.0 for the recall-vs-C trace. */
export function capacityLadder(): number[] {
  return Array.from({ length: 20 }, (_, i) => Math.round(5 * (i + 1)) / 100);
}

export function createController(
  root: HTMLElement,
  client: ApiClient,
  opts: ControllerOptions = {},
): Controller {
  renderSkeleton(root);
  const store = new ScenarioStore();
  setSliders(root, store.params);

  const scheduler = new RequestScheduler<EvaluateJob, ScenarioResponse>({
    delayMs: opts.delayMs ?? 250,
    issue: (job) =>
      client.evaluate(job.datasetId, job.params, { baselines: true, curve: true }),
    apply: (response) => {
      store.setResponse(response);
      renderResponse(root, response);
      renderDiffs(root, store.diffs());
      renderError(root, null);
    },
    onError: (err) => {
      const message = err instanceof Error ? err.message : String(err);
      store.setError(message);
      renderError(root, message);
    },
  });

  const refresh = () => {
    if (store.datasetId === null) return;
    scheduler.request({ datasetId: store.datasetId, params: { ...store.params } });
  };

  for (const name of Object.keys(SLIDER_BOUNDS) as ParamName[]) {
    const input = root.querySelector<HTMLInputElement>(`#slider-${name}`)!;
    input.addEventListener("input", () => {
      const clamped = store.setParam(name, Number(input.value));
      input.value = String(clamped);
      root.querySelector<HTMLOutputElement>(`#slider-${name}-value`)!.textContent =
        input.value;
      refresh();
    });
  }

  const select = root.querySelector<HTMLSelectElement>("#dataset-select")!;
  select.addEventListener("change", () => {
    store.datasetId = select.value;
    refresh();
  });

  root.querySelector<HTMLButtonElement>("#pin-button")!.addEventListener("click", () => {
    store.pin();
    renderDiffs(root, store.diffs());
  });
  root
    .querySelector<HTMLButtonElement>("#clear-pins-button")!
    .addEventListener("click", () => {
      store.clearPins();
      renderDiffs(root, store.diffs());
    });

  const traceCapacityLine = async () => {
    if (store.datasetId === null) return;
    try {
      const records = await client.capacityLine(
        store.datasetId,
        { ...store.params },
        capacityLadder(),
      );
      renderCapacityLine(
        root,
        records.map((r) => ({ capacity: r.capacity, recall: r.recall })),
      );
      renderError(root, null);
    } catch (err) {
      renderError(root, err instanceof Error ? err.message : String(err));
    }
  };
  root
    .querySelector<HTMLButtonElement>("#capacity-line-button")!
    .addEventListener("click", () => {
      void traceCapacityLine();
    });

  const ready = (async () => {
    const datasets = await client.listDatasets();
    if (datasets.length === 0) {
      renderError(root, "no datasets registered on the server");
      return;
    }
    store.datasetId = datasets[0].dataset_id;
    renderDatasets(root, datasets, store.datasetId);
    store.params = readSliders(root);
    refresh();
    await scheduler.flush();
  })();

  return { root, client, store, scheduler, ready, refresh, traceCapacityLine };
}
