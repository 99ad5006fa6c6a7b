// Debounced, latest-wins preview loop: slider input schedules a request
// 50 ms out; a newer schedule cancels the pending timer, and a response
// that is no longer the newest request is dropped. Failures surface
// through onError while the last good image stays visible.

import { fetchConditionMap, ServiceError } from './api.js';
import type { ConditionRequest } from './api.js';

export const DEBOUNCE_MS = 50;

export interface PreviewCallbacks {
  onImage: (png: Blob) => void;
  onError: (message: string) => void;
}

export class PreviewLoop {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;
  private controller: AbortController | null = null;

  constructor(
    private readonly callbacks: PreviewCallbacks,
    private readonly base = '',
    private readonly debounceMs = DEBOUNCE_MS,
  ) {}

  schedule(req: ConditionRequest): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fire(req);
    }, this.debounceMs);
  }

  private async fire(req: ConditionRequest): Promise<void> {
    const gen = ++this.generation;
    this.controller?.abort();
    this.controller = new AbortController();
    try {
      const blob = await fetchConditionMap(req, this.base, this.controller.signal);
      if (gen === this.generation) this.callbacks.onImage(blob);
    } catch (err) {
      if (gen !== this.generation) return; // superseded: ignore
      if (err instanceof DOMException && err.name === 'AbortError') return;
      if (err instanceof ServiceError) {
        this.callbacks.onError(
          err.status === 422 ? `geometry: ${err.message}` : err.message,
        );
      } else {
        this.callbacks.onError('preview service unreachable');
      }
    }
  }
}
