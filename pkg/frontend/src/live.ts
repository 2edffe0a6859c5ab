/** Live updates: server-sent events with automatic resubscription, plus a
 * polling fallback while the stream is down. */

import type { EngineApi, PanelNotification } from "./api.js";

export type Unsubscribe = () => void;

export interface StreamHandle {
  close(): void;
}

export type StreamFactory = (
  url: string,
  onMessage: (data: string) => void,
  onError: (error: unknown) => void,
) => StreamHandle;

/** Minimal SSE reader over fetch streaming; works in browsers and node. */
export const fetchStream: StreamFactory = (url, onMessage, onError) => {
  const controller = new AbortController();
  (async () => {
    try {
      const response = await fetch(url, {
        signal: controller.signal,
        headers: { accept: "text/event-stream" },
      });
      if (!response.ok || response.body === null) {
        throw new Error(`stream unavailable: ${response.status}`);
      }
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      let buffer = "";
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let cut;
        while ((cut = buffer.indexOf("\n\n")) >= 0) {
          const frame = buffer.slice(0, cut);
          buffer = buffer.slice(cut + 2);
          for (const line of frame.split("\n")) {
            if (line.startsWith("data:")) onMessage(line.slice(5).trim());
          }
        }
      }
      onError(new Error("stream ended"));
    } catch (error) {
      if (!controller.signal.aborted) onError(error);
    }
  })();
  return { close: () => controller.abort() };
};

export interface LiveOptions {
  pollIntervalMs?: number;
  resubscribeDelayMs?: number;
  streamFactory?: StreamFactory;
}

export class LiveUpdates {
  private handle: StreamHandle | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private lastSeq = -1;
  private running = false;

  constructor(
    private readonly api: EngineApi,
    private readonly onBatch: (batch: PanelNotification[]) => Promise<void> | void,
    private readonly options: LiveOptions = {},
  ) {}

  start(): void {
    if (this.running) return;
    this.running = true;
    this.subscribe();
  }

  stop(): void {
    this.running = false;
    this.handle?.close();
    this.handle = null;
    this.stopPolling();
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
  }

  private subscribe(): void {
    const factory = this.options.streamFactory ?? fetchStream;
    try {
      this.handle = factory(
        `${this.api.baseUrl}/notifications/stream`,
        (data) => this.deliver(data),
        () => this.dropped(),
      );
      this.stopPolling();
    } catch {
      this.dropped();
    }
  }

  private deliver(data: string): void {
    try {
      const notification = JSON.parse(data) as PanelNotification;
      this.lastSeq = Math.max(this.lastSeq, notification.seq);
      void this.onBatch([notification]);
    } catch {
      // malformed frame: ignore, the poll fallback resynchronizes
    }
  }

  private dropped(): void {
    this.handle = null;
    if (!this.running) return;
    this.startPolling();
    this.retryTimer = setTimeout(
      () => this.running && this.subscribe(),
      this.options.resubscribeDelayMs ?? 1000,
    );
  }

  private startPolling(): void {
    if (this.pollTimer !== null) return;
    const interval = this.options.pollIntervalMs ?? 2000;
    this.pollTimer = setInterval(() => void this.pollOnce(), interval);
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  async pollOnce(): Promise<void> {
    try {
      const batch = await this.api.notifications(this.lastSeq);
      for (const n of batch) this.lastSeq = Math.max(this.lastSeq, n.seq);
      if (batch.length > 0) await this.onBatch(batch);
    } catch {
      // server unreachable: keep polling
    }
  }
}
