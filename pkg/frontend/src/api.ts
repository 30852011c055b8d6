// Thin API client plus a stale-response guard: only the response belonging
// to the most recent request of each keyed series is delivered.

import { MetricsDoc, TimelineDoc, VideoMetaDoc } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const doc = await response.json();
      if (doc && typeof doc.error === "string") detail = doc.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(public base: string = "") {}

  sessions(): Promise<string[]> {
    return getJson(`${this.base}/sessions`);
  }

  students(sessionId: string): Promise<string[]> {
    return getJson(`${this.base}/sessions/${encodeURIComponent(sessionId)}/students`);
  }

  timeline(sessionId: string, query: string): Promise<TimelineDoc> {
    return getJson(
      `${this.base}/sessions/${encodeURIComponent(sessionId)}/timeline?${query}`,
    );
  }

  videoMeta(sessionId: string): Promise<VideoMetaDoc> {
    return getJson(`${this.base}/sessions/${encodeURIComponent(sessionId)}/video-meta`);
  }

  metrics(sessionId: string): Promise<MetricsDoc> {
    return getJson(`${this.base}/sessions/${encodeURIComponent(sessionId)}/metrics`);
  }

  videoUrl(sessionId: string, cameraId: string): string {
    return `${this.base}/sessions/${encodeURIComponent(sessionId)}/video/${encodeURIComponent(cameraId)}`;
  }
}

/** Delivers only the latest in-flight request per key; stale ones resolve null. */
export class LatestOnly {
  private tokens = new Map<string, number>();

  async run<T>(key: string, request: () => Promise<T>): Promise<T | null> {
    const token = (this.tokens.get(key) ?? 0) + 1;
    this.tokens.set(key, token);
    const result = await request();
    return this.tokens.get(key) === token ? result : null;
  }
}
