import { describe, expect, it } from "vitest";

import { LatestOnly } from "../src/api";

function deferred<T>() {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

describe("LatestOnly", () => {
  it("discards responses that arrive after a newer request", async () => {
    const latest = new LatestOnly();
    const slow = deferred<string>();
    const fast = deferred<string>();

    const first = latest.run("timeline", () => slow.promise);
    const second = latest.run("timeline", () => fast.promise);

    fast.resolve("new");
    expect(await second).toBe("new");

    slow.resolve("stale");
    expect(await first).toBeNull();
  });

  it("tracks request series independently per key", async () => {
    const latest = new LatestOnly();
    const a = deferred<string>();
    const firstA = latest.run("a", () => a.promise);
    const firstB = latest.run("b", async () => "b-value");
    expect(await firstB).toBe("b-value");
    a.resolve("a-value");
    expect(await firstA).toBe("a-value"); // different key, still latest
  });
});
