import { describe, expect, it } from "vitest";

import {
  VideoSync,
  playheadForVideoTime,
  videoTimeForPlayhead,
} from "../src/player";

/** Minimal stand-in for an HTMLVideoElement's time/seek surface. */
class FakeVideo {
  currentTime = 0;
  private listeners = new Map<string, Set<() => void>>();

  addEventListener(type: string, listener: () => void): void {
    if (!this.listeners.has(type)) this.listeners.set(type, new Set());
    this.listeners.get(type)!.add(listener);
  }

  removeEventListener(type: string, listener: () => void): void {
    this.listeners.get(type)?.delete(listener);
  }

  /** Simulate playback progressing by dt seconds. */
  advance(dt: number): void {
    this.currentTime += dt;
    for (const listener of this.listeners.get("timeupdate") ?? []) listener();
  }
}

describe("offset arithmetic", () => {
  it("maps both directions", () => {
    expect(videoTimeForPlayhead(60, 2.5)).toBe(57.5);
    expect(playheadForVideoTime(57.5, 2.5)).toBe(60);
    expect(videoTimeForPlayhead(1, 2.5)).toBe(0); // clamped before video start
  });
});

describe("VideoSync", () => {
  it("timeline click seeks the video to t minus the camera offset", () => {
    const video = new FakeVideo();
    const sync = new VideoSync(video, () => {});
    sync.setOffset(2.5);
    sync.seekPlayhead(60);
    expect(video.currentTime).toBe(57.5);
    expect(sync.divergence(60)).toBeLessThan(0.1);
  });

  it("video playback advances the playhead with < 100 ms divergence", () => {
    const video = new FakeVideo();
    let playhead = 0;
    const sync = new VideoSync(video, (t) => {
      playhead = t;
    });
    sync.setOffset(1.0);
    sync.seekPlayhead(5.0);
    // play ten seconds in 250 ms ticks
    for (let i = 0; i < 40; i++) {
      video.advance(0.25);
      expect(sync.divergence(playhead)).toBeLessThan(0.1);
    }
    expect(playhead).toBeCloseTo(15.0, 9);
  });

  it("switching cameras mid-playback preserves the playhead under the new offset", () => {
    const video = new FakeVideo();
    let playhead = 0;
    const sync = new VideoSync(video, (t) => {
      playhead = t;
    });
    sync.setOffset(0.0);
    sync.seekPlayhead(42.0);
    video.advance(3.0);
    expect(playhead).toBe(45.0);

    sync.switchCamera(4.0, playhead);
    expect(video.currentTime).toBe(41.0); // 45 s session time under 4 s offset
    expect(sync.divergence(playhead)).toBeLessThan(0.1);

    video.advance(1.0);
    expect(playhead).toBe(46.0); // playback continues in session time
  });

  it("seeks do not echo playhead events back into the state", () => {
    const video = new FakeVideo();
    const emitted: number[] = [];
    const sync = new VideoSync(video, (t) => emitted.push(t));
    sync.seekPlayhead(10);
    expect(emitted).toEqual([]);
    video.advance(0.5);
    expect(emitted).toEqual([10.5]);
  });

  it("dispose detaches the video listener", () => {
    const video = new FakeVideo();
    const emitted: number[] = [];
    const sync = new VideoSync(video, (t) => emitted.push(t));
    sync.dispose();
    video.advance(1);
    expect(emitted).toEqual([]);
  });
});
