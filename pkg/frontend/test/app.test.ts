// @vitest-environment jsdom
// Boots the real app against a stubbed API serving the golden session.
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { beforeAll, describe, expect, it, vi } from "vitest";

import { TimelineDoc } from "../src/types";

const GOLDEN: TimelineDoc = JSON.parse(
  readFileSync(join(process.cwd(), "test", "fixtures", "timeline.json"), "utf-8"),
);

const VIDEO_META = {
  session: "golden",
  fps: 30,
  cameras: [
    { camera_id: "cam1", file: "cam1.mp4", start_offset_seconds: 0.0,
      url: "/sessions/golden/video/cam1" },
    { camera_id: "cam2", file: "cam2.mp4", start_offset_seconds: 2.0,
      url: "/sessions/golden/video/cam2" },
  ],
};

const fetchLog: string[] = [];

function filterDoc(students: string[] | null, kinds: string[] | null): TimelineDoc {
  return {
    ...GOLDEN,
    lanes: GOLDEN.lanes.filter(
      (lane) =>
        (kinds === null || kinds.includes(lane.lane_id)) &&
        (lane.student === null ||
          students === null ||
          students.includes(lane.student)),
    ),
  };
}

function jsonResponse(doc: unknown): Response {
  return new Response(JSON.stringify(doc), {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

function fakeFetch(input: RequestInfo | URL): Promise<Response> {
  const url = new URL(String(input), "http://localhost");
  fetchLog.push(url.pathname + url.search);
  if (url.pathname === "/sessions") return Promise.resolve(jsonResponse(["golden"]));
  if (url.pathname === "/sessions/golden/students") {
    return Promise.resolve(jsonResponse(["dapaw", "rose", "taylor"]));
  }
  if (url.pathname === "/sessions/golden/video-meta") {
    return Promise.resolve(jsonResponse(VIDEO_META));
  }
  if (url.pathname === "/sessions/golden/timeline") {
    const students = url.searchParams.get("students");
    const lanes = url.searchParams.get("lanes");
    return Promise.resolve(
      jsonResponse(
        filterDoc(students ? students.split(",") : null, lanes ? lanes.split(",") : null),
      ),
    );
  }
  return Promise.resolve(new Response('{"error":"nope"}', { status: 404 }));
}

function appShell(): string {
  return `
    <header>
      <select id="session-picker"></select>
      <div id="cameras"></div>
      <span id="playhead-readout"></span>
    </header>
    <div id="error-banner"></div>
    <video id="video"></video>
    <div id="students"></div>
    <div id="lanes-toggle"></div>
    <button id="zoom-in"></button><button id="zoom-out"></button>
    <button id="zoom-full"></button><button id="pan-left"></button>
    <button id="pan-right"></button>
    <div id="timeline-host"><div id="empty-state"></div><svg id="lanes"></svg></div>`;
}

async function settle(): Promise<void> {
  for (let i = 0; i < 20; i++) await Promise.resolve();
}

beforeAll(async () => {
  document.body.innerHTML = appShell();
  vi.stubGlobal("fetch", fakeFetch);
  await import("../src/main");
  await settle();
});

describe("app boot on the golden session", () => {
  it("renders all 13 lanes with every student and modality on", async () => {
    const titles = document.querySelectorAll("#lanes text.lane-title");
    expect(titles.length).toBe(13);
  });

  it("lists the three students and five modalities as toggles", () => {
    expect(document.querySelectorAll("#students input").length).toBe(3);
    expect(document.querySelectorAll("#lanes-toggle input").length).toBe(5);
  });

  it("shows no error banner", () => {
    expect((document.getElementById("error-banner") as HTMLElement).style.display).not.toBe("block");
  });

  it("hiding the affect modality re-queries and removes its lanes", async () => {
    const inputs = [...document.querySelectorAll("#lanes-toggle input")];
    (inputs[3] as HTMLInputElement).click(); // affect
    await settle();
    expect(document.querySelectorAll("#lanes text.lane-title").length).toBe(10);
    (inputs[3] as HTMLInputElement).click();
    await settle();
    expect(document.querySelectorAll("#lanes text.lane-title").length).toBe(13);
  });

  it("deselecting every student shows the empty-state message", async () => {
    const inputs = [...document.querySelectorAll("#students input")];
    for (const input of inputs) {
      (input as HTMLInputElement).click();
      await settle();
    }
    const empty = document.getElementById("empty-state") as HTMLElement;
    expect(empty.style.display).toBe("block");
    expect(empty.textContent).toContain("Nothing selected");
    for (const input of inputs) {
      (input as HTMLInputElement).click();
      await settle();
    }
  });

  it("zooming requests a proportionally finer resolution", async () => {
    fetchLog.length = 0;
    (document.getElementById("zoom-in") as HTMLButtonElement).click();
    await settle();
    const q = new URLSearchParams(fetchLog[0].split("?")[1]);
    expect(Number(q.get("resolution"))).toBeCloseTo(30 / 600, 9);
  });

  it("offers both cameras and marks the active one", () => {
    const buttons = document.querySelectorAll("#cameras button");
    expect(buttons.length).toBe(2);
    expect(buttons[0].className).toContain("active");
  });
});
