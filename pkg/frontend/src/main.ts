// Application wiring: session picker, modality/student toggles, zoomable
// lane view synchronized with the video player.

import { ApiClient, ApiError, LatestOnly } from "./api";
import { layoutHeight, layoutTimeline } from "./layout";
import { VideoSync } from "./player";
import { LABEL_GUTTER, renderOps, renderPlayhead } from "./render";
import * as vs from "./state";
import { LANE_KINDS, LaneKind, TimelineDoc, VideoMetaDoc } from "./types";

const api = new ApiClient("");
const latest = new LatestOnly();

let state = vs.initialState();
let students: string[] = [];
let videoMeta: VideoMetaDoc | null = null;
let currentDoc: TimelineDoc | null = null;
let sync: VideoSync | null = null;

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

function banner(message: string | null): void {
  const node = $("error-banner");
  node.textContent = message ?? "";
  node.style.display = message ? "block" : "none";
}

function svgWidth(): number {
  const host = $("timeline-host");
  return Math.max(host.clientWidth - LABEL_GUTTER - 16, 200);
}

function drawPlayhead(): void {
  const svg = $("lanes") as unknown as SVGSVGElement;
  const height = currentDoc ? layoutHeight(currentDoc) : 0;
  renderPlayhead(
    svg, state.playhead, state.viewport.from, state.viewport.to, svgWidth(), height,
  );
  $("playhead-readout").textContent = `${state.playhead.toFixed(2)} s`;
}

function drawTimeline(): void {
  const svg = $("lanes") as unknown as SVGSVGElement;
  if (!currentDoc || !vs.hasSelection(state)) {
    svg.replaceChildren();
    $("empty-state").style.display = "block";
    $("empty-state").textContent = !vs.hasSelection(state)
      ? "Nothing selected: pick at least one student and one modality."
      : "";
    return;
  }
  $("empty-state").style.display = "none";
  const width = svgWidth();
  const ops = layoutTimeline(
    currentDoc, state.viewport.from, state.viewport.to, width,
  );
  renderOps(svg, ops, width, layoutHeight(currentDoc));
  drawPlayhead();
}

async function refreshTimeline(): Promise<void> {
  if (!state.sessionId || !vs.hasSelection(state)) {
    currentDoc = null;
    drawTimeline();
    return;
  }
  const sessionId = state.sessionId;
  try {
    const doc = await latest.run("timeline", () =>
      api.timeline(sessionId, vs.timelineQuery(state)),
    );
    if (doc === null) return; // a newer view superseded this request
    currentDoc = doc;
    banner(null);
    drawTimeline();
  } catch (err) {
    banner(err instanceof ApiError ? `Server error: ${err.message}` : String(err));
  }
}

function setState(next: vs.ViewState, refetch: boolean): void {
  state = next;
  if (refetch) void refreshTimeline();
  else drawTimeline();
}

function renderToggles(): void {
  const studentBox = $("students");
  studentBox.replaceChildren();
  for (const student of students) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "checkbox";
    input.checked = state.selectedStudents.includes(student);
    input.addEventListener("change", () => {
      setState(vs.toggleStudent(state, student), true);
    });
    label.append(input, ` ${student}`);
    studentBox.appendChild(label);
  }
  const laneBox = $("lanes-toggle");
  laneBox.replaceChildren();
  for (const lane of LANE_KINDS) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "checkbox";
    input.checked = state.visibleLanes.includes(lane as LaneKind);
    input.addEventListener("change", () => {
      setState(vs.toggleLane(state, lane as LaneKind), true);
    });
    label.append(input, ` ${lane}`);
    laneBox.appendChild(label);
  }
}

function renderCameraPicker(): void {
  const box = $("cameras");
  box.replaceChildren();
  if (!videoMeta) return;
  for (const cam of videoMeta.cameras) {
    const button = document.createElement("button");
    button.textContent = cam.camera_id;
    button.className = cam.camera_id === state.activeCamera ? "camera active" : "camera";
    button.addEventListener("click", () => switchCamera(cam.camera_id));
    box.appendChild(button);
  }
}

function cameraOffset(cameraId: string | null): number {
  const cam = videoMeta?.cameras.find((c) => c.camera_id === cameraId);
  return cam ? cam.start_offset_seconds : 0;
}

function switchCamera(cameraId: string): void {
  if (!state.sessionId || !videoMeta) return;
  setState(vs.switchCamera(state, cameraId), false);
  const video = $("video") as HTMLVideoElement;
  video.src = api.videoUrl(state.sessionId, cameraId);
  sync?.switchCamera(cameraOffset(cameraId), state.playhead);
  renderCameraPicker();
}

async function openSession(sessionId: string): Promise<void> {
  try {
    const [studentList, meta] = await Promise.all([
      api.students(sessionId),
      api.videoMeta(sessionId),
    ]);
    students = studentList;
    videoMeta = meta;
    // duration comes from the unfiltered timeline document
    const doc = await api.timeline(sessionId, "lanes=" + LANE_KINDS.join(","));
    const camera = meta.cameras.length > 0 ? meta.cameras[0].camera_id : null;
    state = vs.loadSession(state, sessionId, doc.duration, studentList, camera);
    banner(null);
    renderToggles();
    renderCameraPicker();

    const video = $("video") as HTMLVideoElement;
    sync?.dispose();
    sync = new VideoSync(video, (playhead) => {
      state = vs.seekTo(state, playhead);
      drawPlayhead();
    });
    sync.setOffset(cameraOffset(camera));
    if (camera !== null) video.src = api.videoUrl(sessionId, camera);

    await refreshTimeline();
  } catch (err) {
    banner(err instanceof ApiError ? `Cannot load session: ${err.message}` : String(err));
  }
}

function bindControls(): void {
  $("zoom-in").addEventListener("click", () => {
    setState(vs.zoomBy(state, 0.5, state.playhead), true);
  });
  $("zoom-out").addEventListener("click", () => {
    setState(vs.zoomBy(state, 2.0, state.playhead), true);
  });
  $("zoom-full").addEventListener("click", () => {
    setState(vs.zoomOutFull(state), true);
  });
  $("pan-left").addEventListener("click", () => {
    const width = state.viewport.to - state.viewport.from;
    setState(vs.panBy(state, -width / 4), true);
  });
  $("pan-right").addEventListener("click", () => {
    const width = state.viewport.to - state.viewport.from;
    setState(vs.panBy(state, width / 4), true);
  });

  const svg = $("lanes");
  svg.addEventListener("click", (event) => {
    const rect = svg.getBoundingClientRect();
    const x = event.clientX - rect.left - LABEL_GUTTER;
    if (x < 0) return;
    const { from, to } = state.viewport;
    const t = from + (x / svgWidth()) * (to - from);
    state = vs.seekTo(state, t);
    sync?.seekPlayhead(state.playhead);
    drawPlayhead();
  });
}

async function boot(): Promise<void> {
  bindControls();
  try {
    const sessions = await api.sessions();
    const picker = $("session-picker") as HTMLSelectElement;
    picker.replaceChildren();
    for (const id of sessions) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      picker.appendChild(option);
    }
    picker.addEventListener("change", () => void openSession(picker.value));
    if (sessions.length > 0) await openSession(sessions[0]);
    else banner("No processed sessions in the store.");
  } catch (err) {
    banner(`Cannot reach the session server: ${String(err)}`);
  }
}

void boot();
