// View state and its pure transitions. Rendering is a function of
// (ViewState, server responses); everything here is side-effect free so the
// interactions are unit-testable without a DOM.

import { LANE_KINDS, LaneKind } from "./types";

export const TARGET_BUCKETS = 600;
export const MIN_WINDOW_SECONDS = 1.0;

export interface Viewport {
  from: number;
  to: number;
}

export interface ViewState {
  sessionId: string | null;
  duration: number;
  selectedStudents: string[];
  visibleLanes: LaneKind[];
  viewport: Viewport;
  playhead: number;
  activeCamera: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    duration: 0,
    selectedStudents: [],
    visibleLanes: [...LANE_KINDS],
    viewport: { from: 0, to: 0 },
    playhead: 0,
    activeCamera: null,
  };
}

export function resolutionFor(viewport: Viewport, buckets: number = TARGET_BUCKETS): number {
  return (viewport.to - viewport.from) / buckets;
}

export function loadSession(
  state: ViewState,
  sessionId: string,
  duration: number,
  students: string[],
  defaultCamera: string | null,
): ViewState {
  return {
    ...state,
    sessionId,
    duration,
    selectedStudents: students,
    viewport: { from: 0, to: duration },
    playhead: 0,
    activeCamera: defaultCamera,
  };
}

function clampViewport(from: number, to: number, duration: number): Viewport {
  const lo = Math.max(0, Math.min(from, duration));
  const hi = Math.min(duration, Math.max(to, lo + MIN_WINDOW_SECONDS));
  return { from: Math.min(lo, Math.max(0, hi - MIN_WINDOW_SECONDS)), to: hi };
}

export function zoomTo(state: ViewState, from: number, to: number): ViewState {
  return { ...state, viewport: clampViewport(from, to, state.duration) };
}

/** Zoom by a factor around a pivot time (factor < 1 zooms in). */
export function zoomBy(state: ViewState, factor: number, pivot?: number): ViewState {
  const { from, to } = state.viewport;
  const center = pivot === undefined ? (from + to) / 2 : pivot;
  const left = (center - from) * factor;
  const right = (to - center) * factor;
  return zoomTo(state, center - left, center + right);
}

export function zoomOutFull(state: ViewState): ViewState {
  return zoomTo(state, 0, state.duration);
}

export function panBy(state: ViewState, deltaSeconds: number): ViewState {
  const { from, to } = state.viewport;
  const width = to - from;
  let lo = from + deltaSeconds;
  if (lo < 0) lo = 0;
  if (lo + width > state.duration) lo = Math.max(0, state.duration - width);
  return { ...state, viewport: { from: lo, to: lo + width } };
}

export function toggleStudent(state: ViewState, student: string): ViewState {
  const selected = state.selectedStudents.includes(student)
    ? state.selectedStudents.filter((s) => s !== student)
    : [...state.selectedStudents, student].sort();
  return { ...state, selectedStudents: selected };
}

export function toggleLane(state: ViewState, lane: LaneKind): ViewState {
  const visible = state.visibleLanes.includes(lane)
    ? state.visibleLanes.filter((l) => l !== lane)
    : LANE_KINDS.filter((l) => l === lane || state.visibleLanes.includes(l));
  return { ...state, visibleLanes: visible };
}

export function seekTo(state: ViewState, t: number): ViewState {
  return { ...state, playhead: Math.max(0, Math.min(t, state.duration)) };
}

export function switchCamera(state: ViewState, camera: string): ViewState {
  // playhead is session time, so switching cameras never moves it
  return { ...state, activeCamera: camera };
}

/** Query string for the timeline endpoint, derived from the view. */
export function timelineQuery(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.selectedStudents.length > 0) {
    params.set("students", state.selectedStudents.join(","));
  }
  params.set("lanes", state.visibleLanes.join(","));
  params.set("from", state.viewport.from.toFixed(6));
  params.set("to", state.viewport.to.toFixed(6));
  params.set("resolution", resolutionFor(state.viewport).toFixed(6));
  return params.toString();
}

export function hasSelection(state: ViewState): boolean {
  return state.selectedStudents.length > 0 && state.visibleLanes.length > 0;
}
