// Pure lane layout: a timeline document plus a viewport becomes a list of
// positioned draw operations. Rendering applies these verbatim, so two
// byte-identical server responses always produce identical layouts.

import { segmentColor } from "./theme";
import { LaneDoc, TimelineDoc } from "./types";

export const LANE_HEIGHT = 26;
export const LANE_GAP = 6;
export const MARKER_RADIUS = 5;

export interface RectOp {
  kind: "rect";
  x: number;
  width: number;
  y: number;
  height: number;
  color: string;
  label: string | null;
  lane: string;
  student: string | null;
}

export interface MarkerOp {
  kind: "marker";
  x: number;
  y: number;
  label: string | null;
  count: number;
  lane: string;
  student: string | null;
}

export interface RowOp {
  kind: "row";
  y: number;
  title: string;
}

export type DrawOp = RectOp | MarkerOp | RowOp;

export function laneTitle(lane: LaneDoc): string {
  return lane.student === null ? lane.lane_id : `${lane.student} · ${lane.lane_id}`;
}

export function layoutTimeline(
  doc: TimelineDoc,
  from: number,
  to: number,
  width: number,
): DrawOp[] {
  const ops: DrawOp[] = [];
  const span = to - from;
  if (span <= 0 || width <= 0) return ops;
  const scale = width / span;
  const x = (t: number) => (t - from) * scale;

  doc.lanes.forEach((lane, row) => {
    const y = row * (LANE_HEIGHT + LANE_GAP);
    ops.push({ kind: "row", y, title: laneTitle(lane) });
    for (const seg of lane.segments ?? []) {
      if (seg.end <= from || seg.start >= to) continue;
      const x0 = Math.max(x(seg.start), 0);
      const x1 = Math.min(x(seg.end), width);
      ops.push({
        kind: "rect",
        x: x0,
        width: Math.max(x1 - x0, 0.5),
        y,
        height: LANE_HEIGHT,
        color: segmentColor(lane.lane_id, seg.label),
        label: seg.label,
        lane: lane.lane_id,
        student: lane.student,
      });
    }
    for (const marker of lane.markers ?? []) {
      if (marker.t < from || marker.t > to) continue;
      ops.push({
        kind: "marker",
        x: x(marker.t),
        y: y + LANE_HEIGHT / 2,
        label: marker.label,
        count: marker.count,
        lane: lane.lane_id,
        student: lane.student,
      });
    }
  });
  return ops;
}

export function layoutHeight(doc: TimelineDoc): number {
  return doc.lanes.length * (LANE_HEIGHT + LANE_GAP);
}

export function rowCount(doc: TimelineDoc): number {
  return doc.lanes.length;
}
