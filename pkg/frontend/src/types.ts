// Wire types for the session API. The UI renders these documents verbatim
// and never re-derives labels client-side.

export type LaneKind = "state" | "actions" | "system" | "affect" | "gaze";

export const LANE_KINDS: LaneKind[] = ["state", "actions", "system", "affect", "gaze"];

export interface SegmentDoc {
  start: number;
  end: number;
  label: string | null;
}

export interface MarkerDoc {
  t: number;
  label: string | null;
  count: number;
}

export interface LaneDoc {
  lane_id: LaneKind;
  student: string | null;
  segments?: SegmentDoc[];
  markers?: MarkerDoc[];
}

export interface TimelineDoc {
  session: string;
  duration: number;
  resolution: number;
  lanes: LaneDoc[];
}

export interface CameraDoc {
  camera_id: string;
  file: string;
  start_offset_seconds: number;
  url: string;
}

export interface VideoMetaDoc {
  session: string;
  fps: number;
  cameras: CameraDoc[];
}

export type MetricsDoc = Record<
  string,
  {
    first_transition_latency: number | null;
    successful_transitions: number;
    cycles_completed: number;
    time_share_per_molecule: Record<string, number>;
    mean_transition_interval: number | null;
  }
>;
