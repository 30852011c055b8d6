// Single source of truth for lane colors.

export const AFFECT_COLORS: Record<string, string> = {
  Delight: "#f2b01e",
  Engagement: "#3f8f4a",
  Confusion: "#8d6cc0",
  Frustration: "#d4452c",
  Boredom: "#7a8699",
  Q1PleasantActive: "#e8d44d",
  Q2UnpleasantActive: "#c2651f",
  Q3UnpleasantSubdued: "#5b6676",
  Q4PleasantSerene: "#6fb7a8",
  NotFound: "#d9d9d9",
  NoDominantEmotion: "#b3b8bf",
};

export const MOLECULE_COLORS: Record<string, string> = {
  oxygen: "#4f9dd1",
  water: "#2a6fdb",
  sugar: "#e09f3e",
  carbon_dioxide: "#666d75",
};

export const SYSTEM_COLORS: Record<string, string> = {
  day: "#ffe9a8",
  night: "#3b4668",
};

const GAZE_PALETTE = [
  "#4f9dd1", "#e09f3e", "#8d6cc0", "#3f8f4a", "#d4452c", "#6fb7a8", "#c2651f",
];

const MISSING = "#eceff3";
const FALLBACK = "#9aa3ad";

export function segmentColor(lane: string, label: string | null): string {
  if (label === null) return MISSING;
  if (lane === "affect") return AFFECT_COLORS[label] ?? FALLBACK;
  if (lane === "state") return MOLECULE_COLORS[label] ?? FALLBACK;
  if (lane === "system") return SYSTEM_COLORS[label] ?? FALLBACK;
  if (lane === "gaze") {
    let h = 0;
    for (let i = 0; i < label.length; i++) h = (h * 31 + label.charCodeAt(i)) >>> 0;
    return GAZE_PALETTE[h % GAZE_PALETTE.length];
  }
  return FALLBACK;
}
