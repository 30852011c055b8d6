// SVG rendering of layout ops. Kept dumb on purpose: the layout module owns
// all geometry, this file only materializes it.

import { DrawOp, LANE_HEIGHT, MARKER_RADIUS } from "./layout";

const SVG_NS = "http://www.w3.org/2000/svg";
export const LABEL_GUTTER = 170;

function el(name: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export function renderOps(
  svg: SVGSVGElement,
  ops: DrawOp[],
  width: number,
  height: number,
): void {
  svg.replaceChildren();
  svg.setAttribute("width", String(width + LABEL_GUTTER));
  svg.setAttribute("height", String(Math.max(height, LANE_HEIGHT)));
  for (const op of ops) {
    if (op.kind === "row") {
      const text = el("text", {
        x: "4",
        y: String(op.y + LANE_HEIGHT * 0.7),
        class: "lane-title",
      });
      text.textContent = op.title;
      svg.appendChild(text);
      svg.appendChild(
        el("line", {
          x1: String(LABEL_GUTTER),
          x2: String(LABEL_GUTTER + width),
          y1: String(op.y + LANE_HEIGHT + 2),
          y2: String(op.y + LANE_HEIGHT + 2),
          class: "lane-divider",
        }),
      );
    } else if (op.kind === "rect") {
      const rect = el("rect", {
        x: String(LABEL_GUTTER + op.x),
        y: String(op.y),
        width: String(op.width),
        height: String(op.height),
        fill: op.color,
        class: "segment",
      });
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = op.label ?? "(none)";
      rect.appendChild(title);
      svg.appendChild(rect);
    } else {
      const marker = el("circle", {
        cx: String(LABEL_GUTTER + op.x),
        cy: String(op.y),
        r: String(MARKER_RADIUS),
        class: "marker",
      });
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent =
        op.count > 1 ? `${op.count} events` : (op.label ?? "event");
      marker.appendChild(title);
      svg.appendChild(marker);
      if (op.count > 1) {
        const text = el("text", {
          x: String(LABEL_GUTTER + op.x + MARKER_RADIUS + 2),
          y: String(op.y + 4),
          class: "marker-count",
        });
        text.textContent = `×${op.count}`;
        svg.appendChild(text);
      }
    }
  }
}

export function renderPlayhead(
  svg: SVGSVGElement,
  playhead: number,
  from: number,
  to: number,
  width: number,
  height: number,
): void {
  const old = svg.querySelector(".playhead");
  if (old) old.remove();
  if (playhead < from || playhead > to || to <= from) return;
  const x = LABEL_GUTTER + ((playhead - from) / (to - from)) * width;
  svg.appendChild(
    el("line", {
      x1: String(x),
      x2: String(x),
      y1: "0",
      y2: String(height),
      class: "playhead",
    }),
  );
}
