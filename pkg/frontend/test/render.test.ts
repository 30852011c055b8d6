// @vitest-environment jsdom
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { layoutHeight, layoutTimeline } from "../src/layout";
import { renderOps, renderPlayhead } from "../src/render";
import { TimelineDoc } from "../src/types";

const GOLDEN: TimelineDoc = JSON.parse(
  readFileSync(join(process.cwd(), "test", "fixtures", "timeline.json"), "utf-8"),
);

function freshSvg(): SVGSVGElement {
  return document.createElementNS(
    "http://www.w3.org/2000/svg",
    "svg",
  ) as SVGSVGElement;
}

function renderGolden(svg: SVGSVGElement, from: number, to: number): void {
  const ops = layoutTimeline(GOLDEN, from, to, 1000);
  renderOps(svg, ops, 1000, layoutHeight(GOLDEN));
}

describe("svg rendering", () => {
  it("renders one title per lane for the golden session", () => {
    const svg = freshSvg();
    renderGolden(svg, 0, 60);
    const titles = svg.querySelectorAll("text.lane-title");
    expect(titles.length).toBe(13);
    expect(titles[0].textContent).toBe("system");
  });

  it("zoom-in then zoom-out reproduces the identical DOM", () => {
    const svg = freshSvg();
    renderGolden(svg, 0, 60);
    const before = svg.innerHTML;
    renderGolden(svg, 20, 30); // zoom in
    expect(svg.innerHTML).not.toBe(before);
    renderGolden(svg, 0, 60); // zoom back out
    expect(svg.innerHTML).toBe(before);
  });

  it("draws the playhead inside the viewport only", () => {
    const svg = freshSvg();
    renderGolden(svg, 0, 60);
    renderPlayhead(svg, 30, 0, 60, 1000, 400);
    expect(svg.querySelectorAll("line.playhead").length).toBe(1);
    renderPlayhead(svg, 90, 0, 60, 1000, 400);
    expect(svg.querySelectorAll("line.playhead").length).toBe(0);
  });

  it("marker clusters show their event counts", () => {
    const svg = freshSvg();
    const doc: TimelineDoc = {
      session: "s",
      duration: 10,
      resolution: 5,
      lanes: [
        {
          lane_id: "actions",
          student: "x",
          markers: [
            { t: 1.0, label: "avatar:water", count: 1 },
            { t: 6.0, label: null, count: 4 },
          ],
        },
      ],
    };
    renderOps(svg, layoutTimeline(doc, 0, 10, 500), 500, 32);
    expect(svg.querySelectorAll("circle.marker").length).toBe(2);
    const counts = [...svg.querySelectorAll("text.marker-count")];
    expect(counts.map((node) => node.textContent)).toEqual(["×4"]);
  });
});
