// Presentation only: lane snapshots map proportionally onto the canvas,
// exactly as reported by the engine. Pure geometry is split out so tests
// can check the mapping without a real canvas.

import { LaneSnapshot, SegmentPlanView } from "./types.js";

export const CONTAINER_WIDTH = 1920; // engine container; x values arrive in this space

export interface TextBox {
  lane: number;
  x: number;
  y: number;
  width: number;
  height: number;
  text: string;
}

export function laneBoxes(
  snapshot: LaneSnapshot,
  canvasWidth: number,
  canvasHeight: number,
): TextBox[] {
  const laneCount = Math.max(snapshot.lanes.length, 1);
  const rowHeight = canvasHeight / laneCount;
  const scale = canvasWidth / CONTAINER_WIDTH;
  return snapshot.active.map((item) => ({
    lane: item.lane,
    x: item.x * scale,
    y: item.lane * rowHeight,
    width: item.width * scale,
    height: rowHeight,
    text: item.text,
  }));
}

export interface CanvasContextLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: unknown;
  fillStyle: unknown;
  font: string;
}

export function drawLanes(
  ctx: CanvasContextLike,
  snapshot: LaneSnapshot | null,
  canvasWidth: number,
  canvasHeight: number,
): void {
  ctx.clearRect(0, 0, canvasWidth, canvasHeight);
  if (!snapshot) return;
  const laneCount = Math.max(snapshot.lanes.length, 1);
  const rowHeight = canvasHeight / laneCount;
  ctx.strokeStyle = "#2a2f3a";
  for (let k = 1; k < laneCount; k++) {
    ctx.strokeRect(0, k * rowHeight, canvasWidth, 0);
  }
  ctx.fillStyle = "#e8e8f0";
  ctx.font = `${Math.floor(rowHeight * 0.5)}px sans-serif`;
  for (const box of laneBoxes(snapshot, canvasWidth, canvasHeight)) {
    ctx.fillText(box.text, box.x, box.y + box.height * 0.68);
  }
}

export interface TimelineCell {
  segment: string;
  state: string;
  cssClass: string;
}

const STATE_CLASS: Record<string, string> = {
  Pending: "seg-pending",
  Inflight: "seg-inflight",
  Spoken: "seg-spoken",
  Skipped: "seg-skipped",
};

export function timelineCells(segments: SegmentPlanView[]): TimelineCell[] {
  return segments.map((plan) => ({
    segment: plan.segment,
    state: plan.state,
    cssClass: STATE_CLASS[plan.state] ?? "seg-pending",
  }));
}
