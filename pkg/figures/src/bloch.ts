/**
 * Bloch-vector trajectory of the single-electron sector on a
 * 3D-projected sphere (orthographic view).
 */
import * as fs from "fs";
import { col, readTable, requireColumns } from "./csv";
import { FigureSpec } from "./types";
import { el, fix, polyline, svgDoc, text } from "./svg";

const W = 560;
const H = 560;
const R = 200; // sphere radius in px

const AZ = (25 * Math.PI) / 180;
const EL = (18 * Math.PI) / 180;

function project(x: number, y: number, z: number): [number, number] {
  const u = -x * Math.sin(AZ) + y * Math.cos(AZ);
  const w = z * Math.cos(EL) - (x * Math.cos(AZ) + y * Math.sin(AZ)) * Math.sin(EL);
  return [W / 2 + R * u, H / 2 - R * w];
}

function ring(point: (theta: number) => [number, number, number]): Array<[number, number]> {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i <= 72; i++) {
    const th = (2 * Math.PI * i) / 72;
    pts.push(project(...point(th)));
  }
  return pts;
}

function azimuthSpread(t: number[], rx: number[], ry: number[]): number {
  const az: number[] = [];
  let prev = 0;
  for (let i = 0; i < t.length; i++) {
    if (t[i] < 1.0 || t[i] > 3.0) continue;
    let a = Math.atan2(ry[i], rx[i]);
    if (az.length > 0) {
      while (a - prev > Math.PI) a -= 2 * Math.PI;
      while (a - prev < -Math.PI) a += 2 * Math.PI;
    }
    az.push(a);
    prev = a;
  }
  const mean = az.reduce((s, a) => s + a, 0) / az.length;
  return Math.sqrt(az.reduce((s, a) => s + (a - mean) ** 2, 0) / az.length);
}

export function plotBloch(spec: FigureSpec): void {
  const table = readTable(spec.inputs[0]);
  requireColumns(table, ["t", "rx", "ry", "rz"]);
  const t = col(table, "t");
  const rx = col(table, "rx");
  const ry = col(table, "ry");
  const rz = col(table, "rz");

  const parts: string[] = [];
  const thin = { stroke: "#bbb", "stroke-width": 1 };

  // silhouette plus the three principal rings
  parts.push(el("circle", { cx: W / 2, cy: H / 2, r: R, fill: "none", stroke: "#888", "stroke-width": 1.4 }));
  parts.push(polyline(ring((th) => [Math.cos(th), Math.sin(th), 0]), thin));
  parts.push(polyline(ring((th) => [Math.cos(th), 0, Math.sin(th)]), thin));
  parts.push(polyline(ring((th) => [0, Math.cos(th), Math.sin(th)]), thin));

  // axes
  for (const [vec, label] of [
    [[1.25, 0, 0], "x"],
    [[0, 1.25, 0], "y"],
    [[0, 0, 1.25], "z"],
  ] as Array<[[number, number, number], string]>) {
    const [ax, ay] = project(...vec);
    const [cx, cy] = project(0, 0, 0);
    parts.push(el("line", { x1: fix(cx), y1: fix(cy), x2: fix(ax), y2: fix(ay), stroke: "#666", "stroke-width": 1 }));
    parts.push(text(ax + 5, ay + 4, label, { "font-size": 14, "font-style": "italic" }));
  }

  // trajectory
  const traj = t.map((_, i) => project(rx[i], ry[i], rz[i]));
  parts.push(polyline(traj, { id: "trajectory", stroke: "#1f77b4", "stroke-width": 2 }));

  // start and end marks
  const [x0, y0] = traj[0];
  const [x1, y1] = traj[traj.length - 1];
  parts.push(
    el("g", { id: "origin-marker", stroke: "#2ca02c", "stroke-width": 1.6 },
      el("line", { x1: fix(x0 - 5), y1: fix(y0), x2: fix(x0 + 5), y2: fix(y0) }) +
      el("line", { x1: fix(x0), y1: fix(y0 - 5), x2: fix(x0), y2: fix(y0 + 5) })),
  );
  parts.push(text(x0 + 8, y0 + 14, "t=0", { "font-size": 11, fill: "#2ca02c" }));
  parts.push(el("circle", { id: "endpoint-marker", cx: fix(x1), cy: fix(y1), r: 5, fill: "#d62728" }));
  parts.push(text(x1 + 9, y1 + 4, `t=${t[t.length - 1]}`, { "font-size": 11, fill: "#d62728" }));

  if (spec.annotate !== false) {
    const spread = azimuthSpread(t, rx, ry);
    const rEnd = Math.hypot(rx[rx.length - 1], ry[ry.length - 1], rz[rz.length - 1]);
    parts.push(text(16, H - 34, `azimuthal spread over t∈[1,3]: ${spread.toFixed(4)} rad`,
      { class: "azimuth-spread", "font-size": 12, fill: "#333" }));
    parts.push(text(16, H - 16, `|r| at t=${t[t.length - 1]}: ${rEnd.toFixed(3)}`,
      { class: "endpoint-length", "font-size": 12, fill: "#333" }));
  }

  if (spec.title) {
    parts.push(text(W / 2, 24, spec.title, { "font-size": 15, "text-anchor": "middle" }));
  }

  fs.writeFileSync(spec.output, svgDoc(W, H, parts.join("\n")));
}
