/**
 * Complex-plane locus of the steady coherence across the flux grid,
 * with the closed-form companion columns overlaid as a curve.
 */
import * as fs from "fs";
import { col, readTable, requireColumns } from "./csv";
import { FigureSpec } from "./types";
import { el, fix, fmtHalfPi, linscale, polyline, svgDoc, text } from "./svg";

const W = 560;
const H = 560;
const MARGIN = 56;

export function plotLocus(spec: FigureSpec): void {
  const table = readTable(spec.inputs[0]);
  requireColumns(table, [
    "phi",
    "re_rho21",
    "im_rho21",
    "closed_form_re",
    "closed_form_im",
  ]);
  const phi = col(table, "phi");
  const re = col(table, "re_rho21");
  const im = col(table, "im_rho21");
  const cfRe = col(table, "closed_form_re");
  const cfIm = col(table, "closed_form_im");

  // square, symmetric data window with equal aspect
  const extent = Math.max(
    0.55,
    ...re.map(Math.abs),
    ...im.map(Math.abs),
    ...cfRe.filter(Number.isFinite).map(Math.abs),
    ...cfIm.filter(Number.isFinite).map(Math.abs),
  ) * 1.12;
  const sx = linscale(-extent, extent, MARGIN, W - MARGIN);
  const sy = linscale(-extent, extent, H - MARGIN, MARGIN);

  const parts: string[] = [];

  // centered axes
  parts.push(
    el("g", { id: "axes", "data-cx": fix(sx(0)), "data-cy": fix(sy(0)), stroke: "#999", "stroke-width": 1 },
      el("line", { x1: fix(sx(-extent)), y1: fix(sy(0)), x2: fix(sx(extent)), y2: fix(sy(0)) }) +
      el("line", { x1: fix(sx(0)), y1: fix(sy(-extent)), x2: fix(sx(0)), y2: fix(sy(extent)) })),
  );
  for (const v of [-0.5, 0.5]) {
    parts.push(el("line", { x1: fix(sx(v)), y1: fix(sy(0) - 4), x2: fix(sx(v)), y2: fix(sy(0) + 4), stroke: "#999" }));
    parts.push(el("line", { x1: fix(sx(0) - 4), y1: fix(sy(v)), x2: fix(sx(0) + 4), y2: fix(sy(v)), stroke: "#999" }));
    parts.push(text(sx(v) - 10, sy(0) + 18, v.toFixed(1), { "font-size": 11, fill: "#666" }));
    parts.push(text(sx(0) + 7, sy(v) + 4, v.toFixed(1), { "font-size": 11, fill: "#666" }));
  }
  parts.push(text(sx(extent) - 4, sy(0) - 8, "Re ρ21", { "font-size": 13, "text-anchor": "end" }));
  parts.push(text(sx(0) + 8, sy(extent) + 12, "Im ρ21", { "font-size": 13 }));

  // closed-form overlay, skipping undefined cells
  const curve: Array<[number, number]> = [];
  for (let i = 0; i < phi.length; i++) {
    if (Number.isFinite(cfRe[i]) && Number.isFinite(cfIm[i])) {
      curve.push([sx(cfRe[i]), sy(cfIm[i])]);
    }
  }
  if (curve.length > 1) {
    parts.push(polyline(curve, { id: "closed-form", stroke: "#d62728", "stroke-width": 1.5, "stroke-dasharray": "5 3" }));
  }

  // scatter with the flux value carried on each marker
  for (let i = 0; i < phi.length; i++) {
    parts.push(
      el("circle", {
        class: "locus-pt",
        "data-phi": phi[i],
        cx: fix(sx(re[i])),
        cy: fix(sy(im[i])),
        r: 3.5,
        fill: "#1f77b4",
        stroke: "white",
        "stroke-width": 0.8,
      }),
    );
    if (spec.annotate !== false) {
      const label = fmtHalfPi(phi[i]);
      if (label !== undefined) {
        const dx = re[i] >= 0 ? 7 : -7;
        parts.push(
          text(sx(re[i]) + dx, sy(im[i]) - 6, `φ=${label}`, {
            "font-size": 10,
            fill: "#333",
            "text-anchor": re[i] >= 0 ? "start" : "end",
          }),
        );
      }
    }
  }

  if (spec.title) {
    parts.push(text(W / 2, 24, spec.title, { "font-size": 15, "text-anchor": "middle" }));
  }

  fs.writeFileSync(spec.output, svgDoc(W, H, parts.join("\n")));
}
