/**
 * Time traces of the coherence at several flux values, arranged as a
 * Re/Im x coupling-asymmetry panel grid. Panel tags (phi, asymmetry)
 * come from each file's metadata block; plotted numbers come only
 * from the data columns.
 */
import * as fs from "fs";
import { SchemaMismatch, Table, col, configNumber, readTable, requireColumns, requireSameGrid } from "./csv";
import { FigureSpec } from "./types";
import { PALETTE, el, fix, fmtHalfPi, linscale, polyline, svgDoc, text } from "./svg";

const PANEL_W = 300;
const PANEL_H = 176;
const GAP_X = 34;
const GAP_Y = 46;
const M_LEFT = 64;
const M_TOP = 56;

interface Tagged {
  table: Table;
  phi: number;
  dg: number;
}

function tag(table: Table): Tagged {
  const phi = configNumber(table, "phi");
  const gl = configNumber(table, "gamma_l");
  const gr = configNumber(table, "gamma_r");
  if (phi === undefined || gl === undefined || gr === undefined) {
    throw new SchemaMismatch(
      `${table.path}: metadata must carry config.phi, config.gamma_l, config.gamma_r`,
    );
  }
  return { table, phi, dg: Number((gl - gr).toFixed(6)) };
}

function phiLabel(phi: number): string {
  return `φ=${fmtHalfPi(phi) ?? fmtQuarterPi(phi) ?? phi.toFixed(3)}`;
}

function fmtQuarterPi(phi: number): string | undefined {
  const k = Math.round(phi / (Math.PI / 4));
  if (Math.abs(phi - (k * Math.PI) / 4) > 1e-9 || k % 2 === 0) return undefined;
  const sign = k < 0 ? "−" : "";
  const n = Math.abs(k);
  return `${sign}${n === 1 ? "" : n}π/4`;
}

function panel(
  x: number,
  y: number,
  tables: Tagged[],
  column: "re_rho21" | "im_rho21",
  yMax: number,
  colorOf: (phi: number) => string,
  attrs: Record<string, string>,
  heading: string,
): string {
  const t = col(tables[0].table, "t");
  const sx = linscale(t[0], t[t.length - 1], x, x + PANEL_W);
  const sy = linscale(-yMax, yMax, y + PANEL_H, y);
  const parts: string[] = [];

  parts.push(el("rect", { x, y, width: PANEL_W, height: PANEL_H, fill: "none", stroke: "#888" }));
  parts.push(el("line", { x1: x, y1: fix(sy(0)), x2: x + PANEL_W, y2: fix(sy(0)), stroke: "#ddd" }));
  for (let tick = Math.ceil(t[0]); tick <= t[t.length - 1]; tick += 1) {
    parts.push(el("line", { x1: fix(sx(tick)), y1: y + PANEL_H, x2: fix(sx(tick)), y2: y + PANEL_H - 4, stroke: "#888" }));
    parts.push(text(sx(tick), y + PANEL_H + 14, String(tick), { "font-size": 10, "text-anchor": "middle", fill: "#555" }));
  }
  for (const v of [-yMax, 0, yMax]) {
    parts.push(text(x - 6, sy(v) + 3, v.toFixed(2), { "font-size": 10, "text-anchor": "end", fill: "#555" }));
  }
  parts.push(text(x + PANEL_W / 2, y - 6, heading, { "font-size": 12, "text-anchor": "middle" }));

  tables.forEach((tt) => {
    const ys = col(tt.table, column);
    const pts: Array<[number, number]> = t.map((ti, i) => [sx(ti), sy(ys[i])]);
    parts.push(polyline(pts, { class: "trace", stroke: colorOf(tt.phi), "stroke-width": 1.6 }));
  });

  return el("g", { class: "panel", ...attrs }, parts.join("\n"));
}

export function plotTraces(spec: FigureSpec): void {
  const tables = spec.inputs.map(readTable);
  for (const tbl of tables) {
    requireColumns(tbl, ["t", "re_rho21", "im_rho21"]);
  }
  requireSameGrid(tables, "t");

  const parts: string[] = [];
  let width: number;
  let height: number;

  if (tables.length === 1) {
    // single-panel fallback: both components of the one trace
    const tagged = tag(tables[0]);
    width = M_LEFT + PANEL_W + GAP_X;
    height = M_TOP + PANEL_H + GAP_Y;
    const t = col(tables[0], "t");
    const re = col(tables[0], "re_rho21");
    const im = col(tables[0], "im_rho21");
    const yMax = 1.15 * Math.max(...re.map(Math.abs), ...im.map(Math.abs), 1e-6);
    const sx = linscale(t[0], t[t.length - 1], M_LEFT, M_LEFT + PANEL_W);
    const sy = linscale(-yMax, yMax, M_TOP + PANEL_H, M_TOP);
    const body: string[] = [];
    body.push(el("rect", { x: M_LEFT, y: M_TOP, width: PANEL_W, height: PANEL_H, fill: "none", stroke: "#888" }));
    body.push(el("line", { x1: M_LEFT, y1: fix(sy(0)), x2: M_LEFT + PANEL_W, y2: fix(sy(0)), stroke: "#ddd" }));
    body.push(polyline(t.map((ti, i) => [sx(ti), sy(re[i])]), { class: "trace", stroke: PALETTE[0], "stroke-width": 1.6 }));
    body.push(polyline(t.map((ti, i) => [sx(ti), sy(im[i])]), { class: "trace", stroke: PALETTE[1], "stroke-width": 1.6, "stroke-dasharray": "5 3" }));
    body.push(text(M_LEFT + 8, M_TOP + 16, `Re ρ21 —, Im ρ21 ┄  (${phiLabel(tagged.phi)}, δΓ=${tagged.dg})`, { "font-size": 11 }));
    parts.push(el("g", { class: "panel", "data-row": "both", "data-dg": tagged.dg }, body.join("\n")));
  } else {
    const tagged = tables.map(tag);
    const groups = [...new Set(tagged.map((t) => t.dg))].sort((a, b) => b - a);
    const phis = [...new Set(tagged.map((t) => t.phi))].sort((a, b) => a - b);
    const colorOf = (phi: number) => PALETTE[phis.indexOf(phi) % PALETTE.length];

    width = M_LEFT + groups.length * (PANEL_W + GAP_X);
    height = M_TOP + 2 * (PANEL_H + GAP_Y);

    (["re_rho21", "im_rho21"] as const).forEach((column, rowIdx) => {
      const yMax =
        1.15 *
        Math.max(...tagged.map((tt) => Math.max(...col(tt.table, column).map(Math.abs))), 1e-6);
      groups.forEach((dg, colIdx) => {
        const members = tagged.filter((tt) => tt.dg === dg);
        const x = M_LEFT + colIdx * (PANEL_W + GAP_X);
        const y = M_TOP + rowIdx * (PANEL_H + GAP_Y);
        const comp = column === "re_rho21" ? "Re ρ21" : "Im ρ21";
        parts.push(
          panel(x, y, members, column, yMax, colorOf,
            { "data-row": column === "re_rho21" ? "re" : "im", "data-dg": String(dg) },
            `${comp},  δΓ = ${dg}`),
        );
      });
    });

    // shared flux legend
    phis.forEach((phi, i) => {
      const lx = M_LEFT + i * 110;
      parts.push(el("line", { x1: lx, y1: 30, x2: lx + 26, y2: 30, stroke: colorOf(phi), "stroke-width": 2 }));
      parts.push(text(lx + 32, 34, phiLabel(phi), { class: "legend-entry", "font-size": 12 }));
    });
  }

  if (spec.title) {
    parts.push(text(width / 2, 16, spec.title, { "font-size": 15, "text-anchor": "middle" }));
  }

  fs.writeFileSync(spec.output, svgDoc(width, height, parts.join("\n")));
}
