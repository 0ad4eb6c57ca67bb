import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";
import { EmptyInput, SchemaMismatch, col, configNumber, readTable, requireColumns, requireSameGrid } from "../src/csv";

const DATA = path.join(__dirname, "..", "data");

function tmpFile(content: string): string {
  const p = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "figcsv-")), "t.csv");
  fs.writeFileSync(p, content);
  return p;
}

describe("readTable", () => {
  it("parses a shipped flux sweep", () => {
    const t = readTable(path.join(DATA, "flux_sweep.csv"));
    expect(t.columns).toEqual([
      "phi", "re_rho21", "im_rho21", "abs_rho21", "phase",
      "fidelity_to_psi_phi", "closed_form_re", "closed_form_im",
    ]);
    expect(t.rows).toHaveLength(33);
    expect(t.metadata["command"]).toBe("flux-sweep");
    expect(configNumber(t, "bias")).toBe(6);
    expect(configNumber(t, "gamma_l")).toBeCloseTo(0.95, 12);
  });

  it("parses nan cells to NaN", () => {
    const t = readTable(path.join(DATA, "bloch_trace.csv"));
    const phase = col(t, "phase");
    expect(Number.isNaN(phase[0])).toBe(true); // undefined at the empty start
    expect(Number.isFinite(phase[1])).toBe(true);
  });

  it("rejects an empty file", () => {
    expect(() => readTable(tmpFile(""))).toThrow(EmptyInput);
  });

  it("rejects a header-only file", () => {
    expect(() => readTable(tmpFile("# fluxdot 0.1.0\na,b,c\n"))).toThrow(EmptyInput);
  });
});

describe("schema checks", () => {
  it("names the first missing column and the file", () => {
    const t = readTable(path.join(DATA, "flux_sweep.csv"));
    expect(() => requireColumns(t, ["phi", "rx"])).toThrow(/missing column "rx"/);
    expect(() => requireColumns(t, ["rx"])).toThrow(/flux_sweep\.csv/);
  });

  it("accepts matching grids and names a mismatched file", () => {
    const a = readTable(path.join(DATA, "trace_dg00_phi050.csv"));
    const b = readTable(path.join(DATA, "trace_dg09_phi050.csv"));
    expect(() => requireSameGrid([a, b], "t")).not.toThrow();

    const lines = fs.readFileSync(path.join(DATA, "trace_dg09_phi050.csv"), "utf-8")
      .trimEnd().split("\n");
    const cut = tmpFile(lines.slice(0, -3).join("\n") + "\n");
    const c = readTable(cut);
    expect(() => requireSameGrid([a, c], "t")).toThrow(new RegExp(cut.replace(/[.*+?^${}()|[\]\\]/g, "\\$&")));
  });
});
