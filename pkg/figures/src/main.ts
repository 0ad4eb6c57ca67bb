import { parseArgs } from "util";
import { EmptyInput, GridMismatch, SchemaMismatch } from "./csv";
import { plotBloch } from "./bloch";
import { plotLocus } from "./locus";
import { plotTraces } from "./traces";
import { FigureKind, FigureSpec } from "./types";

const KINDS: Record<FigureKind, (spec: FigureSpec) => void> = {
  locus: plotLocus,
  bloch: plotBloch,
  traces: plotTraces,
};

const USAGE =
  "usage: figures --kind locus|bloch|traces --input data.csv [--input more.csv ...] " +
  "--output figure.svg [--title text] [--no-annotations]";

export function run(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        input: { type: "string", multiple: true },
        output: { type: "string" },
        kind: { type: "string" },
        title: { type: "string" },
        "no-annotations": { type: "boolean" },
      },
    }));
  } catch (err) {
    process.stderr.write(`figures: ${(err as Error).message}\n${USAGE}\n`);
    return 1;
  }

  const kind = values.kind as FigureKind | undefined;
  if (!kind || !(kind in KINDS)) {
    process.stderr.write(`figures: --kind must be one of ${Object.keys(KINDS).join("|")}\n${USAGE}\n`);
    return 1;
  }
  if (!values.input?.length || !values.output) {
    process.stderr.write(`figures: --input and --output are required\n${USAGE}\n`);
    return 1;
  }

  const spec: FigureSpec = {
    inputs: values.input,
    kind,
    output: values.output,
    title: values.title,
    annotate: values["no-annotations"] ? false : undefined,
  };

  try {
    KINDS[kind](spec);
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof EmptyInput || err instanceof GridMismatch) {
      process.stderr.write(`figures: ${err.message}\n`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`figures: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }
  return 0;
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
