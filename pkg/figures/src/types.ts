export type FigureKind = "locus" | "bloch" | "traces";

export interface FigureSpec {
  /** CSV input path(s) produced by the fluxdot CLI. */
  inputs: string[];
  kind: FigureKind;
  /** Destination for the rendered SVG. */
  output: string;
  /** Optional figure title. */
  title?: string;
  /** Draw flux annotations (locus) / extra labels. Default true. */
  annotate?: boolean;
}
