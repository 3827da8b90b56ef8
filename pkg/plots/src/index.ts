export { readTable, toNumber, type Table } from "./csv.js";
export { CsvError, PlotError, UsageError } from "./errors.js";
export {
  extractCells,
  extractSeries,
  extractWallCount,
  type ExtractedSeries,
} from "./extract.js";
export { sampleColor } from "./colormap.js";
export {
  FIGURE_KINDS,
  INPUT_COUNTS,
  render,
  renderToString,
  type FigureKind,
  type FigureSpec,
} from "./render.js";
export { runCli } from "./cli.js";
