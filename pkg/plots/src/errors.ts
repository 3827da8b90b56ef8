/** Base class for every error this package raises on purpose. */
export class PlotError extends Error {}

/** A CSV input is unreadable, malformed, empty, or missing columns. */
export class CsvError extends PlotError {}

/** The request itself is malformed (unknown kind, wrong input count). */
export class UsageError extends PlotError {}
