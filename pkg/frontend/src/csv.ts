/**
 * Reader for the solver's CSV artifacts.
 *
 * Files start with optional `# key=value` comment lines, then a header row,
 * then comma-separated data rows. Empty cells are missing values.
 */

export class SchemaError extends Error {}

export interface CsvTable {
  /** Source label used in error messages (usually the file path). */
  source: string;
  comments: Record<string, string>;
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, source = "<csv>"): CsvTable {
  const comments: Record<string, string> = {};
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  let headerIndex = 0;
  for (const line of lines) {
    if (!line.startsWith("#")) break;
    headerIndex += 1;
    const body = line.slice(1).trim();
    const eq = body.indexOf("=");
    if (eq > 0) comments[body.slice(0, eq)] = body.slice(eq + 1);
  }
  const headerLine = lines[headerIndex];
  if (headerLine === undefined) {
    throw new SchemaError(`${source}: no header row found`);
  }
  const header = headerLine.split(",");
  const rows: string[][] = [];
  for (const line of lines.slice(headerIndex + 1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${source}: row has ${cells.length} cells, header has ${header.length}`,
      );
    }
    rows.push(cells);
  }
  return { source, comments, header, rows };
}

/** Index of a required column; raises naming the offending column. */
export function requireColumn(table: CsvTable, name: string): number {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new SchemaError(`${table.source}: missing required column "${name}"`);
  }
  return index;
}

export function numberAt(table: CsvTable, row: string[], index: number): number | null {
  const cell = row[index];
  if (cell === undefined || cell === "") return null;
  const value = Number(cell);
  if (Number.isNaN(value)) {
    throw new SchemaError(
      `${table.source}: cannot parse "${cell}" in column "${table.header[index]}"`,
    );
  }
  return value;
}
