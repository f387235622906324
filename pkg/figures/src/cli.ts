#!/usr/bin/env node
/** render --input <csv> --out <file> --format png|svg [--log-y] [--title T] [--y-label L]
 *
 * Exit codes: 0 ok, 2 usage error, 3 I/O error, 4 schema/data error.
 */

import { pathToFileURL } from "node:url";

import { DataError, SchemaError } from "./csv.js";
import { render } from "./render.js";

export const EXIT_OK = 0;
export const EXIT_USAGE = 2;
export const EXIT_IO = 3;
export const EXIT_DATA = 4;

const USAGE =
  "usage: spinmet-render render --input <csv> --out <file> --format png|svg [--log-y] [--title T] [--y-label L]";

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    console.error(USAGE);
    return EXIT_USAGE;
  }
  let input: string | undefined;
  let out: string | undefined;
  let format = "svg";
  let logY = false;
  let title: string | undefined;
  let yLabel: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new RangeError(`${arg} needs a value`);
      return argv[i];
    };
    try {
      switch (arg) {
        case "--input":
          input = next();
          break;
        case "--out":
          out = next();
          break;
        case "--format":
          format = next();
          break;
        case "--log-y":
          logY = true;
          break;
        case "--title":
          title = next();
          break;
        case "--y-label":
          yLabel = next();
          break;
        default:
          console.error(`unknown argument: ${arg}\n${USAGE}`);
          return EXIT_USAGE;
      }
    } catch (error) {
      console.error(`${(error as Error).message}\n${USAGE}`);
      return EXIT_USAGE;
    }
  }
  if (!input || !out || (format !== "png" && format !== "svg")) {
    console.error(USAGE);
    return EXIT_USAGE;
  }
  try {
    render({ inputCsv: input, output: out, format, title, yLabel, logY });
    return EXIT_OK;
  } catch (error) {
    if (error instanceof SchemaError || error instanceof DataError) {
      console.error(`${error.name}: ${error.message}`);
      return EXIT_DATA;
    }
    if ((error as NodeJS.ErrnoException).code !== undefined) {
      console.error(`I/O error: ${(error as Error).message}`);
      return EXIT_IO;
    }
    console.error(`error: ${(error as Error).message}`);
    return EXIT_DATA;
  }
}

const isDirectRun =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
