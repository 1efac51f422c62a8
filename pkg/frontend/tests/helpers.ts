import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Bundle, validateBundle } from "../src/types.js";

export const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export function loadBundle(name: string): Bundle {
  return validateBundle(JSON.parse(readFileSync(join(FIXTURES, name), "utf8")));
}

export function rawBundle(name: string): unknown {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf8"));
}
