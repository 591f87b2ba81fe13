/**
 * The mirrored validators run the exact vector file the backend suite
 * runs, so the two components accept identical inputs.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import {
  isValidDateRange,
  normalizeDoi,
  parseDoiList,
  parseKeywords,
  validateIssn,
  ValidationError,
} from "../src/validators.js";

const vectorsPath = join(
  dirname(fileURLToPath(import.meta.url)), "..", "..", "tests", "data",
  "validation_vectors.json");

interface DoiVector { input: string; valid: boolean; normalized?: string }
interface DoiListVector { input: string; valid: boolean; dois?: string[]; bad_token?: string }
interface IssnVector { input: string; valid: boolean; canonical?: string; error?: string }
interface RangeVector { from: string; until: string; valid: boolean }

const vectors = JSON.parse(readFileSync(vectorsPath, "utf-8")) as {
  doi: DoiVector[];
  doi_list: DoiListVector[];
  issn: IssnVector[];
  daterange: RangeVector[];
};

describe("shared DOI vectors", () => {
  for (const vector of vectors.doi) {
    it(JSON.stringify(vector.input), () => {
      if (vector.valid) {
        expect(normalizeDoi(vector.input)).toBe(vector.normalized);
      } else {
        expect(() => normalizeDoi(vector.input)).toThrow(ValidationError);
      }
    });
  }
});

describe("shared DOI list vectors", () => {
  for (const vector of vectors.doi_list) {
    it(JSON.stringify(vector.input), () => {
      if (vector.valid) {
        expect(parseDoiList(vector.input)).toEqual(vector.dois);
      } else {
        try {
          parseDoiList(vector.input);
          expect.unreachable("expected a validation error");
        } catch (exc) {
          expect(exc).toBeInstanceOf(ValidationError);
          expect((exc as ValidationError).token).toBe(vector.bad_token);
        }
      }
    });
  }
});

describe("shared ISSN vectors", () => {
  for (const vector of vectors.issn) {
    it(JSON.stringify(vector.input), () => {
      if (vector.valid) {
        expect(validateIssn(vector.input)).toBe(vector.canonical);
      } else {
        expect(() => validateIssn(vector.input)).toThrow(ValidationError);
      }
    });
  }
});

describe("shared date range vectors", () => {
  for (const vector of vectors.daterange) {
    it(`${vector.from}..${vector.until}`, () => {
      expect(isValidDateRange(vector.from, vector.until)).toBe(vector.valid);
    });
  }
});

describe("keywords", () => {
  it("splits on commas and drops empties", () => {
    expect(parseKeywords("alpha, beta ,,")).toEqual(["alpha", "beta"]);
    expect(parseKeywords("")).toEqual([]);
  });
});
