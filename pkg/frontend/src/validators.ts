/**
 * Client-side validators, mirroring the service's rules exactly.
 *
 * Both sides run the same vector file (tests/data/validation_vectors.json
 * in the backend repo), so anything accepted here is accepted by the
 * service and vice versa.
 */

const DOI_PREFIXES = [
  "https://doi.org/",
  "http://doi.org/",
  "https://dx.doi.org/",
  "doi:",
];

const ISSN_SHAPE = /^\d{4}-?\d{3}[\dXx]$/;
const ISO_DATE = /^(\d{4})-(\d{2})-(\d{2})$/;

export class ValidationError extends Error {
  constructor(message: string, public field: string = "", public token: string = "") {
    super(message);
  }
}

/** Lowercased, prefix-stripped DOI, or a thrown ValidationError. */
export function normalizeDoi(raw: string): string {
  let candidate = raw.trim();
  if (!candidate) {
    throw new ValidationError(`malformed DOI: ${JSON.stringify(raw)}`, "doi", raw);
  }
  const lowered = candidate.toLowerCase();
  for (const prefix of DOI_PREFIXES) {
    if (lowered.startsWith(prefix)) {
      candidate = candidate.slice(prefix.length);
      break;
    }
  }
  candidate = candidate.trim().toLowerCase();
  if (!candidate.startsWith("10.") || !candidate.includes("/")) {
    throw new ValidationError(`malformed DOI: ${JSON.stringify(raw)}`, "doi", raw);
  }
  return candidate;
}

/**
 * Comma/newline-separated DOIs -> normalized, deduplicated list.
 * A malformed token throws with the token and its 1-based position.
 */
export function parseDoiList(text: string): string[] {
  const tokens = text.split(/[,\r\n]+/).map((t) => t.trim()).filter((t) => t.length);
  const seen = new Set<string>();
  const result: string[] = [];
  tokens.forEach((token, index) => {
    let doi: string;
    try {
      doi = normalizeDoi(token);
    } catch {
      throw new ValidationError(
        `malformed DOI (token ${index + 1}): ${JSON.stringify(token)}`, "seeds", token);
    }
    if (!seen.has(doi)) {
      seen.add(doi);
      result.push(doi);
    }
  });
  return result;
}

/** Canonical hyphenated uppercase ISSN, or a thrown ValidationError. */
export function validateIssn(raw: string): string {
  const candidate = raw.trim();
  if (!ISSN_SHAPE.test(candidate)) {
    throw new ValidationError(`malformed ISSN: ${JSON.stringify(raw)}`, "issn", raw);
  }
  const digits = candidate.replace("-", "").toUpperCase();
  let total = 0;
  for (let i = 0; i < 7; i++) {
    total += Number(digits[i]) * (8 - i);
  }
  total += digits[7] === "X" ? 10 : Number(digits[7]);
  if (total % 11 !== 0) {
    throw new ValidationError(
      `ISSN check digit does not verify: ${JSON.stringify(raw)}`, "issn", raw);
  }
  return `${digits.slice(0, 4)}-${digits.slice(4)}`;
}

/** True iff the string is a real, zero-padded proleptic Gregorian date. */
export function isValidDate(value: string): boolean {
  const match = ISO_DATE.exec(value);
  if (!match) {
    return false;
  }
  const [year, month, day] = [Number(match[1]), Number(match[2]), Number(match[3])];
  if (month < 1 || month > 12 || day < 1) {
    return false;
  }
  const daysInMonth = new Date(Date.UTC(year, month, 0)).getUTCDate();
  return day <= daysInMonth;
}

/** Both endpoints are valid dates and from <= until (inclusive range). */
export function isValidDateRange(from: string, until: string): boolean {
  return isValidDate(from) && isValidDate(until) && from <= until;
}

/** Comma-separated keywords -> trimmed non-empty terms. */
export function parseKeywords(text: string): string[] {
  return text.split(",").map((t) => t.trim()).filter((t) => t.length);
}
