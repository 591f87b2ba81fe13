/** Job polling with interval backoff (0.5 s doubling up to 5 s). */

import type { JobDocument } from "./api.js";

export interface PollOptions {
  initialMs?: number;
  maxMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const TERMINAL: ReadonlySet<string> = new Set(["succeeded", "failed", "partial"]);

export function isTerminal(state: string): boolean {
  return TERMINAL.has(state);
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/**
 * Poll until the job reaches a terminal state; onUpdate fires for every
 * observed document. At most one request is in flight at a time.
 */
export async function pollJob(
  getJob: (jobId: string) => Promise<JobDocument>,
  jobId: string,
  onUpdate: (doc: JobDocument) => void,
  options: PollOptions = {},
): Promise<JobDocument> {
  const initial = options.initialMs ?? 500;
  const max = options.maxMs ?? 5000;
  const sleep = options.sleep ?? defaultSleep;

  let interval = initial;
  for (;;) {
    const doc = await getJob(jobId);
    onUpdate(doc);
    if (isTerminal(doc.state)) {
      return doc;
    }
    await sleep(interval);
    interval = Math.min(interval * 2, max);
  }
}
