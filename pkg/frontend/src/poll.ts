/** Job polling: 1s base interval with exponential backoff, capped. */

import type { JobRecord } from "./types.js";

export interface PollOptions {
  baseMs?: number;
  factor?: number;
  maxMs?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (record: JobRecord) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/** Resolves with the terminal record (done or failed); never retries writes. */
export async function pollJob(
  getJob: (id: string) => Promise<JobRecord>,
  jobId: string,
  options: PollOptions = {},
): Promise<JobRecord> {
  const base = options.baseMs ?? 1000;
  const factor = options.factor ?? 1.5;
  const max = options.maxMs ?? 10000;
  const sleep = options.sleep ?? defaultSleep;
  let delay = base;
  for (;;) {
    const record = await getJob(jobId);
    options.onUpdate?.(record);
    if (record.state === "done" || record.state === "failed") return record;
    await sleep(delay);
    delay = Math.min(max, delay * factor);
  }
}
