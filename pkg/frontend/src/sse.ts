// Job progress over server-sent events.  The server replays a job's full
// transition history to every new connection, so after a reconnect the
// already-seen prefix is skipped; subscribing never spawns a second job.

import type { JobSnapshot } from "./api.js";

export type EventSourceLike = {
  addEventListener(type: string, listener: (event: { data?: string }) => void): void;
  close(): void;
};

export type EventSourceFactory = (url: string) => EventSourceLike;

export type JobSubscription = {
  close(): void;
  seenCount(): number;
};

const TERMINAL = new Set(["done", "failed"]);

export function subscribeJob(
  jobId: string,
  onSnapshot: (snapshot: JobSnapshot) => void,
  makeSource: EventSourceFactory = (url) => new EventSource(url) as EventSourceLike,
  base = "",
): JobSubscription {
  let seen = 0; // snapshots delivered to the caller
  let received = 0; // events on the current connection, including replays
  let closed = false;

  const source = makeSource(`${base}/api/jobs/${jobId}/events`);

  // EventSource reconnects transparently and the server replays from the
  // beginning; "open" fires per connection, so the replay counter resets.
  source.addEventListener("open", () => {
    received = 0;
  });

  source.addEventListener("status", (event) => {
    if (closed || event.data === undefined) return;
    received += 1;
    if (received <= seen) return; // replayed history after a reconnect
    seen = received;
    const snapshot = JSON.parse(event.data) as JobSnapshot;
    onSnapshot(snapshot);
    if (TERMINAL.has(snapshot.status)) {
      closed = true;
      source.close();
    }
  });

  return {
    close() {
      closed = true;
      source.close();
    },
    seenCount: () => seen,
  };
}
