// Polling loop with failure backoff. One request in flight at a time; the
// router stops the active poller on navigation.

export const POLL_PERIOD_MS = 2000;
const MAX_BACKOFF_MS = 30000;

export interface Poller {
  stop(): void;
}

export function startPolling(
  tick: () => Promise<void>,
  onError: (error: unknown) => void,
  onRecover: () => void,
  periodMs: number = POLL_PERIOD_MS,
  schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
): Poller {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | null = null;
  let delay = periodMs;
  let failing = false;

  const run = async () => {
    if (stopped) return;
    try {
      await tick();
      if (failing) {
        failing = false;
        onRecover();
      }
      delay = periodMs;
    } catch (error) {
      failing = true;
      onError(error);
      delay = Math.min(delay * 2, MAX_BACKOFF_MS);
    }
    if (!stopped) timer = schedule(run, delay);
  };

  void run();
  return {
    stop() {
      stopped = true;
      if (timer !== null) clearTimeout(timer);
    },
  };
}
