import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { DEBOUNCE_MS, DecodeScheduler } from "./scheduler.js";

function deferred<T>() {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

describe("DecodeScheduler", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("debounces rapid requests down to one call", async () => {
    const results: number[] = [];
    const sched = new DecodeScheduler<number>(
      (r) => results.push(r),
      () => {},
    );
    const task = vi.fn(async () => 42);
    for (let i = 0; i < 10; i++) sched.request(task);
    expect(task).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(task).toHaveBeenCalledTimes(1);
    expect(results).toEqual([42]);
  });

  it("waits the full debounce window after the last input", async () => {
    const task = vi.fn(async () => 1);
    const sched = new DecodeScheduler<number>(
      () => {},
      () => {},
    );
    sched.request(task);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS - 10);
    sched.request(task); // resets the timer
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS - 10);
    expect(task).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(10);
    expect(task).toHaveBeenCalledTimes(1);
  });

  it("drops stale responses: last write wins", async () => {
    const results: string[] = [];
    const sched = new DecodeScheduler<string>(
      (r) => results.push(r),
      () => {},
    );
    const slow = deferred<string>();
    const fast = deferred<string>();
    sched.requestNow(() => slow.promise);
    sched.requestNow(() => fast.promise);
    fast.resolve("new");
    await vi.runAllTimersAsync();
    slow.resolve("old"); // resolves after the newer request already won
    await vi.runAllTimersAsync();
    expect(results).toEqual(["new"]);
  });

  it("delivers out-of-order completions only once, newest only", async () => {
    const results: string[] = [];
    const sched = new DecodeScheduler<string>(
      (r) => results.push(r),
      () => {},
    );
    const a = deferred<string>();
    const b = deferred<string>();
    sched.requestNow(() => a.promise);
    sched.requestNow(() => b.promise);
    b.resolve("b");
    a.resolve("a");
    await vi.runAllTimersAsync();
    expect(results).toEqual(["b"]);
  });

  it("reports errors only for the newest request", async () => {
    const errors: unknown[] = [];
    const sched = new DecodeScheduler<string>(
      () => {},
      (e) => errors.push(e),
    );
    const stale = deferred<string>();
    const fresh = deferred<string>();
    sched.requestNow(() => stale.promise);
    sched.requestNow(() => fresh.promise);
    stale.reject(new Error("stale failure"));
    await vi.runAllTimersAsync();
    expect(errors).toHaveLength(0);
    fresh.reject(new Error("fresh failure"));
    await vi.runAllTimersAsync();
    expect(errors).toHaveLength(1);
  });

  it("requestNow cancels a pending debounced request", async () => {
    const calls: string[] = [];
    const sched = new DecodeScheduler<string>(
      () => {},
      () => {},
    );
    sched.request(async () => {
      calls.push("debounced");
      return "x";
    });
    sched.requestNow(async () => {
      calls.push("immediate");
      return "y";
    });
    await vi.runAllTimersAsync();
    expect(calls).toEqual(["immediate"]);
  });
});
