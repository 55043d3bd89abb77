import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionStore, startPolling } from "../src/state.js";
import { FakeService, objective } from "./fake_service.js";

function makeStore(service: FakeService): SessionStore {
  return new SessionStore(new ApiClient("", service.fetch), service.sessionId);
}

describe("SessionStore.poll", () => {
  it("reports a change on first poll and none when the front is stable", async () => {
    const service = new FakeService();
    service.addEntry({ rid: "rs-1", text: "skip when one of\n  (binary == 'true')\n", features: ["binary"], objectives: objective() });
    const store = makeStore(service);
    expect(await store.poll("complexity", "saved_record_count")).toBe(true);
    expect(await store.poll("complexity", "saved_record_count")).toBe(false);
    service.generation += 1;
    expect(await store.poll("complexity", "saved_record_count")).toBe(true);
  });

  it("notifies listeners on change", async () => {
    const service = new FakeService();
    const store = makeStore(service);
    let called = 0;
    store.onChange(() => {
      called += 1;
    });
    await store.poll("complexity", "saved_record_count");
    expect(called).toBe(1);
  });
});

describe("optimistic feedback", () => {
  it("is pending immediately and acknowledged after the server ack", async () => {
    const service = new FakeService();
    const store = makeStore(service);
    const promise = store.submitFeedback({
      command: "BLACKLIST_FEATURE",
      feature: "author",
    });
    expect(store.transcript[0].status).toBe("pending");
    const entry = await promise;
    expect(entry.status).toBe("acknowledged");
    expect(entry.archiveDelta).toBe(0);
    expect(entry.command.command_id).toMatch(/^ui-s-1-/);
  });

  it("keeps failed commands in the transcript with the error", async () => {
    const service = new FakeService();
    service.failNextFeedback = true;
    const store = makeStore(service);
    const entry = await store.submitFeedback({
      command: "EXCLUDE_TICKET",
      ticket: "T-1",
    });
    expect(entry.status).toBe("failed");
    expect(entry.error).toContain("rejected by engine");
  });
});

describe("startPolling", () => {
  it("polls until stopped and routes errors to the handler", async () => {
    const service = new FakeService();
    const store = makeStore(service);
    const scheduled: Array<() => void> = [];
    const errors: unknown[] = [];
    const handle = startPolling(
      store,
      () => ({ x: "complexity", y: "saved_record_count" }),
      1000,
      (err) => errors.push(err),
      (fn) => {
        scheduled.push(fn);
        return scheduled.length;
      },
      () => undefined,
    );
    // run the initial tick
    await scheduled[0]();
    expect(store.pareto).not.toBeNull();
    expect(scheduled.length).toBe(2);
    handle.stop();
    await scheduled[1]();
    expect(scheduled.length).toBe(2); // no re-arm after stop
    expect(errors).toHaveLength(0);
  });
});
