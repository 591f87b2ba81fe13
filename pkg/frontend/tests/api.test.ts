import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api.js";
import { FakeService, row } from "./fakeservice.js";

function makeClient() {
  const service = new FakeService();
  service.addJournal("Annals of Testing", "0000-0000", [row("10.1/a"), row("10.1/b")]);
  return { service, client: new ServiceClient("", service.fetch) };
}

describe("ServiceClient", () => {
  it("submits a valid handsearch and gets a job id", async () => {
    const { client } = makeClient();
    const outcome = await client.submitHandsearch({
      journals: ["0000-0000"], from: "2020-01-01", until: "2020-12-31",
    });
    expect(outcome).toMatchObject({ ok: true });
  });

  it("maps 400 responses to field errors", async () => {
    const { client } = makeClient();
    const outcome = await client.submitHandsearch({
      journals: ["0000-0000"], from: "2021-01-01", until: "2020-12-31",
    });
    expect(outcome.ok).toBe(false);
    if (!outcome.ok) {
      expect(outcome.errors[0].field).toBe("range");
    }
  });

  it("polls job documents", async () => {
    const { client } = makeClient();
    const outcome = await client.submitHandsearch({
      journals: ["0000-0000"], from: "2020-01-01", until: "2020-12-31",
    });
    if (!outcome.ok) throw new Error("submit failed");
    const first = await client.getJob(outcome.jobId);
    expect(first.state).toBe("queued");
    await client.getJob(outcome.jobId);
    await client.getJob(outcome.jobId);
    const terminal = await client.getJob(outcome.jobId);
    expect(terminal.state).toBe("succeeded");
    expect(terminal.results).toHaveLength(2);
    expect(terminal.report).toMatchObject({ total_unique: 2 });
  });

  it("raises ServiceError with status on unknown jobs", async () => {
    const { client } = makeClient();
    await expect(client.getJob("nope")).rejects.toMatchObject({ status: 404 });
    await expect(client.getJob("nope")).rejects.toBeInstanceOf(ServiceError);
  });

  it("searches journals", async () => {
    const { client } = makeClient();
    const candidates = await client.journalSearch("testing");
    expect(candidates).toEqual([{ title: "Annals of Testing", issns: ["0000-0000"] }]);
  });

  it("builds export and report urls", () => {
    const { client } = makeClient();
    expect(client.exportUrl("j1", "doi")).toBe("/api/jobs/j1/export?format=doi");
    expect(client.exportUrl("j1", "ris")).toBe("/api/jobs/j1/export?format=ris");
    expect(client.reportUrl("j1")).toBe("/api/jobs/j1/report");
  });
});
