import { describe, expect, it } from "vitest";

import type { EngineApi, InstanceState, PanelNotification, Receipt } from "../src/api.js";
import { PanelController, renderState } from "../src/viewmodel.js";

const SAMPLE_STATE: InstanceState = {
  "process-identifier": "o2c-hash",
  href: "/processes/o2c-address",
  workitems: [
    {
      elementId: "Request_Quote_Id",
      name: "Request Quote",
      importParameters: [{ type: "uint", name: "quote" }],
      instances: [{ exportParameters: [], href: "/worklists/wl_address/workitems/1" }],
    },
    {
      elementId: "Submit_Quote_Id",
      name: "Submit Quote",
      importParameters: [],
      instances: [
        {
          exportParameters: [{ type: "uint", name: "quote", value: "100" }],
          href: "/worklists/wl_address/workitems/3",
        },
      ],
    },
  ],
  services: [],
};

describe("renderState", () => {
  it("renders the sample body as two cards", () => {
    const page = renderState(SAMPLE_STATE);
    expect(page.schemaError).toBeUndefined();
    expect(page.cards).toHaveLength(2);
    const [request, submit] = page.cards;
    expect(request?.name).toBe("Request Quote");
    expect(request?.fields).toEqual([
      { name: "quote", label: "quote", paramType: "uint", kind: "number" },
    ]);
    expect(submit?.fields).toEqual([]);
    expect(submit?.exports).toEqual([{ type: "uint", name: "quote", value: "100" }]);
  });

  it("shows a placeholder when nothing is pending", () => {
    const page = renderState({ ...SAMPLE_STATE, workitems: [], services: [] });
    expect(page.cards).toHaveLength(0);
    expect(page.placeholder).toBe("no pending tasks");
  });

  it("flags malformed bodies instead of crashing", () => {
    const page = renderState({ nonsense: true });
    expect(page.schemaError).toBeTruthy();
    expect(page.cards).toHaveLength(0);
    expect(renderState(null).schemaError).toBeTruthy();
    expect(renderState({ ...SAMPLE_STATE, workitems: [{ broken: 1 }] }).schemaError)
      .toBeTruthy();
  });
});

class FakeApi {
  baseUrl = "";
  stateBody: InstanceState = SAMPLE_STATE;
  stateCalls = 0;
  receipts: Receipt[] = [];
  puts: { href: string; values: Record<string, unknown> }[] = [];

  async enumsFor(): Promise<Record<string, string[]>> {
    return {};
  }

  async state(): Promise<InstanceState> {
    this.stateCalls += 1;
    return this.stateBody;
  }

  async checkin(href: string, values: Record<string, unknown>): Promise<Receipt> {
    this.puts.push({ href, values });
    return this.receipts.shift()
      ?? { status: "accepted", reason: null, gasUsed: 1, blockNumber: 1 };
  }
}

function controllerWith(api: FakeApi): PanelController {
  return new PanelController(api as unknown as EngineApi);
}

describe("PanelController", () => {
  it("submits validated values and refreshes on acceptance", async () => {
    const api = new FakeApi();
    const controller = controllerWith(api);
    await controller.selectInstance("o2c-address");
    const card = controller.page.cards[0]!;
    const receipt = await controller.submit(card, { quote: "42" });
    expect(receipt?.status).toBe("accepted");
    expect(api.puts).toEqual([
      { href: "/worklists/wl_address/workitems/1", values: { quote: "42" } },
    ]);
    expect(controller.banners[0]?.tone).toBe("success");
    expect(api.stateCalls).toBe(2); // select + post-acceptance refresh
  });

  it("keeps state and shows the reason on rejection", async () => {
    const api = new FakeApi();
    api.receipts.push({
      status: "rejected",
      reason: "AlreadyCompleted: workitem 1",
      gasUsed: 0,
      blockNumber: 2,
    });
    const controller = controllerWith(api);
    await controller.selectInstance("o2c-address");
    const card = controller.page.cards[0]!;
    const receipt = await controller.submit(card, { quote: "42" });
    expect(receipt?.status).toBe("rejected");
    expect(controller.banners[0]?.tone).toBe("error");
    expect(controller.banners[0]?.text).toContain("already completed");
    expect(api.stateCalls).toBe(1); // no refresh on rejection
  });

  it("blocks invalid input client-side", async () => {
    const api = new FakeApi();
    const controller = controllerWith(api);
    await controller.selectInstance("o2c-address");
    const card = controller.page.cards[0]!;
    const receipt = await controller.submit(card, { quote: "not a number" });
    expect(receipt).toBeNull();
    expect(api.puts).toHaveLength(0);
    expect(controller.banners[0]?.tone).toBe("error");
  });

  it("refreshes once per relevant notification batch and dedups", async () => {
    const api = new FakeApi();
    const controller = controllerWith(api);
    await controller.selectInstance("o2c-address");
    const baseline = api.stateCalls;
    const batch: PanelNotification[] = [
      { kind: "WorkitemRequested", block: 5, logIndex: 0, seq: 0, worklist: "wl_address" },
      { kind: "WorkitemCompleted", block: 5, logIndex: 1, seq: 1, worklist: "wl_address" },
    ];
    await controller.onNotifications(batch);
    expect(api.stateCalls).toBe(baseline + 1);
    await controller.onNotifications(batch); // duplicate delivery
    expect(api.stateCalls).toBe(baseline + 1);
  });

  it("ignores notifications for other instances", async () => {
    const api = new FakeApi();
    const controller = controllerWith(api);
    await controller.selectInstance("o2c-address");
    const baseline = api.stateCalls;
    await controller.onNotifications([
      { kind: "WorkitemRequested", block: 6, logIndex: 0, seq: 2, worklist: "other_wl" },
      { kind: "InstanceCreated", block: 6, logIndex: 1, seq: 3, address: "x", parent: "y" },
    ]);
    expect(api.stateCalls).toBe(baseline);
  });

  it("follows children created under the selected instance", async () => {
    const api = new FakeApi();
    const controller = controllerWith(api);
    await controller.selectInstance("o2c-address");
    const baseline = api.stateCalls;
    await controller.onNotifications([
      { kind: "InstanceCreated", block: 7, logIndex: 0, seq: 4,
        address: "child1", parent: "o2c-address" },
    ]);
    expect(api.stateCalls).toBe(baseline + 1);
    // grandchildren are recognized through the recorded child
    await controller.onNotifications([
      { kind: "InstanceCreated", block: 8, logIndex: 0, seq: 5,
        address: "grand", parent: "child1" },
    ]);
    expect(api.stateCalls).toBe(baseline + 2);
  });
});
