// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { renderInto } from "../src/dom.js";
import { renderState, type TaskCard } from "../src/viewmodel.js";

const STATE = {
  "process-identifier": "h",
  href: "/processes/x",
  workitems: [
    {
      elementId: "Validate_Id",
      name: "Validate PO",
      importParameters: [{ type: "POStatus", name: "decision" }],
      instances: [
        {
          exportParameters: [{ type: "uint", name: "price", value: "100" }],
          href: "/worklists/wl/workitems/0",
        },
      ],
    },
  ],
  services: [],
};

const ENUMS = { POStatus: ["PENDING", "ACCEPTED", "REJECTED"] };

describe("renderInto", () => {
  it("renders cards with export values and generated inputs", () => {
    const page = renderState(STATE, ENUMS);
    const container = document.createElement("main");
    const submitted: Record<string, unknown>[] = [];
    renderInto(container, page, [], (_card: TaskCard, values) => {
      submitted.push(values);
    });
    const cards = container.querySelectorAll(".card");
    expect(cards).toHaveLength(1);
    expect(container.querySelector("h3")?.textContent).toBe("Validate PO");
    expect(container.querySelector("dd")?.textContent).toBe("100");
    const select = container.querySelector("select");
    expect(select).not.toBeNull();
    expect([...select!.options].map((o) => o.value)).toEqual(ENUMS.POStatus);

    select!.value = "ACCEPTED";
    container.querySelector("form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    expect(submitted).toEqual([{ decision: "ACCEPTED" }]);
  });

  it("renders the schema-mismatch banner on malformed bodies", () => {
    const page = renderState({ bad: true });
    const container = document.createElement("main");
    renderInto(container, page, [], () => undefined);
    expect(container.querySelector(".schema-mismatch")).not.toBeNull();
    expect(container.querySelectorAll(".card")).toHaveLength(0);
  });

  it("renders the empty placeholder", () => {
    const page = renderState({ ...STATE, workitems: [] });
    const container = document.createElement("main");
    renderInto(container, page, [], () => undefined);
    expect(container.querySelector(".placeholder")?.textContent).toBe("no pending tasks");
  });

  it("every actionable element maps to an href from the state body", () => {
    const page = renderState(STATE, ENUMS);
    const container = document.createElement("main");
    renderInto(container, page, [], () => undefined);
    const hrefs = [...container.querySelectorAll(".card")]
      .map((el) => (el as HTMLElement).dataset.href);
    expect(hrefs).toEqual(["/worklists/wl/workitems/0"]);
  });
});
