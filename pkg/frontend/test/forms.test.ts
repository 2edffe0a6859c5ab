import { describe, expect, it } from "vitest";

import { fieldsFor, validateValues } from "../src/forms.js";

const ENUMS = { POStatus: ["PENDING", "ACCEPTED", "REJECTED", "CANCELED", "CLOSED"] };

describe("fieldsFor", () => {
  it("maps parameter types onto input kinds", () => {
    const fields = fieldsFor(
      [
        { type: "uint", name: "quote" },
        { type: "bool", name: "ok" },
        { type: "POStatus", name: "decision" },
        { type: "bytes32", name: "sku" },
      ],
      ENUMS,
    );
    expect(fields.map((f) => f.kind)).toEqual(["number", "checkbox", "select", "text"]);
    expect(fields[2]?.options).toEqual(ENUMS.POStatus);
  });

  it("falls back to text for unknown type names", () => {
    expect(fieldsFor([{ type: "Mystery", name: "x" }])[0]?.kind).toBe("text");
  });
});

describe("validateValues", () => {
  const fields = fieldsFor(
    [
      { type: "uint", name: "quote" },
      { type: "bool", name: "ok" },
      { type: "POStatus", name: "decision" },
    ],
    ENUMS,
  );

  it("coerces valid input", () => {
    const result = validateValues(fields, { quote: "100", ok: true, decision: "ACCEPTED" });
    expect(result).toEqual({
      ok: true,
      values: { quote: "100", ok: true, decision: "ACCEPTED" },
    });
  });

  it("rejects non-numeric text in a uint field without sending anything", () => {
    const result = validateValues(fields, { quote: "ten", ok: false, decision: "ACCEPTED" });
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.errors[0]?.field).toBe("quote");
    }
  });

  it("rejects uints beyond 256 bits", () => {
    const huge = (2n ** 256n).toString();
    const result = validateValues(fields, { quote: huge, ok: false, decision: "ACCEPTED" });
    expect(result.ok).toBe(false);
  });

  it("rejects unknown enum members", () => {
    const result = validateValues(fields, { quote: "1", ok: true, decision: "MAYBE" });
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.errors[0]?.message).toContain("must be one of");
    }
  });

  it("rejects malformed hex for bytes fields", () => {
    const bytesFields = fieldsFor([{ type: "bytes32", name: "sku" }]);
    expect(validateValues(bytesFields, { sku: "0xZZ" }).ok).toBe(false);
    expect(validateValues(bytesFields, { sku: "0xab01" }).ok).toBe(true);
    expect(validateValues(bytesFields, { sku: "plain text" }).ok).toBe(true);
  });
});
