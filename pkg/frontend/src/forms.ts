/** Check-in forms generated from import-parameter schemas.
 *
 * uint -> number field, bool -> checkbox, enum -> select over the declared
 * members, bytes32/address -> text. Validation runs client-side before any
 * request is sent.
 */

import type { ImportParameter } from "./api.js";

export type FieldKind = "number" | "checkbox" | "select" | "text";

export interface FormField {
  name: string;
  label: string;
  paramType: string;
  kind: FieldKind;
  options?: string[];
}

export function fieldsFor(
  params: ImportParameter[],
  enums: Record<string, string[]> = {},
): FormField[] {
  return params.map((p) => {
    const base = { name: p.name, label: p.name, paramType: p.type };
    if (p.type === "uint") return { ...base, kind: "number" as const };
    if (p.type === "bool") return { ...base, kind: "checkbox" as const };
    const members = enums[p.type];
    if (members !== undefined) {
      return { ...base, kind: "select" as const, options: [...members] };
    }
    return { ...base, kind: "text" as const };
  });
}

export interface ValidationError {
  field: string;
  message: string;
}

export type Validated =
  | { ok: true; values: Record<string, unknown> }
  | { ok: false; errors: ValidationError[] };

const UINT_MAX = 2n ** 256n - 1n;

/** Coerce raw form values to the wire representation, rejecting anything the
 * contract would refuse so no doomed request leaves the client. */
export function validateValues(
  fields: FormField[],
  raw: Record<string, unknown>,
): Validated {
  const errors: ValidationError[] = [];
  const values: Record<string, unknown> = {};
  for (const field of fields) {
    const value = raw[field.name];
    if (field.kind === "number") {
      const text = String(value ?? "").trim();
      if (!/^\d+$/.test(text)) {
        errors.push({ field: field.name, message: `${field.label} must be a non-negative integer` });
        continue;
      }
      if (BigInt(text) > UINT_MAX) {
        errors.push({ field: field.name, message: `${field.label} exceeds 256 bits` });
        continue;
      }
      values[field.name] = text;
    } else if (field.kind === "checkbox") {
      values[field.name] = Boolean(value);
    } else if (field.kind === "select") {
      const text = String(value ?? "");
      if (!field.options?.includes(text)) {
        errors.push({ field: field.name, message: `${field.label} must be one of ${field.options?.join(", ")}` });
        continue;
      }
      values[field.name] = text;
    } else {
      const text = String(value ?? "");
      if (text.startsWith("0x") && !/^0x[0-9a-fA-F]*$/.test(text)) {
        errors.push({ field: field.name, message: `${field.label} is not valid hex` });
        continue;
      }
      values[field.name] = text;
    }
  }
  return errors.length > 0 ? { ok: false, errors } : { ok: true, values };
}
