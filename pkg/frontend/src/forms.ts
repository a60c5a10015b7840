/**
 * Client-side form models for the consortium workflow.
 *
 * Each model mirrors one transaction payload: raw input strings, per-field
 * pristine/dirty state, and validation errors.  Client validation is a
 * strict subset of what the service enforces — it catches type and range
 * mistakes before a request is sent, and the service stays authoritative.
 * Rational fields are submitted as their raw strings so the service parses
 * them exactly.
 */

export type FieldType = "int" | "rational" | "string" | "choice";

export interface FieldSpec {
  name: string;
  label: string;
  type: FieldType;
  section?: string;
  required?: boolean;
  choices?: string[];
  /** inclusive numeric bounds, checked only when the syntax is valid */
  min?: number;
  max?: number;
  /** strict lower bound (e.g. price must be > 0) */
  greaterThan?: number;
}

export interface FormModel {
  name: string;
  fields: FieldSpec[];
  values: Record<string, string>;
  dirty: Record<string, boolean>;
  errors: Record<string, string>;
  formError: string;
}

const INT_SYNTAX = /^-?\d+$/;
const RATIONAL_SYNTAX = /^-?\d+(\.\d+)?$|^-?\d+\/\d*[1-9]\d*$/;

export function createForm(name: string, fields: FieldSpec[], initial: Record<string, string> = {}): FormModel {
  const values: Record<string, string> = {};
  const dirty: Record<string, boolean> = {};
  for (const field of fields) {
    values[field.name] = initial[field.name] ?? "";
    dirty[field.name] = false;
  }
  return { name, fields, values, dirty, errors: {}, formError: "" };
}

function rationalValue(text: string): number {
  const slash = text.indexOf("/");
  if (slash >= 0) {
    return Number(text.slice(0, slash)) / Number(text.slice(slash + 1));
  }
  return Number(text);
}

export function validateField(spec: FieldSpec, raw: string): string {
  const text = raw.trim();
  if (text === "") {
    return spec.required ? `${spec.label} is required` : "";
  }
  if (spec.type === "int" && !INT_SYNTAX.test(text)) {
    return `${spec.label} must be an integer`;
  }
  if (spec.type === "rational" && !RATIONAL_SYNTAX.test(text)) {
    return `${spec.label} must be a number`;
  }
  if (spec.type === "choice" && spec.choices && !spec.choices.includes(text)) {
    return `${spec.label} must be one of ${spec.choices.join(", ")}`;
  }
  if (spec.type === "int" || spec.type === "rational") {
    const value = spec.type === "int" ? Number(text) : rationalValue(text);
    if (spec.min !== undefined && value < spec.min) {
      return `${spec.label} must be at least ${spec.min}`;
    }
    if (spec.max !== undefined && value > spec.max) {
      return `${spec.label} must be at most ${spec.max}`;
    }
    if (spec.greaterThan !== undefined && value <= spec.greaterThan) {
      return `${spec.label} must be greater than ${spec.greaterThan}`;
    }
  }
  return "";
}

export function setField(form: FormModel, name: string, value: string): void {
  const spec = form.fields.find((field) => field.name === name);
  if (!spec) {
    throw new Error(`unknown field ${name} on form ${form.name}`);
  }
  form.values[name] = value;
  form.dirty[name] = true;
  const problem = validateField(spec, value);
  if (problem) {
    form.errors[name] = problem;
  } else {
    delete form.errors[name];
  }
}

export function isPristine(form: FormModel): boolean {
  return Object.values(form.dirty).every((flag) => !flag);
}

/** Validate every field; true means the form may be submitted. */
export function validateForm(form: FormModel): boolean {
  form.formError = "";
  for (const spec of form.fields) {
    const problem = validateField(spec, form.values[spec.name]);
    if (problem) {
      form.errors[spec.name] = problem;
    } else {
      delete form.errors[spec.name];
    }
  }
  return Object.keys(form.errors).length === 0;
}

/**
 * Request body for the form: ints become numbers, rationals stay strings
 * (parsed exactly by the service), empty optional fields are omitted.
 */
export function formBody(form: FormModel): Record<string, unknown> {
  const body: Record<string, unknown> = {};
  for (const spec of form.fields) {
    const text = form.values[spec.name].trim();
    if (text === "") {
      continue;
    }
    if (spec.type === "int") {
      body[spec.name] = Number(text);
    } else {
      body[spec.name] = text;
    }
  }
  return body;
}

/**
 * Map a service error back onto the form: a path like "$.p" or
 * "$.payload.g" lands on the field with that terminal name; anything
 * unmatched becomes a form-level error.
 */
export function applyApiError(
  form: FormModel,
  error: { detail: string; path?: string; violations?: { path: string; message: string }[] },
): void {
  const entries = error.violations?.length
    ? error.violations.map((violation) => ({ path: violation.path, message: violation.message }))
    : [{ path: error.path ?? "", message: error.detail }];
  let unmatched: string[] = [];
  for (const entry of entries) {
    const terminal = entry.path.split(".").pop() ?? "";
    const field = form.fields.find((spec) => spec.name === terminal);
    if (field) {
      form.errors[field.name] = entry.message;
    } else {
      unmatched.push(entry.message);
    }
  }
  if (unmatched.length) {
    form.formError = unmatched.join("; ");
  }
}

// --- form definitions, one per transaction payload ------------------------

export function requestForm(): FormModel {
  return createForm("request", [
    { name: "requestId", label: "Request id", type: "int", required: true, min: 1 },
    { name: "originator", label: "Originator", type: "string", required: true },
    { name: "p", label: "Unit price", type: "rational", required: true, greaterThan: 0 },
    { name: "d", label: "Demand", type: "int", required: true, min: 0 },
    { name: "levs", label: "Max levels", type: "int", required: true, min: 1 },
    { name: "ress", label: "Max resource index", type: "int", required: true, min: 1 },
    { name: "sups", label: "Max supplier index", type: "int", required: true, min: 1 },
  ]);
}

export function optionsForm(): FormModel {
  return createForm(
    "options",
    [
      { name: "scheme", label: "Sharing scheme", type: "choice", required: true, choices: ["RS", "PS"] },
      {
        name: "costPolicy",
        label: "Cost policy",
        type: "choice",
        required: true,
        choices: ["PLATFORM_MEMBER", "ORIGINATOR_PAYS", "SHARED"],
      },
      { name: "platformQuota", label: "Platform quota", type: "rational", min: 0, max: 1 },
    ],
    { scheme: "PS", costPolicy: "SHARED" },
  );
}

export function resourceForm(): FormModel {
  return createForm("resource", [
    { name: "i", label: "Level", type: "int", required: true, min: 1 },
    { name: "k", label: "Resource index", type: "int", required: true, min: 0 },
    { name: "resourceName", label: "Resource name", type: "string", required: true },
    { name: "g", label: "Income quota", type: "rational", required: true, min: 0, max: 1 },
    { name: "BOM", label: "Bill of material ratio", type: "rational", required: true, greaterThan: 0 },
  ]);
}

export function supplierForm(): FormModel {
  return createForm("supplier", [
    { name: "i", label: "Level", type: "int", section: "contribution", required: true, min: 1 },
    { name: "k", label: "Resource index", type: "int", section: "contribution", required: true, min: 0 },
    { name: "m", label: "Supplier index", type: "int", section: "contribution", required: true, min: 0 },
    { name: "supplierName", label: "Supplier name", type: "string", section: "contribution" },
    { name: "supplierId", label: "Supplier id (URI)", type: "string", section: "contribution" },
    { name: "cf", label: "Fixed cost", type: "rational", section: "economic", required: true, min: 0 },
    { name: "cv", label: "Variable cost", type: "rational", section: "economic", required: true, min: 0 },
    { name: "q", label: "Quantity", type: "rational", section: "production", required: true, greaterThan: 0 },
    { name: "tp", label: "Cost recurrence (days)", type: "rational", section: "production", required: true, greaterThan: 0 },
  ]);
}

export function financeForm(): FormModel {
  return createForm("finance", [
    { name: "serviceName", label: "Service name", type: "string", required: true },
    { name: "uri", label: "Service URI", type: "string" },
    { name: "providerId", label: "Provider id", type: "string" },
    { name: "invested", label: "Invested amount", type: "rational", required: true, greaterThan: 0 },
    { name: "ratio", label: "Remuneration ratio", type: "rational", required: true, min: 0 },
  ]);
}

export function itServiceForm(): FormModel {
  return createForm("itService", [
    { name: "serviceName", label: "Service name", type: "string", required: true },
    { name: "uri", label: "Service URI", type: "string" },
    { name: "providerId", label: "Provider id", type: "string" },
    { name: "access", label: "Access URL", type: "string" },
    { name: "cost", label: "Service cost", type: "rational", required: true, min: 0 },
  ]);
}
