/**
 * DOM rendering for the workflow screens: forms, configuration summary and
 * the final proceeds table.  Everything rendered is either user input or a
 * value taken verbatim from a service response; the only transformation
 * applied to money is two-decimal display formatting.
 */

import type { RequestView, SharingResultView } from "./api.js";
import type { FormModel } from "./forms.js";
import { setField } from "./forms.js";
import { formatMoney } from "./money.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

const SECTION_TITLES: Record<string, string> = {
  contribution: "Contribution",
  economic: "Economic profile",
  production: "Production profile",
};

export function renderForm(
  form: FormModel,
  onSubmit: (form: FormModel) => void,
  submitLabel = "Submit",
): HTMLFormElement {
  const root = el("form", { class: `form form-${form.name}`, novalidate: "true" });
  root.addEventListener("submit", (event) => {
    event.preventDefault();
    onSubmit(form);
  });
  const formError = el("p", { class: "form-error", role: "alert" });
  formError.hidden = !form.formError;
  formError.textContent = form.formError;
  root.append(formError);

  let currentSection = "";
  let container: HTMLElement = root;
  for (const spec of form.fields) {
    if ((spec.section ?? "") !== currentSection) {
      currentSection = spec.section ?? "";
      if (currentSection) {
        const fieldset = el("fieldset", { class: `section-${currentSection}` }, [
          el("legend", {}, [SECTION_TITLES[currentSection] ?? currentSection]),
        ]);
        root.append(fieldset);
        container = fieldset;
      } else {
        container = root;
      }
    }
    const field = el("div", { class: "field", "data-field": spec.name });
    const label = el("label", { for: `${form.name}-${spec.name}` }, [spec.label]);
    let input: HTMLElement;
    if (spec.type === "choice") {
      const select = el("select", { id: `${form.name}-${spec.name}`, name: spec.name });
      for (const choice of spec.choices ?? []) {
        const option = el("option", { value: choice }, [choice]);
        if (form.values[spec.name] === choice) {
          option.selected = true;
        }
        select.append(option);
      }
      select.addEventListener("change", () => {
        setField(form, spec.name, select.value);
        refreshErrors(root, form);
      });
      input = select;
    } else {
      const text = el("input", {
        id: `${form.name}-${spec.name}`,
        name: spec.name,
        type: "text",
        value: form.values[spec.name],
      });
      text.addEventListener("input", () => {
        setField(form, spec.name, text.value);
        refreshErrors(root, form);
      });
      input = text;
    }
    const error = el("span", { class: "field-error", "data-error-for": spec.name });
    error.hidden = true;
    field.append(label, input, error);
    container.append(field);
  }
  root.append(el("button", { type: "submit" }, [submitLabel]));
  refreshErrors(root, form);
  return root;
}

export function refreshErrors(root: HTMLElement, form: FormModel): void {
  const formError = root.querySelector<HTMLElement>(".form-error");
  if (formError) {
    formError.textContent = form.formError;
    formError.hidden = !form.formError;
  }
  for (const spec of form.fields) {
    const slot = root.querySelector<HTMLElement>(`[data-error-for="${spec.name}"]`);
    if (!slot) {
      continue;
    }
    const message = form.errors[spec.name] ?? "";
    slot.textContent = message;
    slot.hidden = !message;
  }
}

export function renderSummary(view: RequestView): HTMLElement {
  const chain = view.chain;
  const root = el("section", { class: "summary" });
  root.append(
    el("h2", {}, [`Request ${chain.requestId} — ${chain.originator}`]),
    el("p", { class: "phase" }, [`Phase: ${view.phase}`]),
    el("p", {}, [
      `price ${formatMoney(chain.p)}, demand ${chain.d}, bounds ${chain.levs}/${chain.ress}/${chain.sups}, ` +
        `scheme ${chain.sharingOptions.scheme}, policy ${chain.sharingOptions.costPolicy}`,
    ]),
  );
  for (const level of chain.levels) {
    const levelNode = el("div", { class: "level" }, [el("h3", {}, [`Level ${level.i}`])]);
    for (const resource of level.resources) {
      const table = el("table", { class: "supplies" });
      table.append(
        el("tr", {}, [
          el("th", {}, ["m"]),
          el("th", {}, ["supplier"]),
          el("th", {}, ["cf"]),
          el("th", {}, ["cv"]),
          el("th", {}, ["q"]),
          el("th", {}, ["tp"]),
        ]),
      );
      for (const supply of resource.supplyList) {
        table.append(
          el("tr", {}, [
            el("td", {}, [String(supply.m)]),
            el("td", {}, [supply.supplierData.supplierName || supply.supplierData.supplierId]),
            el("td", {}, [formatMoney(supply.economicProfile.cf)]),
            el("td", {}, [formatMoney(supply.economicProfile.cv)]),
            el("td", {}, [String(supply.productionProfile.q)]),
            el("td", {}, [String(supply.productionProfile.tp)]),
          ]),
        );
      }
      levelNode.append(
        el("div", { class: "resource" }, [
          el("h4", {}, [`${resource.resourceName} (k=${resource.k}, quota ${resource.g}, BOM ${resource.BOM})`]),
          table,
        ]),
      );
    }
    root.append(levelNode);
  }
  const services = chain.serviceLevel;
  if (services.financialServices.length || services.itServices.length) {
    const section = el("div", { class: "services" }, [el("h3", {}, ["Services"])]);
    for (const service of services.financialServices) {
      section.append(
        el("p", {}, [
          `${service.serviceName}: invested ${formatMoney(service.invested)} at ratio ${service.ratio}`,
        ]),
      );
    }
    for (const service of services.itServices) {
      section.append(el("p", {}, [`${service.serviceName}: cost ${formatMoney(service.cost)}`]));
    }
    root.append(section);
  }
  return root;
}

function participantName(line: SharingResultView["payouts"][number]): string {
  const participant = line.participant;
  if (participant.node) {
    const { i, k, m } = participant.node;
    return `${participant.label || "supplier"} (${i},${k},${m})`;
  }
  return `${participant.label || participant.kind} [${participant.kind}]`;
}

/**
 * The final sharing of proceeds: one row per participant with the
 * reimbursement/alignment/profit breakdown and the service-rounded total,
 * and a footer carrying the service's gross income.  When the result is
 * flagged as a loss the table is greyed out under a warning banner.
 */
export function renderProceeds(result: SharingResultView): HTMLElement {
  const root = el("section", { class: "proceeds" });
  if (result.lossFlag) {
    root.append(
      el("p", { class: "loss-banner", role: "alert" }, [
        "Loss: the distributable residual is negative; this result is not executable.",
      ]),
    );
  }
  const table = el("table", { class: result.lossFlag ? "payouts greyed" : "payouts" });
  table.append(
    el("tr", {}, [
      el("th", {}, ["participant"]),
      el("th", {}, ["reimbursement"]),
      el("th", {}, ["alignment"]),
      el("th", {}, ["profit share"]),
      el("th", {}, ["total"]),
    ]),
  );
  const serviceRows: HTMLTableRowElement[] = [];
  for (const line of result.payouts) {
    const row = el("tr", { class: `payout payout-${line.participant.kind}` }, [
      el("td", {}, [participantName(line)]),
      el("td", { class: "money" }, [formatMoney(line.reimbursement)]),
      el("td", { class: "money" }, [formatMoney(line.alignment)]),
      el("td", { class: "money" }, [formatMoney(line.profitShare)]),
      el("td", { class: "money total" }, [formatMoney(line.roundedTotal)]),
    ]);
    if (line.participant.kind === "financial-service" || line.participant.kind === "it-service") {
      serviceRows.push(row);
    } else {
      table.append(row);
    }
  }
  if (serviceRows.length) {
    const heading = el("tr", { class: "service-section" }, [
      el("th", { colspan: "5" }, ["Service providers"]),
    ]);
    table.append(heading, ...serviceRows);
  }
  table.append(
    el("tr", { class: "footer" }, [
      el("td", {}, ["gross income"]),
      el("td", {}, [""]),
      el("td", {}, [""]),
      el("td", {}, [""]),
      el("td", { class: "money gross" }, [formatMoney(result.grossIncome)]),
    ]),
  );
  root.append(table);
  return root;
}

export function retryBanner(onRetry: () => void): HTMLElement {
  const banner = el("div", { class: "banner retry-banner", role: "alert" }, [
    "The service could not be reached. ",
  ]);
  const button = el("button", { type: "button" }, ["Retry"]);
  button.addEventListener("click", onRetry);
  banner.append(button);
  return banner;
}

export function phaseLockedNotice(detail: string): HTMLElement {
  return el("div", { class: "banner phase-locked", role: "alert" }, [
    `The request is locked for this action: ${detail}`,
  ]);
}
