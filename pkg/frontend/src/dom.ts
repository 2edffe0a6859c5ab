/** DOM rendering of the page model: one card per task instance, generated
 * check-in forms, banners. */

import type { Banner, PageModel, PanelController, TaskCard } from "./viewmodel.js";
import type { FormField } from "./forms.js";

export function renderInto(
  container: HTMLElement,
  page: PageModel,
  banners: Banner[],
  onSubmit: (card: TaskCard, values: Record<string, unknown>) => void,
): void {
  container.textContent = "";
  for (const banner of banners) {
    const div = document.createElement("div");
    div.className = `banner banner-${banner.tone}`;
    div.textContent = banner.text;
    container.appendChild(div);
  }
  if (page.schemaError) {
    const div = document.createElement("div");
    div.className = "banner banner-error schema-mismatch";
    div.textContent = `schema mismatch: ${page.schemaError}`;
    container.appendChild(div);
    return;
  }
  if (page.placeholder) {
    const div = document.createElement("div");
    div.className = "placeholder";
    div.textContent = page.placeholder;
    container.appendChild(div);
    return;
  }
  for (const card of page.cards) {
    container.appendChild(renderCard(card, onSubmit));
  }
}

function renderCard(
  card: TaskCard,
  onSubmit: (card: TaskCard, values: Record<string, unknown>) => void,
): HTMLElement {
  const section = document.createElement("section");
  section.className = `card card-${card.kind}`;
  section.dataset.href = card.href;

  const title = document.createElement("h3");
  title.textContent = card.name;
  section.appendChild(title);

  if (card.exports.length > 0) {
    const list = document.createElement("dl");
    list.className = "exports";
    for (const parameter of card.exports) {
      const dt = document.createElement("dt");
      dt.textContent = parameter.name;
      const dd = document.createElement("dd");
      dd.textContent = parameter.value;
      list.append(dt, dd);
    }
    section.appendChild(list);
  }

  const form = document.createElement("form");
  const inputs = new Map<string, HTMLInputElement | HTMLSelectElement>();
  for (const field of card.fields) {
    const label = document.createElement("label");
    label.textContent = field.label;
    const input = renderField(field);
    inputs.set(field.name, input);
    label.appendChild(input);
    form.appendChild(label);
  }
  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "Complete";
  form.appendChild(button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const values: Record<string, unknown> = {};
    for (const [name, input] of inputs) {
      values[name] = input instanceof HTMLInputElement && input.type === "checkbox"
        ? input.checked
        : input.value;
    }
    onSubmit(card, values);
  });
  section.appendChild(form);
  return section;
}

function renderField(field: FormField): HTMLInputElement | HTMLSelectElement {
  if (field.kind === "select") {
    const select = document.createElement("select");
    select.name = field.name;
    for (const option of field.options ?? []) {
      const el = document.createElement("option");
      el.value = option;
      el.textContent = option;
      select.appendChild(el);
    }
    return select;
  }
  const input = document.createElement("input");
  input.name = field.name;
  input.type = field.kind === "number" ? "number"
    : field.kind === "checkbox" ? "checkbox"
    : "text";
  return input;
}

export function bindPanel(container: HTMLElement, controller: PanelController): void {
  const redraw = () => renderInto(container, controller.page, controller.banners,
    (card, values) => void controller.submit(card, values));
  controller.onChange(redraw);
  redraw();
}
