// Single-page planner UI: a query panel driven entirely by /api/attributes,
// prediction and impact views that show the API's answers verbatim, and a
// red/green county choropleth with a 2000/2010 year toggle.

import {
  ApiError,
  fetchAttributes,
  fetchMap,
  postImpact,
  postPredict,
  type AttributeCatalog,
  type ImpactReport,
  type Prediction,
} from "./api";
import { renderChoropleth } from "./map";
import { LatestWins } from "./requests";

const YEARS = [2000, 2010];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderPrediction(container: HTMLElement, prediction: Prediction): void {
  container.textContent = "";
  const badge = el(
    "span",
    `badge ${prediction.label === "Y" ? "badge-yes" : "badge-no"}`,
    prediction.label === "Y" ? "YES" : "NO",
  );
  const confidence = el(
    "span",
    "confidence",
    `confidence ${(prediction.confidence * 100).toFixed(1)}%`,
  );
  container.append(badge, confidence);

  if (prediction.provenance === "prior" && prediction.explanation.length > 0) {
    container.appendChild(el("div", "note", prediction.explanation[0]));
  }
  const drawer = el("details", "explanation");
  drawer.appendChild(el("summary", undefined, "See More"));
  const list = el("ul");
  for (const item of prediction.explanation) {
    list.appendChild(el("li", undefined, item)); // verbatim from the API
  }
  drawer.appendChild(list);
  container.appendChild(drawer);
}

export function renderImpact(container: HTMLElement, report: ImpactReport): void {
  container.textContent = "";
  if (report.note !== null) {
    container.appendChild(el("div", "note", report.note));
    return;
  }
  if (report.headline !== null) {
    container.appendChild(el("h3", "headline", report.headline));
  }
  const list = el("ul", "rules");
  for (const rule of report.rules) {
    list.appendChild(
      el("li", undefined, `${rule.text} (confidence ${(rule.confidence * 100).toFixed(0)}%)`),
    );
  }
  container.appendChild(list);
}

function renderError(container: HTMLElement, message: string): void {
  container.textContent = "";
  container.appendChild(el("div", "error", message));
}

function numericValue(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : NaN;
}

export async function initApp(root: HTMLElement): Promise<void> {
  root.textContent = "";
  let catalog: AttributeCatalog;
  try {
    catalog = await fetchAttributes();
  } catch (error) {
    renderError(root, `could not load attributes: ${(error as Error).message}`);
    return;
  }

  const panel = el("section", "query-panel");
  const mapPanel = el("section", "map-panel");
  root.append(panel, mapPanel);

  // --- mode toggle ---
  const toggle = el("div", "mode-toggle");
  const predictButton = el("button", "mode active", "Predict sprawl");
  predictButton.id = "mode-predict";
  const impactButton = el("button", "mode", "Parameter impact");
  impactButton.id = "mode-impact";
  toggle.append(predictButton, impactButton);
  panel.appendChild(toggle);

  // --- predict form, one row per API attribute ---
  const predictForm = el("form", "predict-form");
  predictForm.id = "predict-form";
  const inputs = new Map<string, HTMLInputElement>();
  const fieldErrors = new Map<string, HTMLElement>();
  for (const info of catalog.attributes) {
    const row = el("label", "attr-row");
    const unitsSuffix = info.units ? ` (${info.units})` : "";
    row.appendChild(el("span", "attr-name", `${info.name}${unitsSuffix}`));
    const input = el("input");
    input.type = "text";
    input.inputMode = "decimal";
    input.dataset.attr = info.name;
    input.placeholder = `${info.minimum} to ${info.maximum}`;
    const fieldError = el("span", "field-error");
    fieldError.hidden = true;
    row.append(input, fieldError);
    predictForm.appendChild(row);
    inputs.set(info.name, input);
    fieldErrors.set(info.name, fieldError);
  }
  const predictSubmit = el("button", "submit", "Ask");
  predictSubmit.type = "submit";
  predictForm.appendChild(predictSubmit);
  panel.appendChild(predictForm);

  // --- impact form ---
  const impactForm = el("form", "impact-form");
  impactForm.id = "impact-form";
  impactForm.hidden = true;
  const selectA = el("select");
  selectA.id = "impact-a";
  const selectB = el("select");
  selectB.id = "impact-b";
  for (const info of catalog.attributes) {
    selectA.appendChild(new Option(info.name, info.name));
    selectB.appendChild(new Option(info.name, info.name));
  }
  selectB.appendChild(new Option(catalog.target, catalog.target));
  selectB.selectedIndex = selectB.options.length - 1;
  const valueInput = el("input");
  valueInput.id = "impact-value";
  valueInput.type = "text";
  valueInput.inputMode = "decimal";
  valueInput.placeholder = "optional value for A";
  const valueError = el("span", "field-error");
  valueError.hidden = true;
  const impactSubmit = el("button", "submit", "Ask");
  impactSubmit.type = "submit";
  impactForm.append(
    el("span", "attr-name", "How does"),
    selectA,
    el("span", "attr-name", "affect"),
    selectB,
    valueInput,
    valueError,
    impactSubmit,
  );
  panel.appendChild(impactForm);

  const result = el("div", "result");
  result.id = "result";
  panel.appendChild(result);

  predictButton.addEventListener("click", (event) => {
    event.preventDefault();
    predictForm.hidden = false;
    impactForm.hidden = true;
    predictButton.classList.add("active");
    impactButton.classList.remove("active");
  });
  impactButton.addEventListener("click", (event) => {
    event.preventDefault();
    predictForm.hidden = true;
    impactForm.hidden = false;
    impactButton.classList.add("active");
    predictButton.classList.remove("active");
  });

  // --- submissions (latest response wins per channel) ---
  const predictChannel = new LatestWins();
  predictForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const assignment: Record<string, number> = {};
    let invalid = false;
    for (const [name, input] of inputs) {
      const fieldError = fieldErrors.get(name)!;
      fieldError.hidden = true;
      fieldError.textContent = "";
      const value = numericValue(input.value);
      if (value === null) continue;
      if (Number.isNaN(value)) {
        fieldError.textContent = "enter a number";
        fieldError.hidden = false;
        invalid = true;
        continue;
      }
      assignment[name] = value;
    }
    if (invalid) {
      return; // no request while any field is non-numeric
    }
    const ticket = predictChannel.next();
    postPredict(assignment)
      .then((prediction) => {
        if (predictChannel.isCurrent(ticket)) {
          renderPrediction(result, prediction);
        }
      })
      .catch((error: unknown) => {
        if (!predictChannel.isCurrent(ticket)) return;
        if (error instanceof ApiError) {
          const named = [...inputs.keys()].find((name) =>
            error.message.includes(`'${name}'`),
          );
          if (named) {
            const fieldError = fieldErrors.get(named)!;
            fieldError.textContent = error.message;
            fieldError.hidden = false;
            return;
          }
          renderError(result, `${error.code}: ${error.message}`);
        } else {
          renderError(result, (error as Error).message);
        }
      });
  });

  const impactChannel = new LatestWins();
  impactForm.addEventListener("submit", (event) => {
    event.preventDefault();
    valueError.hidden = true;
    valueError.textContent = "";
    const value = numericValue(valueInput.value);
    if (Number.isNaN(value as number) && value !== null) {
      valueError.textContent = "enter a number";
      valueError.hidden = false;
      return;
    }
    const ticket = impactChannel.next();
    postImpact(selectA.value, selectB.value, value)
      .then((report) => {
        if (impactChannel.isCurrent(ticket)) {
          renderImpact(result, report);
        }
      })
      .catch((error: unknown) => {
        if (!impactChannel.isCurrent(ticket)) return;
        const message =
          error instanceof ApiError
            ? `${error.code}: ${error.message}`
            : (error as Error).message;
        renderError(result, message);
      });
  });

  // --- choropleth with year toggle ---
  const yearToggle = el("div", "year-toggle");
  const yearButtons = new Map<number, HTMLButtonElement>();
  for (const year of YEARS) {
    const button = el("button", "year", String(year));
    button.dataset.year = String(year);
    yearToggle.appendChild(button);
    yearButtons.set(year, button);
  }
  const mapStatus = el("div", "map-status");
  mapStatus.id = "map-status";
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.id = "map";
  mapPanel.append(yearToggle, mapStatus, svg);

  const mapChannel = new LatestWins();
  const loadYear = (year: number) => {
    const ticket = mapChannel.next();
    fetchMap(year)
      .then((doc) => {
        if (!mapChannel.isCurrent(ticket)) return;
        mapStatus.textContent = "";
        renderChoropleth(svg, doc);
        for (const [y, button] of yearButtons) {
          button.classList.toggle("active", y === year);
        }
      })
      .catch((error: unknown) => {
        if (!mapChannel.isCurrent(ticket)) return;
        if (error instanceof ApiError && error.status === 404) {
          renderError(mapStatus, `year ${year} unavailable`);
        } else {
          renderError(mapStatus, (error as Error).message);
        }
      });
  };
  for (const [year, button] of yearButtons) {
    button.addEventListener("click", (event) => {
      event.preventDefault();
      loadYear(year);
    });
  }
  loadYear(YEARS[YEARS.length - 1]);
}
