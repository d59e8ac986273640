/**
 * DOM wiring for the planning calculator: design tabs, calibration
 * sub-forms, debounced live recompute, result card, and sweep overlays.
 */

import { DesignId, PlanRequest, PlanServiceClient, ServiceError } from "./api.js";
import { renderChart } from "./chart.js";
import { planCard } from "./format.js";
import { PlannerState, PlannerView, debounce } from "./state.js";
import { runSweep, sweepValues } from "./sweep.js";
import { toRequestBody, validateForm } from "./validate.js";

interface FieldSpec {
  name: string;
  label: string;
  value?: number;
  step?: number;
  calibration?: "rho2" | "mse" | "sesp";
}

interface TabSpec {
  id: DesignId;
  title: string;
  fields: FieldSpec[];
  sweepFields: string[];
}

const COMMON: FieldSpec[] = [
  { name: "delta", label: "effect size Δ", value: 0.2, step: 0.01 },
  { name: "N", label: "unlabeled pool N", value: 5000, step: 100 },
  { name: "alpha", label: "level α", value: 0.05, step: 0.005 },
  { name: "power", label: "target power", value: 0.8, step: 0.05 },
];

const CALIBRATION: FieldSpec[] = [
  { name: "sigma2", label: "outcome variance σ²", value: 1, step: 0.1 },
  { name: "rho2", label: "R² (squared correlation)", value: 0.49, step: 0.01, calibration: "rho2" },
  { name: "mse", label: "prediction MSE", step: 0.05, calibration: "mse" },
  { name: "p", label: "prevalence p", step: 0.01, calibration: "sesp" },
  { name: "se", label: "sensitivity", step: 0.01, calibration: "sesp" },
  { name: "sp", label: "specificity", step: 0.01, calibration: "sesp" },
];

const TABS: TabSpec[] = [
  {
    id: "mean",
    title: "One-sample mean",
    fields: [...CALIBRATION, ...COMMON],
    sweepFields: ["rho2", "N", "delta"],
  },
  {
    id: "two-sample",
    title: "Two-sample",
    fields: [
      ...CALIBRATION,
      { name: "allocation", label: "allocation n_a/n_b", value: 1, step: 0.5 },
      ...COMMON.map((f) => (f.name === "delta" ? { ...f, value: 0.3 } : f)),
    ],
    sweepFields: ["rho2", "N", "delta", "allocation"],
  },
  {
    id: "paired",
    title: "Paired",
    fields: [
      { ...CALIBRATION[0], label: "difference variance Var(D)" },
      { ...CALIBRATION[1], label: "R² of difference predictions" },
      ...CALIBRATION.slice(2),
      ...COMMON.map((f) => (f.name === "delta" ? { ...f, value: 0.3 } : f)),
    ],
    sweepFields: ["rho2", "N", "delta"],
  },
  {
    id: "two-by-two",
    title: "2×2 table",
    fields: [
      { name: "p0", label: "control probability p₀", value: 0.2, step: 0.01 },
      { name: "p1", label: "treated probability p₁", value: 0.4, step: 0.01 },
      { name: "rho0", label: "ρ₀ (control)", step: 0.05, calibration: "rho2" },
      { name: "rho1", label: "ρ₁ (treated)", step: 0.05, calibration: "rho2" },
      { name: "se", label: "sensitivity", value: 0.9, step: 0.01, calibration: "sesp" },
      { name: "sp", label: "specificity", value: 0.9, step: 0.01, calibration: "sesp" },
      { name: "kappa", label: "allocation n₁/n₀", value: 1, step: 0.5 },
      { name: "alpha", label: "level α", value: 0.05, step: 0.005 },
      { name: "power", label: "target power", value: 0.8, step: 0.05 },
    ],
    sweepFields: ["p1", "kappa"],
  },
  {
    id: "regression",
    title: "Regression contrast",
    fields: [
      { name: "v_yy", label: "labeled score block V_YY", value: 2, step: 0.1 },
      { name: "v_ff", label: "prediction score block V_ff", value: 2, step: 0.1 },
      { name: "v_yf", label: "cross block V_Yf", value: 1.4, step: 0.1 },
      ...COMMON.map((f) => (f.name === "delta" ? { ...f, value: 0.3 } : f)),
    ],
    sweepFields: ["v_yf", "N", "delta"],
  },
];

type CalibrationMode = "rho2" | "mse" | "sesp";

export class CalculatorApp {
  private state: PlannerState;
  private active: TabSpec = TABS[0];
  private calibrationMode: CalibrationMode = "rho2";
  private root!: HTMLElement;

  constructor(private client: PlanServiceClient, private doc: Document = document) {
    this.state = new PlannerState(client);
    this.state.subscribe((view) => this.renderResult(view));
  }

  mount(root: HTMLElement): void {
    this.root = root;
    root.innerHTML = "";
    root.appendChild(this.buildTabs());
    const layout = this.el("div", "layout");
    layout.appendChild(this.el("div", "form-pane"));
    const results = this.el("div", "results-pane");
    results.appendChild(this.el("div", "messages"));
    results.appendChild(this.el("div", "plan-card"));
    results.appendChild(this.el("div", "chart"));
    results.appendChild(this.buildSweepControls());
    layout.appendChild(results);
    root.appendChild(layout);
    this.renderForm();
    this.scheduleSubmit();
  }

  private el(tag: string, cls?: string): HTMLElement {
    const node = this.doc.createElement(tag);
    if (cls) node.className = cls;
    return node;
  }

  private buildTabs(): HTMLElement {
    const bar = this.el("nav", "tabs");
    for (const tab of TABS) {
      const btn = this.el("button", "tab") as HTMLButtonElement;
      btn.textContent = tab.title;
      btn.dataset.design = tab.id;
      btn.onclick = () => {
        this.active = tab;
        this.calibrationMode = tab.id === "two-by-two" ? "sesp" : "rho2";
        this.renderForm();
        this.scheduleSubmit();
        for (const other of Array.from(bar.children)) {
          other.classList.toggle(
            "active",
            (other as HTMLElement).dataset.design === tab.id,
          );
        }
      };
      if (tab.id === this.active.id) btn.classList.add("active");
      bar.appendChild(btn);
    }
    return bar;
  }

  private buildSweepControls(): HTMLElement {
    const box = this.el("div", "sweep");
    const select = this.el("select", "sweep-field") as HTMLSelectElement;
    const from = this.numberInput("sweep-from", 0.25);
    const to = this.numberInput("sweep-to", 0.75);
    const run = this.el("button", "sweep-run") as HTMLButtonElement;
    run.textContent = "Overlay sweep";
    run.onclick = () => void this.runSweep(select.value, from, to);
    const label = this.el("span");
    label.textContent = "What-if sweep: ";
    box.append(label, select, from, to, run);
    return box;
  }

  private numberInput(cls: string, value: number): HTMLInputElement {
    const input = this.el("input", cls) as HTMLInputElement;
    input.type = "number";
    input.value = String(value);
    input.step = "any";
    return input;
  }

  private renderForm(): void {
    const pane = this.root.querySelector(".form-pane") as HTMLElement;
    pane.innerHTML = "";

    if (this.active.id !== "regression") {
      const modeRow = this.el("div", "calibration-mode");
      for (const mode of ["rho2", "mse", "sesp"] as CalibrationMode[]) {
        if (this.active.id === "two-by-two" && mode === "mse") continue;
        const btn = this.el("button") as HTMLButtonElement;
        btn.textContent = { rho2: "R²", mse: "MSE", sesp: "se/sp" }[mode];
        btn.classList.toggle("active", mode === this.calibrationMode);
        btn.onclick = () => {
          this.calibrationMode = mode;
          this.renderForm();
          this.scheduleSubmit();
        };
        modeRow.appendChild(btn);
      }
      pane.appendChild(modeRow);
    }

    for (const field of this.active.fields) {
      if (!this.fieldVisible(field)) continue;
      const row = this.el("label", "field-row");
      const span = this.el("span");
      span.textContent = field.label;
      const input = this.numberInput(`field-${field.name}`, field.value ?? NaN);
      if (field.value === undefined) input.value = "";
      input.name = field.name;
      if (field.step) input.step = String(field.step);
      input.oninput = () => this.scheduleSubmit();
      row.append(span, input);
      pane.appendChild(row);
    }

    const sweepSelect = this.root.querySelector(".sweep-field") as HTMLSelectElement;
    sweepSelect.innerHTML = "";
    for (const name of this.active.sweepFields) {
      const opt = this.doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      sweepSelect.appendChild(opt);
    }
  }

  private fieldVisible(field: FieldSpec): boolean {
    if (!field.calibration) return true;
    if (this.active.id === "two-by-two") {
      return this.calibrationMode === "sesp"
        ? field.calibration === "sesp" && field.name !== "p"
        : field.calibration === "rho2";
    }
    if (field.name === "sigma2") return true;
    return (
      field.calibration === this.calibrationMode ||
      (this.calibrationMode === "mse" && field.calibration === "mse") ||
      (this.calibrationMode === "rho2" && field.calibration === "rho2") ||
      (this.calibrationMode === "sesp" && field.calibration === "sesp")
    );
  }

  readForm(): Record<string, number | undefined> {
    const form: Record<string, number | undefined> = {};
    const pane = this.root.querySelector(".form-pane") as HTMLElement;
    for (const input of Array.from(pane.querySelectorAll("input"))) {
      const el = input as HTMLInputElement;
      form[el.name] = el.value === "" ? undefined : Number(el.value);
    }
    if (this.active.id !== "two-by-two" && this.calibrationMode === "sesp") {
      delete form.sigma2; // implied by the binary metrics
    }
    if (this.active.id === "two-by-two") {
      form.measure = undefined; // set below as a string
    }
    return form;
  }

  private scheduleSubmit = debounce(() => void this.submit(), 250);

  async submit(): Promise<void> {
    const form = this.readForm();
    const errors = validateForm(this.active.id, form);
    this.renderMessages(errors.map((e) => `${e.field}: ${e.message}`));
    if (errors.length > 0) return;
    const body = toRequestBody({
      ...form,
      ...(this.active.id === "two-by-two" ? { measure: "RR" } : {}),
    });
    await this.state.submit(this.active.id, body as PlanRequest);
  }

  private renderMessages(messages: string[]): void {
    const box = this.root.querySelector(".messages") as HTMLElement;
    box.innerHTML = "";
    for (const message of messages) {
      const div = this.el("div", "message");
      div.textContent = message;
      box.appendChild(div);
    }
  }

  private renderResult(view: PlannerView): void {
    const cardBox = this.root.querySelector(".plan-card") as HTMLElement;
    const chartBox = this.root.querySelector(".chart") as HTMLElement;
    if (view.status === "error" && view.error) {
      this.renderServiceError(view.error);
      cardBox.innerHTML = "";
      chartBox.innerHTML = "";
      return;
    }
    if (view.status !== "ready" || !view.response) return;
    const card = planCard(view.response);
    cardBox.innerHTML = "";
    const headline = this.el("h2", "headline");
    headline.textContent = card.headline;
    const reduction = this.el("p", "reduction");
    reduction.textContent = card.reductionLabel;
    cardBox.append(headline, reduction);
    if (card.groupNote) {
      const note = this.el("p", "group-note");
      note.textContent = card.groupNote;
      cardBox.appendChild(note);
    }
    const power = this.el("p", "power");
    power.textContent = `analytic power at plan: ${card.power}`;
    cardBox.appendChild(power);
    if (card.ruleOfThumb) {
      const rot = this.el("p", "rule-of-thumb");
      rot.textContent = card.ruleOfThumb;
      cardBox.appendChild(rot);
    }
    if (card.poolWarning) {
      const banner = this.el("div", "pool-banner");
      banner.textContent = card.poolWarning;
      cardBox.appendChild(banner);
    }
    const target = Number(view.response.inputs.power ?? 0.8);
    chartBox.innerHTML = renderChart(
      [{ label: "plan", points: view.response.curve }],
      { targetPower: target },
    );
  }

  private renderServiceError(error: ServiceError): void {
    const suffix =
      error.status === 422 && error.minN !== undefined
        ? ` Smallest feasible pool: N ≥ ${error.minN}.`
        : "";
    this.renderMessages([`${error.message}${suffix}`]);
  }

  async runSweep(field: string, fromEl: HTMLInputElement, toEl: HTMLInputElement): Promise<void> {
    const form = this.readForm();
    const errors = validateForm(this.active.id, { ...form, [field]: Number(fromEl.value) });
    if (errors.length > 0) {
      this.renderMessages(errors.map((e) => `${e.field}: ${e.message}`));
      return;
    }
    let values: number[];
    try {
      values = sweepValues(Number(fromEl.value), Number(toEl.value), 5);
    } catch (err) {
      this.renderMessages([(err as Error).message]);
      return;
    }
    const base = toRequestBody({
      ...form,
      ...(this.active.id === "two-by-two" ? { measure: "RR" } : {}),
    });
    const result = await runSweep(this.client, this.active.id, base, field, values);
    const chartBox = this.root.querySelector(".chart") as HTMLElement;
    const target = Number((form.power as number) ?? 0.8);
    chartBox.innerHTML = renderChart(result.curves, { targetPower: target });
    if (result.ruleOfThumb) {
      const note = this.el("p", "sweep-note");
      note.textContent =
        "rule-of-thumb ratio 1−R²: " +
        result.ruleOfThumb.map((r) => `${r.value.toFixed(2)}→${r.ratio.toFixed(2)}`).join(", ");
      chartBox.appendChild(note);
    }
  }
}
