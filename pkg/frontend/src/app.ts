/** Application shell: code editor and settings, example selector, run
 * launcher, symbolic tree, variant pane, trial history, prompt box, and the
 * test workbench (verify / locate). State is refetched from the service
 * after every action, so a page refresh reproduces the same view. */

import { ApiClient, ApiError } from "./api.js";
import { renderTree } from "./tree_view.js";
import type {
  ExampleInfo,
  PathDetail,
  RunSnapshot,
  TreeJson,
  TrialJson,
} from "./types.js";

export interface VariantLine {
  text: string;
  failing: boolean;
}

/** Lines of the variant pane; the first line matching the failing assert is
 * highlighted (the service also provides the visible step index). */
export function variantLines(
  detail: PathDetail,
  failingAssert: string | null,
  failingIndex: number | null,
): VariantLine[] {
  const lines: VariantLine[] = [];
  const header = detail.text.split("\n")[0] ?? "";
  lines.push({ text: header, failing: false });
  let matched = false;
  detail.variant.steps.forEach((step, i) => {
    let failing = false;
    if (!matched && failingAssert !== null && step.kind === "assert") {
      if (failingIndex !== null ? i === failingIndex : step.text === `${failingAssert};`) {
        failing = true;
        matched = true;
      }
    }
    lines.push({ text: "    " + step.text, failing });
  });
  if (detail.variant.boundExceeded) {
    lines.push({ text: "    // path truncated at loop bound", failing: false });
  }
  lines.push({ text: "}", failing: false });
  return lines;
}

export interface HistoryBox {
  label: string;
  verdict: string;
  ok: boolean;
  user: boolean;
  tooltip: string;
}

export function historyBoxes(trials: TrialJson[]): HistoryBox[] {
  return trials.map((t) => ({
    label: t.test_text ?? "(no test)",
    verdict: t.verdict,
    ok: t.verdict === "covered",
    user: t.user_authored,
    tooltip:
      t.verdict === "diverged" && t.assert_text
        ? `diverged at ${t.assert_text}`
        : t.message ?? t.verdict,
  }));
}

function div(className: string, parent?: Element): HTMLDivElement {
  const node = document.createElement("div");
  node.className = className;
  if (parent) parent.appendChild(node);
  return node;
}

export class App {
  readonly api: ApiClient;
  root: HTMLElement;

  sessionId: string | null = null;
  tree: TreeJson | null = null;
  selectedPath: string | null = null;
  detail: PathDetail | null = null;
  run: RunSnapshot | null = null;
  failingAssert: string | null = null;
  failingIndex: number | null = null;
  flashPath: string | null = null;
  examples: ExampleInfo[] = [];
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  // panes
  sourceEl!: HTMLTextAreaElement;
  entryEl!: HTMLInputElement;
  loopBoundEl!: HTMLInputElement;
  recursionBoundEl!: HTMLInputElement;
  maxPathsEl!: HTMLInputElement;
  exampleEl!: HTMLSelectElement;
  backendEl!: HTMLSelectElement;
  generateBtn!: HTMLButtonElement;
  cancelBtn!: HTMLButtonElement;
  treeSvg!: SVGElement;
  variantEl!: HTMLElement;
  historyEl!: HTMLElement;
  promptEl!: HTMLTextAreaElement;
  promptSaveBtn!: HTMLButtonElement;
  testEl!: HTMLTextAreaElement;
  verifyBtn!: HTMLButtonElement;
  locateBtn!: HTMLButtonElement;
  testFeedbackEl!: HTMLElement;
  statusEl!: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient = new ApiClient()) {
    this.root = root;
    this.api = api;
    this.buildDom();
  }

  private buildDom(): void {
    this.root.innerHTML = "";
    const header = document.createElement("header");
    header.textContent = "palm — path-aware test workbench";
    this.root.appendChild(header);

    const main = document.createElement("main");
    this.root.appendChild(main);

    // left: editor, settings, example selector, launcher
    const left = div("pane pane-left", main);
    left.appendChild(this.label("Program"));
    this.exampleEl = document.createElement("select");
    this.exampleEl.id = "example-select";
    this.exampleEl.addEventListener("change", () => {
      void this.loadExample(this.exampleEl.value);
    });
    left.appendChild(this.exampleEl);
    this.sourceEl = document.createElement("textarea");
    this.sourceEl.id = "source";
    this.sourceEl.rows = 18;
    this.sourceEl.spellcheck = false;
    left.appendChild(this.sourceEl);

    const settings = div("settings", left);
    this.entryEl = this.settingInput(settings, "entry", "entry function", "");
    this.loopBoundEl = this.settingInput(settings, "loop-bound", "loop bound", "2");
    this.recursionBoundEl = this.settingInput(settings, "recursion-bound", "recursion bound", "2");
    this.maxPathsEl = this.settingInput(settings, "max-paths", "max paths", "50");

    const launch = div("launch", left);
    this.backendEl = document.createElement("select");
    this.backendEl.id = "backend-select";
    for (const name of ["brute-force", "llm-http"]) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      this.backendEl.appendChild(opt);
    }
    launch.appendChild(this.backendEl);
    this.generateBtn = this.button(launch, "generate", "Extract + generate", () => {
      void this.extractAndGenerate();
    });
    this.cancelBtn = this.button(launch, "cancel", "Cancel run", () => {
      void this.cancelRun();
    });
    this.cancelBtn.disabled = true;

    // center: the symbolic tree
    const center = div("pane pane-center", main);
    center.appendChild(this.label("Symbolic execution tree"));
    const scroller = div("tree-scroller", center);
    this.treeSvg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    this.treeSvg.setAttribute("id", "tree");
    scroller.appendChild(this.treeSvg);

    // right: variant, history, prompt, test workbench
    const right = div("pane pane-right", main);
    right.appendChild(this.label("Path variant"));
    this.variantEl = document.createElement("pre");
    this.variantEl.id = "variant";
    right.appendChild(this.variantEl);

    right.appendChild(this.label("Trial history"));
    this.historyEl = div("history", right);
    this.historyEl.id = "history";

    right.appendChild(this.label("Prompt"));
    this.promptEl = document.createElement("textarea");
    this.promptEl.id = "prompt";
    this.promptEl.rows = 6;
    right.appendChild(this.promptEl);
    this.promptSaveBtn = this.button(right, "prompt-save", "Save prompt", () => {
      void this.savePrompt();
    });

    right.appendChild(this.label("Test editor"));
    this.testEl = document.createElement("textarea");
    this.testEl.id = "test-input";
    this.testEl.rows = 2;
    right.appendChild(this.testEl);
    const testButtons = div("test-buttons", right);
    this.verifyBtn = this.button(testButtons, "verify", "Verify against selected path", () => {
      void this.verify();
    });
    this.locateBtn = this.button(testButtons, "locate", "Locate path", () => {
      void this.locate();
    });
    this.testFeedbackEl = div("test-feedback", right);
    this.testFeedbackEl.id = "test-feedback";

    this.statusEl = document.createElement("footer");
    this.statusEl.id = "status";
    this.root.appendChild(this.statusEl);
  }

  private label(text: string): HTMLElement {
    const el = document.createElement("h2");
    el.textContent = text;
    return el;
  }

  private settingInput(parent: Element, id: string, label: string, value: string): HTMLInputElement {
    const wrap = div("setting", parent);
    const lab = document.createElement("label");
    lab.textContent = label;
    lab.htmlFor = id;
    const input = document.createElement("input");
    input.id = id;
    input.value = value;
    wrap.appendChild(lab);
    wrap.appendChild(input);
    return input;
  }

  private button(parent: Element, id: string, text: string, onClick: () => void): HTMLButtonElement {
    const btn = document.createElement("button");
    btn.id = id;
    btn.textContent = text;
    btn.addEventListener("click", onClick);
    parent.appendChild(btn);
    return btn;
  }

  status(text: string): void {
    this.statusEl.textContent = text;
  }

  // -- flows ---------------------------------------------------------------

  async init(): Promise<void> {
    this.examples = await this.api.examples();
    this.exampleEl.innerHTML = "";
    for (const ex of this.examples) {
      const opt = document.createElement("option");
      opt.value = ex.name;
      opt.textContent = `${ex.name} — ${ex.description}`;
      this.exampleEl.appendChild(opt);
    }
    if (this.examples.length > 0) {
      await this.loadExample(this.examples[0].name);
    }
  }

  async loadExample(name: string): Promise<void> {
    const ex = this.examples.find((e) => e.name === name);
    if (!ex) return;
    this.sourceEl.value = ex.source;
    this.entryEl.value = ex.entry;
    this.exampleEl.value = name;
    this.sessionId = null;
    this.tree = null;
    this.selectedPath = null;
    this.detail = null;
    this.run = null;
    this.renderAll();
    this.status(`loaded example ${name}`);
  }

  cfgFromInputs() {
    return {
      loopBound: parseInt(this.loopBoundEl.value, 10) || 2,
      recursionBound: parseInt(this.recursionBoundEl.value, 10) || 2,
      maxPaths: parseInt(this.maxPathsEl.value, 10) || 50,
      entryFunction: this.entryEl.value.trim() || null,
      symbolicFunctions: [],
    };
  }

  async extract(): Promise<void> {
    this.sessionId = await this.api.createSession(this.sourceEl.value, this.cfgFromInputs());
    this.tree = await this.api.extract(this.sessionId);
    this.selectedPath = null;
    this.detail = null;
    this.failingAssert = null;
    this.failingIndex = null;
    this.run = await this.api.currentRun(this.sessionId);
    this.renderAll();
    this.status(`extracted ${Object.keys(this.tree.leaves).length} paths`);
  }

  async extractAndGenerate(): Promise<void> {
    try {
      await this.extract();
      await this.startRun(this.backendEl.value);
    } catch (err) {
      this.status(err instanceof ApiError ? err.detail : String(err));
    }
  }

  async startRun(backend: string): Promise<void> {
    if (!this.sessionId) return;
    await this.api.startRun(this.sessionId, { backend });
    this.cancelBtn.disabled = false;
    this.status(`run started (${backend})`);
    this.startPolling();
  }

  startPolling(intervalMs = 1000): void {
    this.stopPolling();
    this.pollTimer = setInterval(() => {
      void this.pollOnce();
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  /** One poll step; also used directly by tests to avoid timers. */
  async pollOnce(): Promise<void> {
    if (!this.sessionId) return;
    this.run = await this.api.currentRun(this.sessionId);
    this.tree = await this.api.tree(this.sessionId);
    if (this.selectedPath) {
      this.detail = await this.api.pathDetail(this.sessionId, this.selectedPath);
    }
    if (this.run.status !== "running") {
      this.stopPolling();
      this.cancelBtn.disabled = true;
      if (this.run.status === "done") {
        this.status(`run ${this.run.runId || ""} done: ${this.run.covered.length} paths covered`.trim());
      }
    }
    this.renderAll();
  }

  async cancelRun(): Promise<void> {
    if (!this.sessionId) return;
    await this.api.cancelRun(this.sessionId);
    this.status("cancellation requested");
  }

  async selectPath(pathId: string): Promise<void> {
    if (!this.sessionId) return;
    this.selectedPath = pathId;
    this.failingAssert = null;
    this.failingIndex = null;
    this.flashPath = null;
    // variant and history load together
    this.detail = await this.api.pathDetail(this.sessionId, pathId);
    const prompt = await this.api.getPrompt(this.sessionId, pathId);
    this.promptEl.value = prompt.promptText;
    this.run = await this.api.currentRun(this.sessionId);
    this.renderAll();
    this.status(`selected ${pathId} (${this.detail.status})`);
  }

  async savePrompt(): Promise<void> {
    if (!this.sessionId || !this.selectedPath) return;
    await this.api.savePrompt(this.sessionId, this.selectedPath, this.promptEl.value);
    this.status(`prompt saved for ${this.selectedPath}`);
  }

  async verify(): Promise<void> {
    if (!this.sessionId || !this.selectedPath) {
      this.status("select a path first");
      return;
    }
    this.testFeedbackEl.textContent = "";
    try {
      const v = await this.api.verify(this.sessionId, this.selectedPath, this.testEl.value);
      if (v.verdict === "diverged") {
        this.failingAssert = v.assert ?? null;
        this.failingIndex = v.displayStepIndex ?? null;
      } else {
        this.failingAssert = null;
        this.failingIndex = null;
      }
      await this.pollOnce();
      this.status(
        v.verdict === "covered"
          ? `test covers ${this.selectedPath}`
          : v.verdict === "diverged"
            ? `diverged at ${v.assert}`
            : `${v.verdict}: ${v.message ?? ""}`,
      );
    } catch (err) {
      this.testFeedbackEl.textContent = err instanceof ApiError ? err.detail : String(err);
    }
  }

  async locate(): Promise<void> {
    if (!this.sessionId) return;
    this.testFeedbackEl.textContent = "";
    try {
      const res = await this.api.locate(this.sessionId, this.testEl.value);
      if (res.pathId) {
        await this.selectPath(res.pathId);
        this.flashPath = res.pathId;
        this.renderAll();
        this.status(`test exercises ${res.pathId}`);
      } else {
        this.status(`no matching path (${res.reason})`);
      }
    } catch (err) {
      this.testFeedbackEl.textContent = err instanceof ApiError ? err.detail : String(err);
    }
  }

  // -- rendering -------------------------------------------------------------

  renderAll(): void {
    this.renderTreePane();
    this.renderVariantPane();
    this.renderHistoryPane();
  }

  renderTreePane(): void {
    if (!this.tree) {
      while (this.treeSvg.firstChild) this.treeSvg.removeChild(this.treeSvg.firstChild);
      return;
    }
    renderTree(this.treeSvg, this.tree, {
      selectedPath: this.selectedPath,
      flashPath: this.flashPath,
      onSelectLeaf: (pid) => {
        void this.selectPath(pid);
      },
    });
  }

  renderVariantPane(): void {
    this.variantEl.innerHTML = "";
    if (!this.detail) return;
    for (const line of variantLines(this.detail, this.failingAssert, this.failingIndex)) {
      const span = document.createElement("span");
      span.className = line.failing ? "variant-line failing" : "variant-line";
      span.textContent = line.text;
      this.variantEl.appendChild(span);
      this.variantEl.appendChild(document.createTextNode("\n"));
    }
  }

  renderHistoryPane(): void {
    this.historyEl.innerHTML = "";
    if (!this.run || !this.selectedPath) return;
    const trials = this.run.trials[this.selectedPath] ?? [];
    for (const box of historyBoxes(trials)) {
      const el = div(box.ok ? "trial-box ok" : "trial-box fail", this.historyEl);
      el.title = box.tooltip;
      el.textContent = (box.user ? "you: " : "") + box.label;
    }
  }
}
