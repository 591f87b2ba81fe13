/**
 * Single-page UI: a Handsearch tab and a Snowballing tab, a job view with
 * live progress, a results table feeding the reseed loop, the report
 * panel, and download links.
 *
 * No state lives only in the page: everything renders from the service's
 * job document, so reloading and re-entering a job id reconstructs the
 * full view.
 */

import { JobDocument, ServiceClient, ServiceError } from "./api.js";
import { pollJob, PollOptions } from "./polling.js";
import {
  isValidDate,
  isValidDateRange,
  parseDoiList,
  parseKeywords,
  validateIssn,
  ValidationError,
} from "./validators.js";

export interface AppOptions {
  debounceMs?: number;
  poll?: PollOptions;
}

export interface JournalChip {
  title: string;
  issn: string;
}

const PAGE = `
<div id="banner" class="banner hidden"></div>
<nav class="tabs">
  <button id="tab-handsearch" class="tab active">Handsearch</button>
  <button id="tab-snowball" class="tab">Snowballing</button>
</nav>

<section id="handsearch-form" class="pane">
  <label for="journal-input">Journals (search by name or ISSN, then pick)</label>
  <input id="journal-input" autocomplete="off"
         placeholder="e.g. 0028-0836 or a journal name" />
  <ul id="journal-suggestions" class="suggestions"></ul>
  <ul id="journal-chips" class="chips"></ul>
  <span id="journals-error" class="error"></span>

  <div class="row">
    <label>From <input id="from-input" type="date" /></label>
    <label>Until <input id="until-input" type="date" /></label>
  </div>
  <span id="range-error" class="error"></span>

  <label for="keywords-input">Keywords (optional; may miss studies)</label>
  <input id="keywords-input" placeholder="comma-separated" />
  <span id="keywords-error" class="error"></span>

  <div class="row">
    <label>Output format
      <select id="hs-format">
        <option value="doi">DOI text</option>
        <option value="ris">RIS</option>
      </select>
    </label>
    <button id="hs-submit" disabled>Search</button>
  </div>
</section>

<section id="snowball-form" class="pane hidden">
  <label for="seeds-input">Seed DOIs (comma-separated)</label>
  <textarea id="seeds-input" rows="4"
            placeholder="10.1000/abc, 10.1000/xyz"></textarea>
  <span id="seeds-error" class="error"></span>

  <div class="row" id="direction-toggle">
    <label><input type="radio" name="direction" id="direction-backward"
                  value="backward" checked />Backward (works the seeds cite)</label>
    <label><input type="radio" name="direction" id="direction-forward"
                  value="forward" />Forward (works citing the seeds)</label>
  </div>

  <div class="row">
    <label>Output format
      <select id="sb-format">
        <option value="doi">DOI text</option>
        <option value="ris">RIS</option>
      </select>
    </label>
    <button id="sb-submit" disabled>Search</button>
  </div>
</section>

<section id="job-section" class="pane hidden">
  <div class="row">
    <strong>Job <span id="job-id"></span></strong>
    <span id="job-state" class="state"></span>
  </div>
  <ul id="job-progress"></ul>
  <div id="job-error" class="error"></div>

  <table id="results-table" class="hidden">
    <thead>
      <tr><th></th><th>DOI</th><th>Title</th><th>Authors</th><th>Year</th><th>Journal</th></tr>
    </thead>
    <tbody id="results-body"></tbody>
  </table>
  <div class="row">
    <button id="reseed-button" disabled>Use selected as snowball seeds</button>
    <a id="download-doi" class="download disabled">Download DOI list</a>
    <a id="download-ris" class="download disabled">Download RIS</a>
  </div>
  <h3 id="report-heading" class="hidden">Report</h3>
  <pre id="report-panel"></pre>
</section>

<footer class="row">
  <input id="load-job-input" placeholder="job id" />
  <button id="load-job-button">Load job</button>
</footer>
`;

export class App {
  readonly chips: JournalChip[] = [];
  private jobGeneration = 0;
  private debounceTimer: ReturnType<typeof setTimeout> | undefined;

  constructor(
    private root: HTMLElement,
    private client: ServiceClient,
    private options: AppOptions = {},
  ) {
    root.innerHTML = PAGE;
    this.wireTabs();
    this.wireHandsearchForm();
    this.wireSnowballForm();
    this.wireJobControls();
  }

  element<T extends HTMLElement>(id: string): T {
    const found = this.root.querySelector(`#${id}`);
    if (!found) {
      throw new Error(`missing element #${id}`);
    }
    return found as T;
  }

  // --- tabs -------------------------------------------------------------

  private wireTabs(): void {
    this.element("tab-handsearch").addEventListener("click", () => this.showTab("handsearch"));
    this.element("tab-snowball").addEventListener("click", () => this.showTab("snowball"));
  }

  showTab(tab: "handsearch" | "snowball"): void {
    this.element("handsearch-form").classList.toggle("hidden", tab !== "handsearch");
    this.element("snowball-form").classList.toggle("hidden", tab !== "snowball");
    this.element("tab-handsearch").classList.toggle("active", tab === "handsearch");
    this.element("tab-snowball").classList.toggle("active", tab === "snowball");
  }

  private banner(message: string): void {
    const banner = this.element("banner");
    banner.textContent = message;
    banner.classList.toggle("hidden", !message);
  }

  // --- handsearch form ------------------------------------------------------

  private wireHandsearchForm(): void {
    const journalInput = this.element<HTMLInputElement>("journal-input");
    journalInput.addEventListener("input", () => {
      const text = journalInput.value.trim();
      if (this.debounceTimer !== undefined) {
        clearTimeout(this.debounceTimer);
      }
      this.element("journals-error").textContent = "";
      if (text.length < 2) {
        this.renderSuggestions([]);
        return;
      }
      if (/^\d{4}-?\d{3}[\dXx]$/.test(text)) {
        // an ISSN-shaped input is validated locally before any request
        try {
          validateIssn(text);
        } catch (exc) {
          this.element("journals-error").textContent =
            exc instanceof ValidationError ? exc.message : String(exc);
          this.renderSuggestions([]);
          return;
        }
      }
      this.debounceTimer = setTimeout(
        () => void this.runAutocomplete(text),
        this.options.debounceMs ?? 250,
      );
    });

    for (const id of ["from-input", "until-input", "keywords-input"]) {
      this.element(id).addEventListener("input", () => this.refreshHandsearchValidity());
    }
    this.element("hs-submit").addEventListener("click", () => void this.submitHandsearch());
    this.refreshHandsearchValidity();
  }

  private async runAutocomplete(text: string): Promise<void> {
    try {
      const candidates = await this.client.journalSearch(text);
      this.renderSuggestions(candidates);
    } catch {
      this.banner("journal search failed — service unreachable?");
    }
  }

  private renderSuggestions(candidates: { title: string; issns: string[] }[]): void {
    const list = this.element("journal-suggestions");
    list.innerHTML = "";
    const input = this.element<HTMLInputElement>("journal-input");
    if (!candidates.length) {
      if (input.value.trim().length >= 2) {
        const item = document.createElement("li");
        item.className = "empty";
        item.textContent = "no matches";
        list.appendChild(item);
      }
      return;
    }
    for (const candidate of candidates) {
      const item = document.createElement("li");
      item.className = "suggestion";
      item.textContent = `${candidate.title} (${candidate.issns.join(", ")})`;
      // a human must click; nothing is ever selected silently
      item.addEventListener("click", () => {
        for (const issn of candidate.issns) {
          this.addChip({ title: candidate.title, issn });
        }
        input.value = "";
        this.renderSuggestions([]);
      });
      list.appendChild(item);
    }
  }

  addChip(chip: JournalChip): void {
    if (this.chips.some((c) => c.issn === chip.issn)) {
      return;
    }
    this.chips.push(chip);
    this.renderChips();
    this.refreshHandsearchValidity();
  }

  private renderChips(): void {
    const list = this.element("journal-chips");
    list.innerHTML = "";
    this.chips.forEach((chip, index) => {
      const item = document.createElement("li");
      item.className = "chip";
      item.textContent = `${chip.title} [${chip.issn}]`;
      const remove = document.createElement("button");
      remove.textContent = "×";
      remove.className = "chip-remove";
      remove.addEventListener("click", () => {
        this.chips.splice(index, 1);
        this.renderChips();
        this.refreshHandsearchValidity();
      });
      item.appendChild(remove);
      list.appendChild(item);
    });
  }

  handsearchValid(): boolean {
    const from = this.element<HTMLInputElement>("from-input").value;
    const until = this.element<HTMLInputElement>("until-input").value;
    return this.chips.length > 0 && isValidDateRange(from, until);
  }

  private refreshHandsearchValidity(): void {
    const from = this.element<HTMLInputElement>("from-input").value;
    const until = this.element<HTMLInputElement>("until-input").value;
    const rangeError = this.element("range-error");
    if (from && until && !isValidDateRange(from, until)) {
      rangeError.textContent =
        isValidDate(from) && isValidDate(until)
          ? "the from date must not be after the until date"
          : "dates must be real calendar dates (YYYY-MM-DD)";
    } else {
      rangeError.textContent = "";
    }
    this.element<HTMLButtonElement>("hs-submit").disabled = !this.handsearchValid();
  }

  private async submitHandsearch(): Promise<void> {
    const keywords = parseKeywords(this.element<HTMLInputElement>("keywords-input").value);
    const body = {
      journals: this.chips.map((c) => c.issn),
      from: this.element<HTMLInputElement>("from-input").value,
      until: this.element<HTMLInputElement>("until-input").value,
      ...(keywords.length ? { keywords } : {}),
    };
    try {
      const outcome = await this.client.submitHandsearch(body);
      if (outcome.ok) {
        this.banner("");
        void this.showJob(outcome.jobId);
      } else {
        this.renderFieldErrors(outcome.errors, {
          journals: "journals-error",
          range: "range-error",
          keywords: "keywords-error",
        });
      }
    } catch {
      this.banner("could not reach the service — it may be down; try again");
    }
  }

  // --- snowball form -----------------------------------------------------------

  private wireSnowballForm(): void {
    this.element("seeds-input").addEventListener("input", () => this.refreshSnowballValidity());
    this.element("sb-submit").addEventListener("click", () => void this.submitSnowball());
    this.refreshSnowballValidity();
  }

  direction(): "forward" | "backward" {
    return this.element<HTMLInputElement>("direction-forward").checked
      ? "forward"
      : "backward";
  }

  seeds(): string[] {
    return parseDoiList(this.element<HTMLTextAreaElement>("seeds-input").value);
  }

  snowballValid(): boolean {
    try {
      return this.seeds().length > 0;
    } catch {
      return false;
    }
  }

  private refreshSnowballValidity(): void {
    const error = this.element("seeds-error");
    try {
      this.seeds();
      error.textContent = "";
    } catch (exc) {
      error.textContent = exc instanceof ValidationError ? exc.message : String(exc);
    }
    this.element<HTMLButtonElement>("sb-submit").disabled = !this.snowballValid();
  }

  private async submitSnowball(): Promise<void> {
    const format = this.element<HTMLSelectElement>("sb-format").value;
    const body = {
      seeds: this.seeds(),
      direction: this.direction(),
      hydrate: format !== "doi", // RIS needs titles and authors
    };
    try {
      const outcome = await this.client.submitSnowball(body);
      if (outcome.ok) {
        this.banner("");
        void this.showJob(outcome.jobId);
      } else {
        this.renderFieldErrors(outcome.errors, {
          seeds: "seeds-error",
          direction: "seeds-error",
          hydrate: "seeds-error",
        });
      }
    } catch {
      this.banner("could not reach the service — it may be down; try again");
    }
  }

  private renderFieldErrors(
    errors: { field: string; message: string }[],
    mapping: Record<string, string>,
  ): void {
    for (const error of errors) {
      const target = mapping[error.field];
      if (target) {
        this.element(target).textContent = error.message;
      } else {
        this.banner(error.message);
      }
    }
  }

  // --- job view -------------------------------------------------------------

  private wireJobControls(): void {
    this.element("load-job-button").addEventListener("click", () => {
      const jobId = this.element<HTMLInputElement>("load-job-input").value.trim();
      if (jobId) {
        void this.showJob(jobId);
      }
    });
    this.element("reseed-button").addEventListener("click", () => this.reseedFromSelection());
  }

  async showJob(jobId: string): Promise<JobDocument | undefined> {
    const generation = ++this.jobGeneration;
    this.element("job-section").classList.remove("hidden");
    this.element("job-id").textContent = jobId;
    this.element("job-state").textContent = "…";
    this.element("job-error").textContent = "";
    this.element("job-progress").innerHTML = "";
    this.element("results-body").innerHTML = "";
    this.element("results-table").classList.add("hidden");
    this.element("report-panel").textContent = "";
    this.element("report-heading").classList.add("hidden");
    this.setDownloadsEnabled(jobId, false);

    const guardedGetJob = (id: string) => {
      if (generation !== this.jobGeneration) {
        throw new ServiceError("superseded by a newer job view", 0);
      }
      return this.client.getJob(id);
    };

    try {
      return await pollJob(
        guardedGetJob,
        jobId,
        (doc) => this.renderJob(doc),
        this.options.poll ?? {},
      );
    } catch (exc) {
      if (generation !== this.jobGeneration) {
        return undefined; // a newer view took over
      }
      if (exc instanceof ServiceError && exc.status === 404) {
        this.element("job-state").textContent = "unknown";
        this.element("job-error").textContent = `no job with id ${jobId}`;
      } else {
        this.banner("lost contact with the service while polling — try again");
      }
      return undefined;
    }
  }

  private renderJob(doc: JobDocument): void {
    this.element("job-state").textContent = doc.state;

    const progress = this.element("job-progress");
    progress.innerHTML = "";
    for (const [origin, counters] of Object.entries(doc.progress)) {
      const item = document.createElement("li");
      item.textContent = `${origin}: ${counters.fetched}/${counters.declared}`;
      progress.appendChild(item);
    }

    if (doc.error) {
      this.element("job-error").textContent = doc.error;
    }

    const finished = doc.state === "succeeded" || doc.state === "partial";
    this.setDownloadsEnabled(doc.job_id, finished);
    if (finished && doc.results) {
      this.renderResults(doc.results);
    }
    if (finished && doc.report) {
      this.element("report-heading").classList.remove("hidden");
      this.element("report-panel").textContent = JSON.stringify(doc.report, null, 2);
    }
  }

  private renderResults(rows: JobDocument["results"]): void {
    const body = this.element("results-body");
    body.innerHTML = "";
    for (const row of rows ?? []) {
      const tr = document.createElement("tr");
      const checkboxCell = document.createElement("td");
      const checkbox = document.createElement("input");
      checkbox.type = "checkbox";
      checkbox.className = "row-select";
      checkbox.dataset.doi = row.doi;
      checkbox.addEventListener("change", () => this.refreshReseedButton());
      checkboxCell.appendChild(checkbox);
      tr.appendChild(checkboxCell);
      for (const value of [row.doi, row.title, row.authors,
                           row.year === null ? "" : String(row.year), row.journal]) {
        const cell = document.createElement("td");
        cell.textContent = value;
        tr.appendChild(cell);
      }
      body.appendChild(tr);
    }
    this.element("results-table").classList.remove("hidden");
    this.refreshReseedButton();
  }

  selectedDois(): string[] {
    return Array.from(
      this.root.querySelectorAll<HTMLInputElement>(".row-select:checked"),
      (box) => box.dataset.doi ?? "",
    ).filter((doi) => doi.length);
  }

  private refreshReseedButton(): void {
    this.element<HTMLButtonElement>("reseed-button").disabled =
      this.selectedDois().length === 0;
  }

  private reseedFromSelection(): void {
    const selected = this.selectedDois();
    if (!selected.length) {
      return;
    }
    this.element<HTMLTextAreaElement>("seeds-input").value = selected.join(", ");
    this.showTab("snowball");
    this.refreshSnowballValidity();
  }

  private setDownloadsEnabled(jobId: string, enabled: boolean): void {
    for (const [id, format] of [["download-doi", "doi"], ["download-ris", "ris"]] as const) {
      const anchor = this.element<HTMLAnchorElement>(id);
      anchor.classList.toggle("disabled", !enabled);
      if (enabled) {
        anchor.setAttribute("href", this.client.exportUrl(jobId, format));
        anchor.setAttribute("download", "");
      } else {
        anchor.removeAttribute("href");
        anchor.removeAttribute("download");
      }
    }
  }
}

export function createApp(
  root: HTMLElement,
  client: ServiceClient,
  options: AppOptions = {},
): App {
  return new App(root, client, options);
}
