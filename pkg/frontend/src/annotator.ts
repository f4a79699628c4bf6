/** Annotator view: sortable folder table with Relevant/Exclude tick-boxes,
 * inherited marks greyed out, a software-notes panel, and canonical export.
 * Statuses are never computed client-side; each render uses the service's
 * resolved view. */

import { HttpError, type Api } from "./api.js";
import { flattenVisible, allPaths, type Row } from "./rows.js";
import type { ViewState } from "./state.js";
import type { AnnotationDoc, SortKey, SortOrder } from "./types.js";

export interface AnnotatorHandle {
  element: HTMLElement;
  refresh(): Promise<void>;
  /** Bytes of the canonical annotation document, as the export button saves. */
  exportBytes(): Promise<Uint8Array>;
  setSort(by: SortKey, order: SortOrder): Promise<void>;
  ready: Promise<void>;
}

const COLUMNS: Array<{ label: string; sort?: SortKey }> = [
  { label: "Folder Name" },
  { label: "Relevant" },
  { label: "Exclude" },
  { label: "Accessible Files", sort: "accessible" },
  { label: "Date Modified", sort: "modified" },
];

function currentContexts(input: HTMLInputElement): string[] {
  return input.value
    .split(",")
    .map((tag) => tag.trim())
    .filter((tag) => tag.length > 0);
}

export function renderAnnotator(
  container: HTMLElement,
  api: Api,
  state: ViewState,
): AnnotatorHandle {
  const element = document.createElement("div");
  element.className = "annotator";

  const message = document.createElement("div");
  message.className = "banner hidden";

  const toolbar = document.createElement("div");
  toolbar.className = "toolbar";
  const contextsInput = document.createElement("input");
  contextsInput.placeholder = "contexts for new relevant marks (e.g. family, career)";
  contextsInput.className = "contexts";
  const exportButton = document.createElement("button");
  exportButton.textContent = "Export annotations";
  toolbar.append(contextsInput, exportButton);

  const table = document.createElement("table");
  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const column of COLUMNS) {
    const th = document.createElement("th");
    th.textContent = column.label;
    if (column.sort) {
      th.classList.add("sortable");
      th.addEventListener("click", () => {
        if (state.sortKey === column.sort) {
          state.sortOrder = state.sortOrder === "desc" ? "asc" : "desc";
        } else {
          state.sortKey = column.sort!;
          state.sortOrder = "desc";
        }
        void refresh();
      });
    }
    headRow.append(th);
  }
  thead.append(headRow);
  const tbody = document.createElement("tbody");
  table.append(thead, tbody);

  const notes = document.createElement("section");
  notes.className = "notes";
  notes.innerHTML =
    "<h2>Software notes</h2><ul></ul>" +
    '<form><input name="applies_to" placeholder="format or folder (e.g. psd)">' +
    '<input name="software" placeholder="software required">' +
    '<input name="note" placeholder="note (optional)">' +
    "<button type='submit'>Add note</button></form>";

  element.append(message, toolbar, table, notes);
  container.append(element);

  const showMessage = (text: string): void => {
    message.textContent = text;
    message.classList.remove("hidden");
  };

  const checkbox = (
    row: Row,
    kind: "relevant" | "excluded",
  ): HTMLInputElement => {
    const box = document.createElement("input");
    box.type = "checkbox";
    const status = row.status;
    const marked = status?.kind === kind;
    const inherited = marked && status?.origin !== undefined && status.origin !== row.path;
    box.checked = Boolean(marked);
    if (inherited) {
      // Visually distinct and not directly editable: change it at the origin.
      box.classList.add("inherited");
      box.disabled = true;
      box.title = `inherited from ${status!.origin!}`;
    }
    box.addEventListener("change", () => {
      void (async () => {
        message.classList.add("hidden");
        try {
          if (box.checked) {
            await api.putAnnotation(
              state.collectionId,
              row.path,
              kind === "relevant"
                ? { kind, contexts: currentContexts(contextsInput) }
                : { kind },
            );
          } else {
            await api.deleteAnnotation(state.collectionId, row.path);
          }
        } catch (error) {
          if (error instanceof HttpError && error.status === 409) {
            showMessage(`Cannot mark relevant: ${error.detail}`);
          } else {
            showMessage(`Request failed: ${String(error)} — retry after reload`);
          }
        }
        await refresh();
      })();
    });
    return box;
  };

  const renderTable = (rows: Row[]): void => {
    tbody.textContent = "";
    for (const row of rows) {
      const tr = document.createElement("tr");
      tr.dataset.path = row.path;
      const nameCell = document.createElement("td");
      nameCell.style.paddingLeft = `${row.depth * 1.2}em`;
      nameCell.textContent = row.name;
      const relevantCell = document.createElement("td");
      relevantCell.append(checkbox(row, "relevant"));
      const excludeCell = document.createElement("td");
      excludeCell.append(checkbox(row, "excluded"));
      const accessibleCell = document.createElement("td");
      accessibleCell.className = "num";
      accessibleCell.textContent = String(row.accessibleFiles);
      const dateCell = document.createElement("td");
      dateCell.textContent = row.modifiedAt.slice(0, 10);
      tr.append(nameCell, relevantCell, excludeCell, accessibleCell, dateCell);
      tbody.append(tr);
    }
  };

  const renderNotes = (doc: AnnotationDoc): void => {
    const list = notes.querySelector("ul")!;
    list.textContent = "";
    for (const note of doc.software_notes) {
      const item = document.createElement("li");
      item.textContent =
        `${note.applies_to}: ${note.software}` + (note.note ? ` — ${note.note}` : "");
      list.append(item);
    }
  };

  const refresh = async (): Promise<void> => {
    const view = await api.getSorted(state.collectionId, state.sortKey, state.sortOrder);
    renderTable(flattenVisible(view.root, allPaths(view.root)));
    const payload = await api.getAnnotationsBytes(state.collectionId);
    renderNotes(JSON.parse(new TextDecoder().decode(payload)) as AnnotationDoc);
  };

  notes.querySelector("form")!.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const form = event.target as HTMLFormElement;
      const value = (name: string): string =>
        (form.elements.namedItem(name) as HTMLInputElement).value.trim();
      const payload = await api.getAnnotationsBytes(state.collectionId);
      const doc = JSON.parse(new TextDecoder().decode(payload)) as AnnotationDoc;
      const note: { applies_to: string; software: string; note?: string } = {
        applies_to: value("applies_to"),
        software: value("software"),
      };
      if (value("note")) note.note = value("note");
      doc.software_notes.push(note);
      try {
        await api.importAnnotations(
          state.collectionId,
          new TextEncoder().encode(JSON.stringify(doc)),
        );
        form.reset();
      } catch (error) {
        showMessage(`Could not save note: ${String(error)}`);
      }
      await refresh();
    })();
  });

  const exportBytes = async (): Promise<Uint8Array> => {
    // The download is exactly the canonical service payload, untouched.
    const payload = await api.getAnnotationsBytes(state.collectionId);
    const urlFactory = (globalThis as { URL?: typeof URL }).URL;
    if (urlFactory && typeof urlFactory.createObjectURL === "function") {
      const blob = new Blob([payload.buffer as ArrayBuffer], { type: "application/json" });
      const anchor = document.createElement("a");
      anchor.href = urlFactory.createObjectURL(blob);
      anchor.download = "annotations.json";
      anchor.click();
      urlFactory.revokeObjectURL(anchor.href);
    }
    return payload;
  };
  exportButton.addEventListener("click", () => void exportBytes());

  const ready = refresh();
  return {
    element,
    refresh,
    exportBytes,
    async setSort(by: SortKey, order: SortOrder): Promise<void> {
      state.sortKey = by;
      state.sortOrder = order;
      await refresh();
    },
    ready,
  };
}
