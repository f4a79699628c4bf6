/** Dual-pane reduction view: the unmodified hierarchy on the left, its
 * pruned-and-compressed version on the right, and a strength slider between
 * them. Every displayed count comes from a service payload. */

import type { Api } from "./api.js";
import { debounce } from "./debounce.js";
import { allPaths, flattenVisible, type Row } from "./rows.js";
import { clampSlider, reconcileExpanded, type ViewState } from "./state.js";
import type { SnapshotDoc } from "./types.js";

export const SLIDER_DEBOUNCE_MS = 300;

export interface ZoomerHandle {
  element: HTMLElement;
  /** Move the slider programmatically; fetch follows after the debounce. */
  setSlider(step: number): void;
  /** Rows currently rendered in the reduced (right) pane. */
  rightRowCount(): number;
  /** Settles once the initial panes are rendered. */
  ready: Promise<void>;
}

function paneTable(title: string): {
  wrap: HTMLElement;
  tbody: HTMLTableSectionElement;
} {
  const wrap = document.createElement("section");
  wrap.className = "pane";
  const heading = document.createElement("h2");
  heading.textContent = title;
  const table = document.createElement("table");
  const head = document.createElement("thead");
  head.innerHTML =
    "<tr><th>Folder Name</th><th>Accessible Files</th><th>Number of Files</th></tr>";
  const tbody = document.createElement("tbody");
  table.append(head, tbody);
  wrap.append(heading, table);
  return { wrap, tbody };
}

function renderRows(
  tbody: HTMLTableSectionElement,
  rows: Row[],
  onToggle?: (path: string) => void,
): void {
  tbody.textContent = "";
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.dataset.path = row.path;

    const nameCell = document.createElement("td");
    nameCell.style.paddingLeft = `${row.depth * 1.2}em`;
    if (row.hasChildren && onToggle) {
      const toggle = document.createElement("button");
      toggle.className = "toggle";
      toggle.textContent = row.expanded ? "▾" : "▸";
      toggle.addEventListener("click", () => onToggle(row.path));
      nameCell.append(toggle);
    }
    if (row.collapsedAncestors.length) {
      const crumb = document.createElement("span");
      crumb.className = "crumb";
      crumb.title = `promoted from ${row.collapsedAncestors.join(" / ")}`;
      crumb.textContent = `${row.collapsedAncestors.join(" › ")} › `;
      nameCell.append(crumb);
    }
    nameCell.append(document.createTextNode(row.name));

    const accessibleCell = document.createElement("td");
    accessibleCell.className = "num";
    accessibleCell.textContent = String(row.accessibleFiles);
    const directCell = document.createElement("td");
    directCell.className = "num";
    directCell.textContent = String(row.directFiles);

    tr.append(nameCell, accessibleCell, directCell);
    tbody.append(tr);
  }
}

export function renderZoomer(
  container: HTMLElement,
  api: Api,
  state: ViewState,
): ZoomerHandle {
  const element = document.createElement("div");
  element.className = "zoomer";

  const banner = document.createElement("div");
  banner.className = "banner hidden";

  const controls = document.createElement("div");
  controls.className = "slider-box";
  const low = document.createElement("span");
  low.textContent = "All folders";
  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "100";
  slider.step = "1";
  slider.value = String(state.sliderT);
  const high = document.createElement("span");
  high.textContent = "Single fullest folder";
  const readout = document.createElement("span");
  readout.className = "readout";
  controls.append(low, slider, high, readout);

  const left = paneTable("Original Structure");
  const right = paneTable("Reduced Structure (Ordered by Folder Importance)");
  const panes = document.createElement("div");
  panes.className = "panes";
  panes.append(left.wrap, right.wrap);

  element.append(banner, controls, panes);
  container.append(element);

  const seenPaths = new Set<string>();
  let lastDoc: SnapshotDoc | null = null;
  let sequence = 0;

  const renderRight = (): void => {
    if (!lastDoc) return;
    const rows = flattenVisible(lastDoc.root, state.expandedPaths);
    renderRows(right.tbody, rows, (path) => {
      if (state.expandedPaths.has(path)) {
        state.expandedPaths.delete(path);
      } else {
        state.expandedPaths.add(path);
      }
      renderRight();
    });
    const reduction = lastDoc.reduction;
    if (reduction) {
      const percent = (reduction.retained_file_fraction * 100).toFixed(1);
      readout.textContent =
        `t=${reduction.t.toFixed(2)} · ${reduction.pruned_folder_count} pruned, ` +
        `${reduction.collapsed_folder_count} collapsed · ${percent}% of files reachable`;
    }
  };

  const fetchRight = async (): Promise<void> => {
    const mySeq = ++sequence;
    try {
      const doc = await api.getTree(state.collectionId, state.sliderT);
      if (mySeq !== sequence) return; // a newer request superseded this one
      lastDoc = doc;
      const displayed = allPaths(doc.root);
      reconcileExpanded(state, displayed, seenPaths);
      for (const path of displayed) seenPaths.add(path);
      banner.classList.add("hidden");
      right.wrap.classList.remove("stale");
      renderRight();
    } catch (error) {
      if (mySeq !== sequence) return;
      banner.textContent = `fetch failed: ${String(error)}`;
      banner.classList.remove("hidden");
      right.wrap.classList.add("stale");
    }
  };

  const debouncedFetch = debounce(fetchRight, SLIDER_DEBOUNCE_MS);
  slider.addEventListener("input", () => {
    state.sliderT = clampSlider(Number(slider.value));
    debouncedFetch();
  });

  const ready = (async () => {
    const original = await api.getTree(state.collectionId, 0);
    renderRows(left.tbody, flattenVisible(original.root, allPaths(original.root)));
    await fetchRight();
  })();

  return {
    element,
    setSlider(step: number): void {
      slider.value = String(clampSlider(step));
      slider.dispatchEvent(new Event("input"));
    },
    rightRowCount(): number {
      return right.tbody.querySelectorAll("tr").length;
    },
    ready,
  };
}
