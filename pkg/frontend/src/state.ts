/** Session view state shared by the two views. */

import type { SortKey, SortOrder } from "./types.js";

export interface ViewState {
  collectionId: string;
  /** Slider position in integer steps 0..100; request t is sliderT/100. */
  sliderT: number;
  activeView: "zoomer" | "annotator";
  sortKey: SortKey;
  sortOrder: SortOrder;
  expandedPaths: Set<string>;
}

export function initialState(collectionId: string): ViewState {
  return {
    collectionId,
    sliderT: 0,
    activeView: "zoomer",
    sortKey: "accessible",
    sortOrder: "desc",
    expandedPaths: new Set(),
  };
}

export function clampSlider(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.min(100, Math.max(0, Math.round(value)));
}

/**
 * Keep the invariant expandedPaths ⊆ displayed paths after a refetch:
 * expansions of vanished folders are dropped, folders never seen before
 * start expanded.
 */
export function reconcileExpanded(
  state: ViewState,
  displayed: Set<string>,
  seenBefore: Set<string>,
): void {
  const next = new Set<string>();
  for (const path of displayed) {
    if (state.expandedPaths.has(path) || !seenBefore.has(path)) {
      next.add(path);
    }
  }
  state.expandedPaths = next;
}
