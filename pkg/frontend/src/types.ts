/** Payload shapes of the treekit HTTP API (format_version 1). */

export interface EffectiveStatus {
  kind: "relevant" | "excluded" | "unmarked";
  origin?: string;
}

export interface NodeDoc {
  name: string;
  direct_files: number;
  accessible_files: number;
  modified_at: string;
  collapsed_ancestors?: string[];
  status?: EffectiveStatus;
  children: NodeDoc[];
}

export interface ReductionBlock {
  t: number;
  pruned_folder_count: number;
  collapsed_folder_count: number;
  retained_file_fraction: number;
}

export interface SnapshotDoc {
  format_version: number;
  source: string;
  scanned_at: string;
  reduction?: ReductionBlock;
  sort?: { by: SortKey; order: SortOrder };
  root: NodeDoc;
}

export interface CollectionMetrics {
  folder_count: number;
  max_depth: number;
  total_files: number;
  retained_file_fraction: number;
}

export interface CollectionInfo {
  id: string;
  metrics: CollectionMetrics;
}

export interface ProfileRow {
  t: number;
  folder_count: number;
  max_depth: number;
  retained_file_fraction: number;
}

export interface AnnotationEntry {
  path: string;
  kind: "relevant" | "excluded";
  contexts: string[];
  note?: string;
}

export interface SoftwareNote {
  applies_to: string;
  software: string;
  note?: string;
}

export interface AnnotationDoc {
  format_version: number;
  collection_root: string;
  modified_at: string;
  entries: AnnotationEntry[];
  software_notes: SoftwareNote[];
}

export type SortKey = "accessible" | "modified";
export type SortOrder = "asc" | "desc";

export interface AnnotationStatusBody {
  kind: "relevant" | "excluded";
  contexts?: string[];
  note?: string;
}
