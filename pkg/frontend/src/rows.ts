/** Flatten a payload tree into display rows, preserving payload order.
 * The UI never reorders or recounts anything: every number and position
 * comes straight from the service response. */

import type { EffectiveStatus, NodeDoc } from "./types.js";

export interface Row {
  path: string;
  name: string;
  depth: number;
  directFiles: number;
  accessibleFiles: number;
  modifiedAt: string;
  collapsedAncestors: string[];
  status?: EffectiveStatus;
  hasChildren: boolean;
  expanded: boolean;
}

export function allPaths(root: NodeDoc): Set<string> {
  const paths = new Set<string>();
  const stack: Array<{ node: NodeDoc; path: string }> = [
    { node: root, path: root.name },
  ];
  while (stack.length) {
    const { node, path } = stack.pop()!;
    paths.add(path);
    for (const child of node.children) {
      stack.push({ node: child, path: `${path}/${child.name}` });
    }
  }
  return paths;
}

export function flattenVisible(
  root: NodeDoc,
  expanded: ReadonlySet<string>,
): Row[] {
  const rows: Row[] = [];
  const walk = (node: NodeDoc, path: string, depth: number): void => {
    const isExpanded = expanded.has(path);
    rows.push({
      path,
      name: node.name,
      depth,
      directFiles: node.direct_files,
      accessibleFiles: node.accessible_files,
      modifiedAt: node.modified_at,
      collapsedAncestors: node.collapsed_ancestors ?? [],
      status: node.status,
      hasChildren: node.children.length > 0,
      expanded: isExpanded,
    });
    if (!isExpanded) return;
    for (const child of node.children) {
      walk(child, `${path}/${child.name}`, depth + 1);
    }
  };
  walk(root, root.name, 0);
  return rows;
}
