/** Typed client for the treekit service. Components depend on this interface
 * only, so tests can substitute a stubbed service. */

import type {
  AnnotationStatusBody,
  CollectionInfo,
  ProfileRow,
  SnapshotDoc,
  SortKey,
  SortOrder,
} from "./types.js";

export class HttpError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface Api {
  createCollection(body: unknown): Promise<CollectionInfo>;
  /** step is the slider position 0..100; the request t is step/100 exactly. */
  getTree(id: string, step: number): Promise<SnapshotDoc>;
  getSorted(id: string, by: SortKey, order: SortOrder): Promise<SnapshotDoc>;
  getProfile(id: string, grid: string): Promise<ProfileRow[]>;
  /** Canonical annotation document, byte-exact as the service serialized it. */
  getAnnotationsBytes(id: string): Promise<Uint8Array>;
  putAnnotation(id: string, path: string, status: AnnotationStatusBody): Promise<void>;
  deleteAnnotation(id: string, path: string): Promise<void>;
  importAnnotations(id: string, documentBytes: Uint8Array): Promise<void>;
}

function encodePath(path: string): string {
  return path.split("/").map(encodeURIComponent).join("/");
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

async function checked(response: Response): Promise<Response> {
  if (!response.ok) {
    throw new HttpError(response.status, await detailOf(response));
  }
  return response;
}

export class HttpApi implements Api {
  constructor(private readonly base: string = "") {}

  async createCollection(body: unknown): Promise<CollectionInfo> {
    const response = await checked(
      await fetch(`${this.base}/collections`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: typeof body === "string" ? body : JSON.stringify(body),
      }),
    );
    return (await response.json()) as CollectionInfo;
  }

  async getTree(id: string, step: number): Promise<SnapshotDoc> {
    const t = (step / 100).toString();
    const response = await checked(
      await fetch(`${this.base}/collections/${id}/tree?t=${t}`),
    );
    return (await response.json()) as SnapshotDoc;
  }

  async getSorted(id: string, by: SortKey, order: SortOrder): Promise<SnapshotDoc> {
    const response = await checked(
      await fetch(`${this.base}/collections/${id}/sorted?by=${by}&order=${order}`),
    );
    return (await response.json()) as SnapshotDoc;
  }

  async getProfile(id: string, grid: string): Promise<ProfileRow[]> {
    const response = await checked(
      await fetch(`${this.base}/collections/${id}/profile?grid=${encodeURIComponent(grid)}`),
    );
    const body = (await response.json()) as { rows: ProfileRow[] };
    return body.rows;
  }

  async getAnnotationsBytes(id: string): Promise<Uint8Array> {
    const response = await checked(
      await fetch(`${this.base}/collections/${id}/annotations`),
    );
    return new Uint8Array(await response.arrayBuffer());
  }

  async putAnnotation(
    id: string,
    path: string,
    status: AnnotationStatusBody,
  ): Promise<void> {
    await checked(
      await fetch(`${this.base}/collections/${id}/annotations/${encodePath(path)}`, {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(status),
      }),
    );
  }

  async deleteAnnotation(id: string, path: string): Promise<void> {
    await checked(
      await fetch(`${this.base}/collections/${id}/annotations/${encodePath(path)}`, {
        method: "DELETE",
      }),
    );
  }

  async importAnnotations(id: string, documentBytes: Uint8Array): Promise<void> {
    await checked(
      await fetch(`${this.base}/collections/${id}/annotations`, {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: documentBytes,
      }),
    );
  }
}
