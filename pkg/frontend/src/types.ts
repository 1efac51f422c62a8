/** Shapes of the exported bundle document and the viewer's own state. */

export interface BundleMeta {
  version: number;
  labels: string[];
  max_depth: number;
}

export interface BundleNode {
  id: string;
  kind: "set";
  depth: number;
  x: number;
  y: number;
  label: string;
  entities: string[];
  occurrence: Record<string, number>;
}

export interface BundleLink {
  src: string;
  dst: string;
  weights: Record<string, number>;
  opacity: number;
  blend?: number;
}

export interface ActivationEntry {
  vertex_id: string;
  A: number;
  fired: boolean;
}

export interface ActivationParams {
  firing_threshold: number;
  decay: number;
  weight_normalization: string;
  label: string | null;
}

export interface ActivationDoc {
  source: string;
  params: ActivationParams;
  activations: ActivationEntry[];
}

export interface Bundle {
  meta: BundleMeta;
  nodes: BundleNode[];
  links: BundleLink[];
  activation?: ActivationDoc;
}

export class BundleError extends Error {}

function fail(msg: string): never {
  throw new BundleError(msg);
}

/**
 * Structural check of a parsed JSON document. Not a schema engine: it
 * verifies exactly what rendering and spreading rely on, and throws a
 * BundleError with a human-readable reason for the load-error banner.
 */
export function validateBundle(doc: unknown): Bundle {
  if (typeof doc !== "object" || doc === null) fail("bundle is not an object");
  const b = doc as Record<string, unknown>;
  const meta = b.meta as BundleMeta | undefined;
  if (!meta || typeof meta !== "object") fail("missing meta block");
  if (meta.version !== 1) fail(`unsupported bundle version ${meta.version}`);
  if (!Array.isArray(meta.labels) || meta.labels.length < 1) fail("meta.labels empty");
  if (!Array.isArray(b.nodes)) fail("nodes is not an array");
  if (!Array.isArray(b.links)) fail("links is not an array");

  const ids = new Set<string>();
  for (const raw of b.nodes) {
    const node = raw as BundleNode;
    if (typeof node.id !== "string" || node.kind !== "set") fail("bad node record");
    if (!Number.isFinite(node.x) || !Number.isFinite(node.y)) fail(`node ${node.id} has no position`);
    if (!Number.isInteger(node.depth) || node.depth < 0) fail(`node ${node.id} has bad depth`);
    if (!Array.isArray(node.entities) || node.entities.length < 1) fail(`node ${node.id} has no entities`);
    if (ids.has(node.id)) fail(`duplicate node ${node.id}`);
    ids.add(node.id);
  }

  const twoCorpus = meta.labels.length === 2;
  for (const raw of b.links) {
    const link = raw as BundleLink;
    if (!ids.has(link.src) || !ids.has(link.dst)) {
      fail(`link ${link.src} -> ${link.dst} references a missing node`);
    }
    if (!(link.opacity > 0 && link.opacity <= 1)) fail("link opacity out of range");
    for (const label of Object.keys(link.weights)) {
      if (!meta.labels.includes(label)) fail(`link carries undeclared label ${label}`);
    }
    const hasBlend = typeof link.blend === "number";
    if (hasBlend !== twoCorpus) fail("blend must be present exactly for two-corpus bundles");
    if (hasBlend && !(link.blend! >= 0 && link.blend! <= 1)) fail("blend out of range");
  }

  if (b.activation !== undefined) {
    const act = b.activation as ActivationDoc;
    if (typeof act !== "object" || act === null || !Array.isArray(act.activations)) {
      fail("activation block is malformed");
    }
    if (!ids.has(act.source)) fail(`activation source ${act.source} is not in the bundle`);
    for (const entry of act.activations) {
      if (!ids.has(entry.vertex_id)) fail(`activation references unknown vertex ${entry.vertex_id}`);
    }
  }
  return b as unknown as Bundle;
}
