/** Client-side spreading activation over the bundle's set-level links. */

import { Bundle, BundleLink } from "./types.js";

export interface SpreadParams {
  firingThreshold: number;
  decay: number;
  weightNormalization: "out-normalized" | "global-max";
  label: string | null;
}

export const DEFAULT_PARAMS: SpreadParams = {
  firingThreshold: 0.3,
  decay: 0.5,
  weightNormalization: "out-normalized",
  label: null,
};

export interface SpreadResult {
  source: string;
  activation: Map<string, number>;
  fired: Set<string>;
  edges: Array<[string, string]>;
}

/** Per-source adjacency plus the node ordering the bundle was written in. */
export class LinkIndex {
  rank = new Map<string, number>();
  depth = new Map<string, number>();
  out = new Map<string, BundleLink[]>();
  maxDepth: number;

  constructor(bundle: Bundle) {
    bundle.nodes.forEach((node, i) => {
      this.rank.set(node.id, i);
      this.depth.set(node.id, node.depth);
    });
    for (const link of bundle.links) {
      let row = this.out.get(link.src);
      if (!row) {
        row = [];
        this.out.set(link.src, row);
      }
      row.push(link);
    }
    this.maxDepth = bundle.meta.max_depth;
  }
}

function linkWeight(link: BundleLink, label: string | null): number {
  if (label === null) {
    let total = 0;
    for (const key in link.weights) total += link.weights[key]!;
    return total;
  }
  return link.weights[label] ?? 0;
}

/**
 * Level-synchronous spread from a source node with activation 1. Every
 * fired node i passes A_i * (w / scale) * decay along each outgoing link,
 * where scale is i's total outgoing weight (or the heaviest link weight
 * anywhere, under global-max). A whole depth accumulates before anyone
 * fires; firing needs activation strictly above the threshold and happens
 * at most once per node. Zero contributions are dropped.
 *
 * Nodes are visited in the bundle's node order, which keeps floating-point
 * accumulation identical to the exporter's own spread.
 */
export function clientSpread(
  bundle: Bundle,
  sourceId: string,
  params: SpreadParams,
  index?: LinkIndex,
): SpreadResult {
  const idx = index ?? new LinkIndex(bundle);
  if (!idx.rank.has(sourceId)) {
    throw new Error(`source ${sourceId} is not a node of the bundle`);
  }
  if (params.firingThreshold < 0 || params.firingThreshold > 1) {
    throw new Error("firing threshold outside [0, 1]");
  }
  if (params.decay < 0 || params.decay > 1) {
    throw new Error("decay outside [0, 1]");
  }

  let globalMax = 0;
  if (params.weightNormalization === "global-max") {
    for (const links of idx.out.values()) {
      for (const link of links) globalMax = Math.max(globalMax, linkWeight(link, params.label));
    }
    if (globalMax === 0) throw new Error("bundle has no weighted links under the requested label");
  }

  const byRank = (a: string, b: string) => idx.rank.get(a)! - idx.rank.get(b)!;
  const activation = new Map<string, number>([[sourceId, 1.0]]);
  const fired = new Set<string>([sourceId]);
  const carried: Array<[string, string]> = [];

  let frontier = [sourceId];
  while (frontier.length > 0 && idx.depth.get(frontier[0]!)! < idx.maxDepth) {
    const received = new Map<string, number>();
    for (const v of frontier.sort(byRank)) {
      const links = idx.out.get(v) ?? [];
      // weight each link once; integer sums are order-independent
      const ws = new Array<number>(links.length);
      let outTotal = 0;
      for (let i = 0; i < links.length; i++) {
        const w = linkWeight(links[i]!, params.label);
        ws[i] = w;
        outTotal += w;
      }
      const a = activation.get(v)!;
      const scale = params.weightNormalization === "global-max" ? globalMax : outTotal;
      for (let i = 0; i < links.length; i++) {
        const w = ws[i]!;
        if (w === 0) continue;
        const contribution = a * (w / scale) * params.decay;
        if (contribution === 0) continue;
        const dst = links[i]!.dst;
        received.set(dst, (received.get(dst) ?? 0) + contribution);
        carried.push([v, dst]);
      }
    }

    frontier = [];
    for (const dst of [...received.keys()].sort(byRank)) {
      const a = (activation.get(dst) ?? 0) + received.get(dst)!;
      activation.set(dst, a);
      if (a > params.firingThreshold && !fired.has(dst)) {
        fired.add(dst);
        frontier.push(dst);
      }
    }
  }

  return { source: sourceId, activation, fired, edges: carried };
}

/**
 * Map positive activations linearly onto [minRadius, maxRadius] for
 * drawing. A flat field (single node included) maps to maxRadius.
 */
export function displayRadii(
  activation: Map<string, number>,
  minRadius = 4.0,
  maxRadius = 16.0,
): Map<string, number> {
  if (minRadius <= 0 || maxRadius < minRadius) {
    throw new Error("radii must satisfy 0 < minRadius <= maxRadius");
  }
  const kept = [...activation.entries()].filter(([, a]) => a > 0);
  const radius = new Map<string, number>();
  if (kept.length === 0) return radius;
  let lo = Infinity;
  let hi = -Infinity;
  for (const [, a] of kept) {
    lo = Math.min(lo, a);
    hi = Math.max(hi, a);
  }
  const span = hi - lo;
  for (const [id, a] of kept) {
    radius.set(id, span === 0 ? maxRadius : minRadius + ((a - lo) / span) * (maxRadius - minRadius));
  }
  return radius;
}
