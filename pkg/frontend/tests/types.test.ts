import { describe, expect, it } from "vitest";

import { Bundle, BundleError, validateBundle } from "../src/types.js";
import { rawBundle } from "./helpers.js";

function mutate(name: string, fn: (doc: any) => void): unknown {
  const doc = rawBundle(name) as any;
  fn(doc);
  return doc;
}

describe("bundle validation", () => {
  it("accepts every shipped fixture", () => {
    for (const name of ["chain.json", "convergent.json", "single.json", "dual.json", "dualmax.json"]) {
      expect(() => validateBundle(rawBundle(name))).not.toThrow();
    }
  });

  it("rejects non-objects and junk", () => {
    expect(() => validateBundle(null)).toThrow(BundleError);
    expect(() => validateBundle("[]")).toThrow(BundleError);
    expect(() => validateBundle({})).toThrow(/meta/);
  });

  it("rejects a wrong version", () => {
    const doc = mutate("chain.json", (d) => (d.meta.version = 99));
    expect(() => validateBundle(doc)).toThrow(/version/);
  });

  it("rejects links pointing at missing nodes", () => {
    const doc = mutate("chain.json", (d) => (d.links[0].dst = "s9:gone"));
    expect(() => validateBundle(doc)).toThrow(/missing node/);
  });

  it("rejects duplicate node ids", () => {
    const doc = mutate("chain.json", (d) => d.nodes.push({ ...d.nodes[0] }));
    expect(() => validateBundle(doc)).toThrow(/duplicate/);
  });

  it("rejects undeclared corpus labels on links", () => {
    const doc = mutate("chain.json", (d) => (d.links[0].weights = { other: 3 }));
    expect(() => validateBundle(doc)).toThrow(/undeclared label/);
  });

  it("blend is required exactly for two-corpus bundles", () => {
    const missing = mutate("dual.json", (d) => delete d.links[0].blend);
    expect(() => validateBundle(missing)).toThrow(/blend/);
    const extra = mutate("chain.json", (d) => (d.links[0].blend = 0.5));
    expect(() => validateBundle(extra)).toThrow(/blend/);
  });

  it("rejects nodes without positions", () => {
    const doc = mutate("chain.json", (d) => (d.nodes[0].x = "left"));
    expect(() => validateBundle(doc)).toThrow(/position/);
  });

  it("rejects activation rows for unknown vertices", () => {
    const doc = mutate("chain.json", (d) => (d.activation.activations[0].vertex_id = "s5:ghost"));
    expect(() => validateBundle(doc)).toThrow(/unknown vertex/);
  });

  it("returns the typed bundle on success", () => {
    const bundle: Bundle = validateBundle(rawBundle("chain.json"));
    expect(bundle.meta.labels).toEqual(["chain"]);
    expect(bundle.nodes[0]!.id).toBe("s0:A");
  });
});
