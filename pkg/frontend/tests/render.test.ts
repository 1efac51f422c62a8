import { describe, expect, it } from "vitest";

import { buildScene, mixColor, pickLabels } from "../src/render.js";
import { createViewState, selectSource, setSliders } from "../src/state.js";
import { BundleNode } from "../src/types.js";
import { loadBundle } from "./helpers.js";

describe("edge colors", () => {
  it("blend 1.0 is exactly the first corpus endpoint", () => {
    expect(mixColor([214, 69, 65], [68, 108, 179], 1.0)).toBe("rgb(214, 69, 65)");
  });

  it("blend 0.0 is exactly the second corpus endpoint", () => {
    expect(mixColor([214, 69, 65], [68, 108, 179], 0.0)).toBe("rgb(68, 108, 179)");
  });

  it("the midpoint averages every channel", () => {
    expect(mixColor([100, 0, 50], [200, 100, 50], 0.5)).toBe("rgb(150, 50, 50)");
  });

  it("a pure-a link in the dual bundle gets the endpoint color", () => {
    const state = createViewState(loadBundle("dual.json"));
    selectSource(state, null);
    const scene = buildScene(state);
    const byKey = new Map(scene.edges.map((e) => [`${e.src}>${e.dst}`, e]));
    for (const link of state.bundle.links) {
      if (link.blend === 1.0) {
        expect(byKey.get(`${link.src}>${link.dst}`)!.color).toBe("rgb(214, 69, 65)");
      }
      if (link.blend === 0.0) {
        expect(byKey.get(`${link.src}>${link.dst}`)!.color).toBe("rgb(68, 108, 179)");
      }
    }
    expect(state.bundle.links.some((l) => l.blend === 1.0)).toBe(true);
    expect(state.bundle.links.some((l) => l.blend === 0.0)).toBe(true);
  });

  it("single-corpus bundles draw neutral edges", () => {
    const state = createViewState(loadBundle("chain.json"));
    const scene = buildScene(state);
    for (const edge of scene.edges) expect(edge.color).toBe("rgb(120, 130, 140)");
  });
});

describe("node placement", () => {
  it("pixel x is strictly ordered by depth", () => {
    for (const name of ["chain.json", "dual.json"]) {
      const state = createViewState(loadBundle(name));
      const scene = buildScene(state);
      const depths = [...new Set(scene.nodes.map((n) => n.depth))].sort((a, b) => a - b);
      expect(depths.length).toBeGreaterThan(1);
      for (let i = 1; i < depths.length; i++) {
        const prev = Math.max(...scene.nodes.filter((n) => n.depth === depths[i - 1]).map((n) => n.x));
        const next = Math.min(...scene.nodes.filter((n) => n.depth === depths[i]).map((n) => n.x));
        expect(next, `${name} depth ${depths[i]}`).toBeGreaterThan(prev);
      }
    }
  });

  it("the camera transform moves every node uniformly", () => {
    const state = createViewState(loadBundle("chain.json"));
    const before = buildScene(state);
    state.camera = { panX: 40, panY: -20, zoom: 2 };
    const after = buildScene(state);
    before.nodes.forEach((node, i) => {
      expect(after.nodes[i]!.x).toBe(node.x * 2 + 40);
      expect(after.nodes[i]!.y).toBe(node.y * 2 - 20);
    });
  });
});

describe("activation overlay", () => {
  it("activated nodes grow with activation and fired nodes are flagged", () => {
    const state = createViewState(loadBundle("chain.json"));
    const scene = buildScene(state);
    const byId = new Map(scene.nodes.map((n) => [n.id, n]));
    expect(byId.get("s0:A")!.radius).toBe(16);
    expect(byId.get("s2:C")!.radius).toBe(4);
    expect(byId.get("s0:A")!.fired).toBe(true);
    expect(byId.get("s2:C")!.fired).toBe(false);
    expect(byId.get("s3:D")!.radius).toBeLessThan(4);

    const carrying = scene.edges.filter((e) => e.carrying).map((e) => `${e.src}>${e.dst}`);
    expect(carrying).toEqual(["s0:A>s1:B", "s1:B>s2:C"]);
  });

  it("clearing the selection restores plain nodes", () => {
    const state = createViewState(loadBundle("chain.json"));
    selectSource(state, null);
    const scene = buildScene(state);
    for (const node of scene.nodes) {
      expect(node.radius).toBe(5);
      expect(node.fired).toBe(false);
    }
  });
});

describe("label policy", () => {
  function node(id: string, depth: number, total: number): BundleNode {
    return {
      id,
      kind: "set",
      depth,
      x: depth * 100,
      y: 0,
      label: id,
      entities: [id],
      occurrence: { main: total },
    };
  }

  it("keeps the K highest-occurrence nodes per column", () => {
    const nodes = [
      node("a", 0, 5),
      node("b", 0, 9),
      node("c", 0, 1),
      node("d", 1, 2),
      node("e", 1, 3),
    ];
    expect(pickLabels(nodes, 2)).toEqual(new Set(["a", "b", "d", "e"]));
    expect(pickLabels(nodes, 1)).toEqual(new Set(["b", "e"]));
    expect(pickLabels(nodes, 0)).toEqual(new Set());
  });

  it("the scene honours labelsPerColumn", () => {
    const state = createViewState(loadBundle("dual.json"));
    state.labelsPerColumn = 2;
    const scene = buildScene(state);
    const perDepth = new Map<number, number>();
    const depthOf = new Map(state.bundle.nodes.map((n) => [n.id, n.depth]));
    for (const label of scene.labels) {
      const d = depthOf.get(label.id)!;
      perDepth.set(d, (perDepth.get(d) ?? 0) + 1);
    }
    for (const count of perDepth.values()) expect(count).toBeLessThanOrEqual(2);
    expect(scene.labels.length).toBeGreaterThan(0);
  });
});

describe("dense-bundle fallback", () => {
  it("edges below the opacity floor vanish once the node count crosses the threshold", () => {
    const state = createViewState(loadBundle("dual.json"));
    selectSource(state, null);
    const full = buildScene(state);
    expect(full.edgesFaded).toBe(false);
    expect(full.edges.length).toBe(state.bundle.links.length);

    state.edgeFadeNodeThreshold = 100; // bundle has 248 nodes
    const distinct = [...new Set(state.bundle.links.map((l) => l.opacity))].sort((a, b) => a - b);
    expect(distinct.length).toBeGreaterThan(1);
    state.opacityFloor = distinct[1]!;
    const faded = buildScene(state);
    expect(faded.edgesFaded).toBe(true);
    const faint = state.bundle.links.filter((l) => l.opacity < state.opacityFloor).length;
    expect(faint).toBeGreaterThan(0);
    expect(faded.edges.length).toBe(state.bundle.links.length - faint);
    for (const edge of faded.edges) {
      expect(edge.opacity).toBeGreaterThanOrEqual(state.opacityFloor);
    }
  });
});

describe("view state", () => {
  it("sliders clamp to the unit interval", () => {
    const state = createViewState(loadBundle("chain.json"));
    setSliders(state, 1.7, -0.4);
    expect(state.firingThreshold).toBe(1);
    expect(state.decay).toBe(0);
    setSliders(state, 0.25, 0.75);
    expect(state.firingThreshold).toBe(0.25);
    expect(state.decay).toBe(0.75);
  });

  it("selecting an unknown vertex is refused", () => {
    const state = createViewState(loadBundle("chain.json"));
    expect(() => selectSource(state, "s9:nope")).toThrow(/not a node/);
    expect(state.selectedSource).toBe("s0:A");
  });

  it("a bundle with an activation block starts on its source", () => {
    const state = createViewState(loadBundle("dual.json"));
    expect(state.selectedSource).toBe("s0:Donald_Trump");
    expect(state.firingThreshold).toBe(0.05);
    expect(state.decay).toBe(0.5);
    expect(state.overlay).not.toBeNull();
    expect(state.overlay!.activation.get("s0:Donald_Trump")).toBe(1.0);
  });

  it("slider changes recompute the overlay", () => {
    const state = createViewState(loadBundle("chain.json"));
    expect(state.overlay!.activation.size).toBe(3);
    setSliders(state, 0.2, 0.5); // now C fires and D activates
    expect(state.overlay!.activation.size).toBe(4);
    expect(state.overlay!.activation.get("s3:D")).toBe(0.125);
  });
});
