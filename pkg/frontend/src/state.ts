/** Viewer state: one bundle, one camera, one live spread. */

import { clientSpread, LinkIndex, SpreadParams, SpreadResult } from "./spread.js";
import { Bundle } from "./types.js";

export type RGB = [number, number, number];

export interface Camera {
  panX: number;
  panY: number;
  zoom: number;
}

export interface ViewState {
  bundle: Bundle;
  index: LinkIndex;
  camera: Camera;
  selectedSource: string | null;
  firingThreshold: number;
  decay: number;
  paletteA: RGB;
  paletteB: RGB;
  overlay: SpreadResult | null;
  labelsPerColumn: number;
  edgeFadeNodeThreshold: number;
  opacityFloor: number;
}

export const PALETTE_A: RGB = [214, 69, 65];
export const PALETTE_B: RGB = [68, 108, 179];

export function createViewState(bundle: Bundle): ViewState {
  const params = bundle.activation?.params;
  const state: ViewState = {
    bundle,
    index: new LinkIndex(bundle),
    camera: { panX: 0, panY: 0, zoom: 1 },
    selectedSource: null,
    firingThreshold: params ? params.firing_threshold : 0.3,
    decay: params ? params.decay : 0.5,
    paletteA: PALETTE_A,
    paletteB: PALETTE_B,
    overlay: null,
    labelsPerColumn: 3,
    edgeFadeNodeThreshold: 2000,
    opacityFloor: 0.25,
  };
  if (bundle.activation) {
    selectSource(state, bundle.activation.source);
  }
  return state;
}

const clamp01 = (x: number) => Math.min(1, Math.max(0, x));

/** Slider values land in [0, 1] no matter what the widget reports. */
export function setSliders(state: ViewState, firingThreshold: number, decay: number): void {
  state.firingThreshold = clamp01(firingThreshold);
  state.decay = clamp01(decay);
  refreshOverlay(state);
}

export function selectSource(state: ViewState, id: string | null): void {
  if (id !== null && !state.index.rank.has(id)) {
    throw new Error(`cannot select ${id}: not a node of the bundle`);
  }
  state.selectedSource = id;
  refreshOverlay(state);
}

function refreshOverlay(state: ViewState): void {
  if (state.selectedSource === null) {
    state.overlay = null;
    return;
  }
  const params: SpreadParams = {
    firingThreshold: state.firingThreshold,
    decay: state.decay,
    weightNormalization: "out-normalized",
    label: null,
  };
  state.overlay = clientSpread(state.bundle, state.selectedSource, params, state.index);
}
