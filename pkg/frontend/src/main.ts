// DOM wiring for the authoring loop: sliders update the ViewState, the
// debounced preview fetches the rasterized condition map from the service,
// and the keyframe timeline exports trajectory JSON the CLI accepts as-is.

import { getTrajectory, health, putTrajectory } from './api.js';
import { canExport, downloadTrajectory } from './export.js';
import { PreviewLoop } from './preview.js';
import { ViewState } from './state.js';
import type { TrajectoryDoc } from './types.js';

const state = new ViewState();
const session = 'ui';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const previewImg = el<HTMLImageElement>('preview');
const banner = el<HTMLDivElement>('banner');
let lastUrl: string | null = null;

const preview = new PreviewLoop({
  onImage: (blob) => {
    banner.hidden = true;
    const url = URL.createObjectURL(blob);
    previewImg.src = url;
    if (lastUrl) URL.revokeObjectURL(lastUrl);
    lastUrl = url;
  },
  onError: (message) => {
    banner.textContent = message; // last good preview stays up
    banner.hidden = false;
  },
});

function refreshPreview(): void {
  const kfs = state.listKeyframes();
  if (kfs.length >= 2) {
    preview.schedule({
      trajectory: state.toTrajectoryDoc(),
      time: state.time,
      frames: 81,
    });
  } else {
    preview.schedule({ trajectory: state.previewDoc(), time: 0 });
  }
}

function bindSlider(id: string, apply: (value: number) => void): void {
  const input = el<HTMLInputElement>(id);
  const label = el<HTMLSpanElement>(`${id}-value`);
  const update = () => {
    const v = parseFloat(input.value);
    label.textContent = input.value;
    apply(v);
    refreshPreview();
  };
  input.addEventListener('input', update);
  update();
}

function renderKeyframes(): void {
  const list = el<HTMLTableSectionElement>('keyframes');
  list.innerHTML = '';
  state.listKeyframes().forEach((kf, i) => {
    const row = document.createElement('tr');
    const timeCell = document.createElement('td');
    const timeInput = document.createElement('input');
    timeInput.type = 'number';
    timeInput.min = '0';
    timeInput.max = '1';
    timeInput.step = '0.01';
    timeInput.value = kf.time.toFixed(3);
    timeInput.addEventListener('change', () => {
      const clamped = state.moveKeyframe(i, parseFloat(timeInput.value));
      timeInput.value = clamped.toFixed(3);
      refreshPreview();
    });
    timeCell.appendChild(timeInput);
    const desc = document.createElement('td');
    desc.textContent = `center (${kf.center.map((v) => v.toFixed(2)).join(', ')}) fov ${kf.fov_deg.toFixed(0)}`;
    const removeCell = document.createElement('td');
    const removeBtn = document.createElement('button');
    removeBtn.textContent = 'remove';
    removeBtn.addEventListener('click', () => {
      state.removeKeyframe(i);
      renderKeyframes();
      updateExportEnabled();
      refreshPreview();
    });
    removeCell.appendChild(removeBtn);
    row.append(timeCell, desc, removeCell);
    list.appendChild(row);
  });
}

function updateExportEnabled(): void {
  const doc = state.toTrajectoryDoc();
  el<HTMLButtonElement>('export').disabled = !canExport(doc);
  el<HTMLButtonElement>('save').disabled = !canExport(doc);
}

bindSlider('azimuth', (v) => state.setOrbit({ azimuthDeg: v }));
bindSlider('elevation', (v) => state.setOrbit({ elevationDeg: v }));
bindSlider('distance', (v) => state.setOrbit({ distance: v }));
bindSlider('fov', (v) => state.setOrbit({ fovDeg: v }));
bindSlider('time', (v) => state.setTime(v));

el<HTMLButtonElement>('add-keyframe').addEventListener('click', () => {
  state.addKeyframe();
  renderKeyframes();
  updateExportEnabled();
  refreshPreview();
});

el<HTMLButtonElement>('export').addEventListener('click', () => {
  downloadTrajectory(state.toTrajectoryDoc());
});

el<HTMLButtonElement>('save').addEventListener('click', () => {
  void putTrajectory(session, state.toTrajectoryDoc()).then(
    () => {
      banner.hidden = false;
      banner.textContent = `saved to session '${session}'`;
    },
    (err) => {
      banner.hidden = false;
      banner.textContent = String(err);
    },
  );
});

el<HTMLButtonElement>('load').addEventListener('click', () => {
  void getTrajectory(session).then(
    (doc: TrajectoryDoc) => {
      state.loadTrajectoryDoc(doc);
      renderKeyframes();
      updateExportEnabled();
      refreshPreview();
    },
    (err) => {
      banner.hidden = false;
      banner.textContent = String(err);
    },
  );
});

void health().then((ok) => {
  if (!ok) {
    banner.hidden = false;
    banner.textContent = 'preview service unreachable';
  }
});

updateExportEnabled();
renderKeyframes();
refreshPreview();
