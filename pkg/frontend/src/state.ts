// ViewState store: current orbit parameters, scrub time, and the keyframe
// timeline. Keyframe edits always preserve strictly increasing times
// (inserts merge onto an existing slot, drags clamp between neighbors).

import { orbitToKeyframe } from './orbit.js';
import type { Keyframe, OrbitParams, TrajectoryDoc, ViewStateSnapshot } from './types.js';

export const MIN_TIME_GAP = 1e-3;

export class ViewState {
  orbit: OrbitParams = { azimuthDeg: 0, elevationDeg: 0, distance: 2, fovDeg: 40 };
  time = 0;
  imageW = 512;
  imageH = 512;
  private keyframes: Keyframe[] = [];

  snapshot(): ViewStateSnapshot {
    return {
      orbit: { ...this.orbit },
      time: this.time,
      imageW: this.imageW,
      imageH: this.imageH,
      keyframes: this.keyframes.map((k) => ({ ...k })),
    };
  }

  listKeyframes(): readonly Keyframe[] {
    return this.keyframes;
  }

  setOrbit(partial: Partial<OrbitParams>): void {
    this.orbit = { ...this.orbit, ...partial };
  }

  setTime(t: number): void {
    this.time = Math.min(1, Math.max(0, t));
  }

  // Capture the current orbit as a keyframe at the current scrub time.
  // A keyframe closer than MIN_TIME_GAP is replaced instead of duplicated.
  addKeyframe(): Keyframe {
    const kf = orbitToKeyframe(this.orbit, this.time);
    const existing = this.keyframes.findIndex(
      (k) => Math.abs(k.time - kf.time) < MIN_TIME_GAP,
    );
    if (existing >= 0) {
      this.keyframes[existing] = kf;
    } else {
      this.keyframes.push(kf);
      this.keyframes.sort((a, b) => a.time - b.time);
    }
    return kf;
  }

  removeKeyframe(index: number): void {
    this.keyframes.splice(index, 1);
  }

  // Drag a keyframe along the timeline; the new time clamps strictly
  // between its neighbors so ordering can never invert.
  moveKeyframe(index: number, newTime: number): number {
    if (index < 0 || index >= this.keyframes.length) throw new Error('no such keyframe');
    const lo = index > 0 ? this.keyframes[index - 1].time + MIN_TIME_GAP : 0;
    const hi = index < this.keyframes.length - 1
      ? this.keyframes[index + 1].time - MIN_TIME_GAP
      : 1;
    const clamped = Math.min(hi, Math.max(lo, newTime));
    this.keyframes[index] = { ...this.keyframes[index], time: clamped };
    return clamped;
  }

  // Single-keyframe document for the live preview of the current orbit.
  previewDoc(): TrajectoryDoc {
    return {
      image: { w: this.imageW, h: this.imageH },
      keyframes: [orbitToKeyframe(this.orbit, 0)],
    };
  }

  toTrajectoryDoc(): TrajectoryDoc {
    return {
      image: { w: this.imageW, h: this.imageH },
      keyframes: this.keyframes.map((k) => ({ ...k })),
    };
  }

  loadTrajectoryDoc(doc: TrajectoryDoc): void {
    this.imageW = doc.image.w;
    this.imageH = doc.image.h;
    this.keyframes = doc.keyframes
      .map((k) => ({ ...k }))
      .sort((a, b) => a.time - b.time);
  }
}
