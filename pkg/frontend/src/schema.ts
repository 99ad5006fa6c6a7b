// Hand-rolled validation of the trajectory document schema. Mirrors the
// checks the CLI performs on load, so anything that validates here is
// accepted unmodified by `lmcam trajectory sample` and `lmcam condition`.

import type { Keyframe, TrajectoryDoc } from './types.js';

function isVec3(v: unknown): v is [number, number, number] {
  return Array.isArray(v) && v.length === 3 && v.every((x) => Number.isFinite(x));
}

export function validateKeyframe(kf: unknown, index: number): string[] {
  const errors: string[] = [];
  const k = kf as Partial<Keyframe>;
  if (typeof k !== 'object' || k === null) return [`keyframe ${index} is not an object`];
  if (!Number.isFinite(k.time) || k.time! < 0 || k.time! > 1) {
    errors.push(`keyframe ${index}: time must lie in [0, 1]`);
  }
  for (const field of ['center', 'look_at', 'up'] as const) {
    if (!isVec3(k[field])) errors.push(`keyframe ${index}: ${field} must be a finite 3-vector`);
  }
  if (!Number.isFinite(k.fov_deg) || k.fov_deg! < 1 || k.fov_deg! > 179) {
    errors.push(`keyframe ${index}: fov_deg must lie in [1, 179]`);
  }
  if (isVec3(k.center) && isVec3(k.look_at)) {
    const d = Math.hypot(
      k.center[0] - k.look_at[0],
      k.center[1] - k.look_at[1],
      k.center[2] - k.look_at[2],
    );
    if (d < 1e-12) errors.push(`keyframe ${index}: center coincides with look_at`);
  }
  return errors;
}

export function validateTrajectoryDoc(doc: unknown): string[] {
  const errors: string[] = [];
  const d = doc as Partial<TrajectoryDoc>;
  if (typeof d !== 'object' || d === null) return ['document is not an object'];
  if (!d.image || !Number.isInteger(d.image.w) || !Number.isInteger(d.image.h)
    || d.image.w! <= 0 || d.image.h! <= 0) {
    errors.push('image must carry positive integer w and h');
  }
  if (!Array.isArray(d.keyframes) || d.keyframes.length === 0) {
    errors.push('keyframes must be a non-empty array');
    return errors;
  }
  d.keyframes.forEach((kf, i) => errors.push(...validateKeyframe(kf, i)));
  for (let i = 1; i < d.keyframes.length; i++) {
    const prev = (d.keyframes[i - 1] as Keyframe).time;
    const cur = (d.keyframes[i] as Keyframe).time;
    if (!(cur > prev)) errors.push(`keyframe ${i}: times must be strictly increasing`);
  }
  return errors;
}
