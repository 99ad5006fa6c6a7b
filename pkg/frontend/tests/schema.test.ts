import { describe, expect, it } from 'vitest';

import { serializeTrajectory, canExport } from '../src/export.js';
import { validateTrajectoryDoc } from '../src/schema.js';
import type { TrajectoryDoc } from '../src/types.js';

function goodDoc(): TrajectoryDoc {
  return {
    image: { w: 512, h: 512 },
    keyframes: [
      { time: 0, center: [0, 0, 2], look_at: [0, 0, 0], up: [0, 1, 0], fov_deg: 40 },
      { time: 1, center: [-1, 0, 1.73], look_at: [0, 0, 0], up: [0, 1, 0], fov_deg: 40 },
    ],
  };
}

describe('trajectory schema validation', () => {
  it('accepts a well-formed document', () => {
    expect(validateTrajectoryDoc(goodDoc())).toEqual([]);
    expect(canExport(goodDoc())).toBe(true);
  });

  it('rejects empty keyframes', () => {
    const doc = { ...goodDoc(), keyframes: [] };
    expect(validateTrajectoryDoc(doc).length).toBeGreaterThan(0);
    expect(canExport(doc)).toBe(false);
  });

  it('rejects non-increasing times', () => {
    const doc = goodDoc();
    doc.keyframes[1].time = 0;
    expect(validateTrajectoryDoc(doc).some((e) => e.includes('strictly increasing'))).toBe(true);
  });

  it('rejects out-of-range fov and bad vectors', () => {
    const doc = goodDoc();
    doc.keyframes[0].fov_deg = 200;
    (doc.keyframes[1] as unknown as { center: number[] }).center = [1, 2];
    const errors = validateTrajectoryDoc(doc);
    expect(errors.some((e) => e.includes('fov_deg'))).toBe(true);
    expect(errors.some((e) => e.includes('center'))).toBe(true);
  });

  it('rejects a camera sitting on its own target', () => {
    const doc = goodDoc();
    doc.keyframes[0].center = [0, 0, 0];
    expect(validateTrajectoryDoc(doc).some((e) => e.includes('coincides'))).toBe(true);
  });

  it('serializeTrajectory throws on invalid documents', () => {
    const doc = { ...goodDoc(), keyframes: [] };
    expect(() => serializeTrajectory(doc)).toThrow(/validation/);
    expect(() => serializeTrajectory(goodDoc())).not.toThrow();
  });
});
