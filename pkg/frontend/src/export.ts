// Trajectory export: validate against the CLI schema, then hand back the
// serialized document (and trigger a browser download when a DOM exists).

import { validateTrajectoryDoc } from './schema.js';
import type { TrajectoryDoc } from './types.js';

export function serializeTrajectory(doc: TrajectoryDoc): string {
  const errors = validateTrajectoryDoc(doc);
  if (errors.length > 0) {
    throw new Error(`trajectory failed validation: ${errors.join('; ')}`);
  }
  return JSON.stringify(doc, null, 2);
}

export function canExport(doc: TrajectoryDoc): boolean {
  return doc.keyframes.length >= 1 && validateTrajectoryDoc(doc).length === 0;
}

export function downloadTrajectory(doc: TrajectoryDoc, filename = 'trajectory.json'): void {
  const text = serializeTrajectory(doc);
  const blob = new Blob([text], { type: 'application/json' });
  const url = URL.createObjectURL(blob);
  const a = document.createElement('a');
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
