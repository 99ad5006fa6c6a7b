// Thin client over the preview service. The UI never rasterizes anything
// itself: every displayed condition map is the exact bytes this module
// fetched from POST /condition.

import type { TrajectoryDoc } from './types.js';

export const API_BASE = '';

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function raiseFor(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ServiceError(res.status, detail);
}

export async function health(base = API_BASE): Promise<boolean> {
  try {
    const res = await fetch(`${base}/health`);
    return res.ok;
  } catch {
    return false;
  }
}

export interface ConditionRequest {
  template?: string;
  trajectory: TrajectoryDoc;
  time?: number;
  frames?: number;
  size?: { w: number; h: number };
}

export async function fetchConditionMap(
  req: ConditionRequest,
  base = API_BASE,
  signal?: AbortSignal,
): Promise<Blob> {
  const res = await fetch(`${base}/condition`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify({ template: 'default', time: 0, ...req }),
    signal,
  });
  if (!res.ok) await raiseFor(res);
  return res.blob();
}

export async function putTrajectory(
  session: string,
  doc: TrajectoryDoc,
  base = API_BASE,
): Promise<void> {
  const res = await fetch(
    `${base}/trajectory?session=${encodeURIComponent(session)}`,
    {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(doc),
    },
  );
  if (!res.ok) await raiseFor(res);
}

export async function getTrajectory(
  session: string,
  base = API_BASE,
): Promise<TrajectoryDoc> {
  const res = await fetch(`${base}/trajectory?session=${encodeURIComponent(session)}`);
  if (!res.ok) await raiseFor(res);
  return res.json();
}
