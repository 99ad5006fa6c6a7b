// Orbit-parameter authoring: azimuth/elevation/distance around the head at
// the origin, converted to the look-at keyframes the service understands.
//
// Conventions match the backend: azimuth 0 faces the head from +z, positive
// azimuth moves the camera to its right (+x), positive elevation raises it.

import type { Keyframe, OrbitParams, Vec3 } from './types.js';

const DEG = Math.PI / 180;

export function orbitCenter(p: OrbitParams): Vec3 {
  const az = p.azimuthDeg * DEG;
  const el = p.elevationDeg * DEG;
  return [
    p.distance * Math.cos(el) * Math.sin(az),
    p.distance * Math.sin(el),
    p.distance * Math.cos(el) * Math.cos(az),
  ];
}

export function orbitToKeyframe(p: OrbitParams, time: number): Keyframe {
  if (p.distance <= 0) throw new Error('distance must be positive');
  if (p.fovDeg < 1 || p.fovDeg > 179) throw new Error('fov must lie in [1, 179]');
  if (Math.abs(p.elevationDeg) >= 90) throw new Error('elevation must stay within (-90, 90)');
  return {
    time,
    center: orbitCenter(p),
    look_at: [0, 0, 0],
    up: [0, 1, 0],
    fov_deg: p.fovDeg,
  };
}

// Inverse of orbitToKeyframe for keyframes authored by this UI (origin
// look-at, y-up); lets the timeline re-load its own exports.
export function keyframeToOrbit(kf: Keyframe): OrbitParams {
  const [x, y, z] = kf.center;
  const distance = Math.hypot(x, y, z);
  return {
    azimuthDeg: Math.atan2(x, z) / DEG,
    elevationDeg: Math.asin(y / distance) / DEG,
    distance,
    fovDeg: kf.fov_deg,
  };
}
