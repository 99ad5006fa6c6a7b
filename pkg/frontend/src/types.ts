// Mirrors the trajectory JSON schema consumed by the CLI and service.

export type Vec3 = [number, number, number];

export interface Keyframe {
  time: number;
  center: Vec3;
  look_at: Vec3;
  up: Vec3;
  fov_deg: number;
}

export interface TrajectoryDoc {
  image: { w: number; h: number };
  keyframes: Keyframe[];
}

// Orbit parameters the user actually edits; converted to look-at keyframes
// before anything leaves the client.
export interface OrbitParams {
  azimuthDeg: number;
  elevationDeg: number;
  distance: number;
  fovDeg: number;
}

export interface ViewStateSnapshot {
  orbit: OrbitParams;
  time: number; // current scrub position in [0, 1]
  imageW: number;
  imageH: number;
  keyframes: Keyframe[];
}
