"""Landmark-based camera toolkit.

Subpackages:
  camera     - pinhole model, poses, intrinsics, quaternions
  epipolar   - two-view geometry: F/E estimation, RANSAC, PnP, triangulation
  landmarks  - 3D landmark templates, projection, condition-map rasterization
  trajectory - keyframe camera paths and the canonical test motions
  datagen    - seeded video augmentation (scale/color, zoom, pan, stitching)
  oracle     - procedural multi-view head rig with exact ground truth
  evalharness- head-pose-delta correctness labeling and PSNR/SSIM
  cli        - command-line surface
  service    - local HTTP endpoint backing the preview UI
"""

__version__ = "0.1.0"
