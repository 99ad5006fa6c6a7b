"""Command line surface.

Exit codes: 0 ok, 2 usage, 3 schema/data, 4 geometry, 5 I/O. Every command
that writes an output directory drops a provenance.json there with the
resolved arguments and all drawn random parameters, sufficient to reproduce
the run.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import clipio, datagen, evalharness, landmarks, oracle, trajectory
from .config import default_seed, load_config, style_from_config, thresholds_from_config
from .errors import IOFailure, SchemaError, ToolkitError
from .raster import RasterStyle


def _parse_size(text):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise SchemaError(f"size must look like 512x512, got {text!r}") from exc


def _resolve_template(ref):
    if ref in (None, "default"):
        return landmarks.default_template()
    if not os.path.exists(ref):
        raise IOFailure(f"template file not found: {ref}")
    return landmarks.load_landmark_template(ref)


def _write_provenance(out_dir, command, args_dict, drawn=None):
    doc = {"command": command, "args": args_dict}
    if drawn is not None:
        doc["drawn"] = drawn
    clipio.write_provenance(doc, out_dir)


def _write_condition_maps(maps, out_dir, fps=30.0):
    os.makedirs(out_dir, exist_ok=True)
    for i, cmap in enumerate(maps):
        path = os.path.join(out_dir, clipio.FRAME_PATTERN.format(i))
        with open(path, "wb") as fh:
            fh.write(cmap.to_png_bytes())
    sidecar = {"width": maps[0].width, "height": maps[0].height,
               "fps": fps, "count": len(maps)}
    with open(os.path.join(out_dir, "clip.json"), "w") as fh:
        json.dump(sidecar, fh)


# -- trajectory -----------------------------------------------------------------

def cmd_trajectory_gen(args):
    base = trajectory.default_base_keyframe(distance=args.distance, fov_deg=args.fov)
    w, h = _parse_size(args.size)
    traj = trajectory.canonical_trajectory(
        args.motion, base, frames=args.frames, magnitude=args.magnitude,
        width=w, height=h)
    trajectory.save_trajectory(traj, args.out)
    print(f"wrote {args.out} ({len(traj.keyframes)} keyframes)")
    return 0


def cmd_trajectory_sample(args):
    traj = trajectory.load_trajectory(args.traj)
    poses, intr = trajectory.sample(traj, args.frames)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame"] + [f"r{i}{j}" for i in range(3) for j in range(3)]
                        + ["tx", "ty", "tz", "fx", "fy", "cx", "cy"])
        for i, (pose, k) in enumerate(zip(poses, intr)):
            row = ([i] + [repr(float(v)) for v in pose.rotation.matrix.ravel()]
                   + [repr(float(v)) for v in pose.translation]
                   + [repr(float(v)) for v in (k.fx, k.fy, k.cx, k.cy)])
            writer.writerow(row)
    print(f"wrote {args.out} ({len(poses)} poses)")
    return 0


# -- condition maps ---------------------------------------------------------------

def cmd_condition(args):
    cfg = load_config(args.config)
    style = style_from_config(cfg)
    template = _resolve_template(args.template)
    traj = trajectory.load_trajectory(args.traj)
    w, h = _parse_size(args.size) if args.size else (traj.width, traj.height)
    frames = args.frames if args.frames else 81
    maps = landmarks.condition_sequence(template, traj, w, h, style, frames)
    _write_condition_maps(maps, args.out)
    _write_provenance(args.out, "condition", {
        "template": args.template or "default", "traj": args.traj,
        "size": [w, h], "frames": frames, "config": args.config,
    })
    print(f"wrote {frames} condition maps to {args.out}")
    return 0


# -- datagen ----------------------------------------------------------------------

def cmd_datagen_augment(args):
    src = clipio.read_clip(args.source)
    tgt = clipio.read_clip(args.target)
    src_masks = clipio.read_masks(args.source_masks, len(src))
    tgt_masks = clipio.read_masks(args.target_masks, len(tgt))
    (out_src, out_tgt), prov = datagen.scale_color_augment(
        src, tgt, src_masks, tgt_masks, seed=args.seed)
    clipio.write_clip(out_src, os.path.join(args.out, "source"))
    clipio.write_clip(out_tgt, os.path.join(args.out, "target"))
    _write_provenance(args.out, "datagen augment", {
        "source": args.source, "target": args.target, "seed": args.seed,
    }, drawn=prov)
    print(f"wrote augmented pair to {args.out}")
    return 0


def cmd_datagen_zoom(args):
    clip = clipio.read_clip(args.clip)
    out, prov = datagen.synthetic_zoom(clip, s_start=args.s_start,
                                       s_end=args.s_end, seed=args.seed)
    clipio.write_clip(out, args.out)
    _write_provenance(args.out, "datagen zoom",
                      {"clip": args.clip, "seed": args.seed}, drawn=prov)
    print(f"wrote zoomed clip to {args.out}")
    return 0


def cmd_datagen_pan(args):
    clip = clipio.read_clip(args.clip)
    o_start = (args.ox_start, args.oy_start) if args.ox_start is not None else None
    o_end = (args.ox_end, args.oy_end) if args.ox_end is not None else None
    out, prov = datagen.synthetic_pan(clip, o_start=o_start, o_end=o_end,
                                      seed=args.seed)
    clipio.write_clip(out, args.out)
    _write_provenance(args.out, "datagen pan",
                      {"clip": args.clip, "seed": args.seed}, drawn=prov)
    print(f"wrote panned clip to {args.out}")
    return 0


def cmd_datagen_stitch(args):
    clips = [clipio.read_clip(d) for d in args.clips]
    out, prov = datagen.multishot_stitch(clips, seed=args.seed, k_max=args.k_max)
    clipio.write_clip(out, args.out)
    _write_provenance(args.out, "datagen stitch",
                      {"clips": args.clips, "seed": args.seed}, drawn=prov)
    print(f"wrote stitched clip ({len(out)} frames) to {args.out}")
    return 0


# -- oracle -----------------------------------------------------------------------

def _render_to_dir(scene, poses, intr, style, out_dir, motion=None,
                   traj=None, extra_meta=None):
    maps, lm_frames, head_poses = oracle.render_trajectory(scene, poses, intr, style)
    os.makedirs(out_dir, exist_ok=True)
    _write_condition_maps(maps, os.path.join(out_dir, "frames"))
    k = intr[0]
    landmarks.save_landmark_frames(lm_frames, k.width, k.height,
                                   os.path.join(out_dir, "landmarks.json"))
    view = oracle.RenderedView(maps=tuple(maps), frames=tuple(lm_frames),
                               head_poses=tuple(head_poses),
                               camera_pose=poses[0], intrinsics=k)
    with open(os.path.join(out_dir, "ground_truth.json"), "w") as fh:
        json.dump(oracle.ground_truth_dict(view, scene), fh)
    if traj is not None:
        trajectory.save_trajectory(traj, os.path.join(out_dir, "trajectory.json"))
    meta = {"frames": len(scene), "width": k.width, "height": k.height}
    if motion is not None:
        meta["motion"] = trajectory.CanonicalMotion.parse(motion).value
    if extra_meta:
        meta.update(extra_meta)
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh)


def cmd_oracle_sweep(args):
    cfg = load_config(args.config)
    style = style_from_config(cfg)
    head = oracle.make_head(seed=args.seed, m=args.landmarks)
    os.makedirs(args.out, exist_ok=True)
    landmarks.save_landmark_template(head.template,
                                     os.path.join(args.out, "template.json"))
    base = trajectory.default_base_keyframe(distance=args.distance, fov_deg=args.fov)
    magnitudes = {"pan": args.pan, "zoom": args.zoom, "arc": args.arc}
    for motion in trajectory.CanonicalMotion:
        mag = magnitudes[motion.value.split("_")[0]]
        traj = trajectory.canonical_trajectory(
            motion, base, frames=args.frames, magnitude=mag,
            width=args.size, height=args.size)
        poses, intr = trajectory.sample(traj, args.frames,
                                        width=args.size, height=args.size)
        scene = oracle.animate(head, f=args.frames,
                               yaw_amp_deg=args.head_yaw, jaw_amp=args.jaw)
        _render_to_dir(scene, poses, intr, style,
                       os.path.join(args.out, motion.value), motion=motion,
                       traj=traj, extra_meta={"magnitude": mag})
        print(f"rendered {motion.value}")
    _write_provenance(args.out, "oracle sweep", vars_dict(args))
    return 0


def cmd_oracle_rig(args):
    cfg = load_config(args.config)
    style = style_from_config(cfg)
    head = oracle.make_head(seed=args.seed, m=args.landmarks)
    rig = oracle.make_rig(n=args.views, radius=args.distance,
                          elevation_deg=args.elevation, fov_deg=args.fov,
                          width=args.size, height=args.size)
    scene = oracle.animate(head, f=args.frames, yaw_amp_deg=args.head_yaw,
                           pitch_amp_deg=args.head_pitch, jaw_amp=args.jaw,
                           brow_amp=args.brow, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    landmarks.save_landmark_template(head.template,
                                     os.path.join(args.out, "template.json"))
    rig_doc = []
    for i, (pose, k) in enumerate(rig.cameras):
        view_dir = os.path.join(args.out, f"view_{i:02d}")
        poses = [pose] * len(scene)
        intr = [k] * len(scene)
        _render_to_dir(scene, poses, intr, style, view_dir)
        rig_doc.append({
            "view": i,
            "rotation": pose.rotation.matrix.tolist(),
            "translation": pose.translation.tolist(),
        })
        print(f"rendered view {i}")
    with open(os.path.join(args.out, "rig.json"), "w") as fh:
        json.dump({"radius": rig.radius, "elevation_deg": rig.elevation_deg,
                   "cameras": rig_doc}, fh)
    _write_provenance(args.out, "oracle rig", vars_dict(args))
    return 0


def cmd_oracle_render(args):
    cfg = load_config(args.config)
    style = style_from_config(cfg)
    head = oracle.make_head(seed=args.seed, m=args.landmarks)
    traj = trajectory.load_trajectory(args.traj)
    poses, intr = trajectory.sample(traj, args.frames)
    scene = oracle.animate(head, f=args.frames, yaw_amp_deg=args.head_yaw,
                           jaw_amp=args.jaw)
    os.makedirs(args.out, exist_ok=True)
    landmarks.save_landmark_template(head.template,
                                     os.path.join(args.out, "template.json"))
    _render_to_dir(scene, poses, intr, style, args.out, motion=args.motion,
                   traj=traj)
    _write_provenance(args.out, "oracle render", vars_dict(args))
    print(f"rendered {args.frames} frames to {args.out}")
    return 0


# -- eval -------------------------------------------------------------------------

def _eval_one_video(video_dir, template, thresholds, condition_dir=None):
    frames, w, h = landmarks.load_landmark_frames(
        os.path.join(video_dir, "landmarks.json"))
    with open(os.path.join(video_dir, "meta.json")) as fh:
        meta = json.load(fh)
    with open(os.path.join(video_dir, "ground_truth.json")) as fh:
        gt = json.load(fh)
    ki = gt["intrinsics"]
    from .camera import Intrinsics

    k = Intrinsics(fx=ki["fx"], fy=ki["fy"], cx=ki["cx"], cy=ki["cy"],
                   width=ki["width"], height=ki["height"])
    rules = evalharness.default_rules(**{
        "tau_px": thresholds["tau_px"], "tau_deg": thresholds["tau_deg"],
        "tau_scale": thresholds["tau_scale"]})
    delta = evalharness.head_pose_delta(frames[0], frames[-1], template, k)
    entry = {
        "video": os.path.basename(video_dir),
        "delta": {
            "yaw_deg": delta.yaw_deg, "pitch_deg": delta.pitch_deg,
            "roll_deg": delta.roll_deg, "du_px": delta.du_px,
            "dv_px": delta.dv_px, "scale_log": delta.scale_log,
        },
    }
    motion = meta.get("motion")
    if motion:
        m = trajectory.CanonicalMotion.parse(motion)
        entry["motion"] = m.value
        entry["label"] = evalharness.correctness_label(delta, m, rules)
        entry["opposite_label"] = evalharness.correctness_label(delta, m.opposite, rules)
    if condition_dir is not None and os.path.isdir(condition_dir):
        rendered = clipio.read_clip(os.path.join(video_dir, "frames"))
        reference = clipio.read_clip(condition_dir)
        entry["psnr_db"] = evalharness.psnr(rendered, reference)
        entry["ssim"] = evalharness.ssim(rendered, reference)
    return entry


def cmd_eval_motions(args):
    cfg = load_config(args.config)
    thresholds = thresholds_from_config(cfg)
    if args.tau_px is not None:
        thresholds["tau_px"] = args.tau_px
    if args.tau_deg is not None:
        thresholds["tau_deg"] = args.tau_deg
    dataset = args.dataset
    if os.path.exists(os.path.join(dataset, "meta.json")):
        video_dirs = [dataset]
        template = landmarks.load_landmark_template(
            os.path.join(dataset, "template.json"))
    else:
        video_dirs = sorted(
            os.path.join(dataset, d) for d in os.listdir(dataset)
            if os.path.isdir(os.path.join(dataset, d))
            and os.path.exists(os.path.join(dataset, d, "meta.json")))
        template = landmarks.load_landmark_template(
            os.path.join(dataset, "template.json"))
    if not video_dirs:
        raise IOFailure(f"no evaluable videos under {dataset}")
    videos = []
    for vd in video_dirs:
        cond = (os.path.join(args.condition_root, os.path.basename(vd))
                if args.condition_root else None)
        videos.append(_eval_one_video(vd, template, thresholds, cond))
    labeled = [v for v in videos if "label" in v]
    report = {
        "videos": videos,
        "thresholds": thresholds,
        "aggregate": {},
        "external": {"lpips": "external: not computed",
                     "arcface": "external: not computed",
                     "vbench": "external: not computed"},
    }
    if labeled:
        report["aggregate"]["camera_correctness_pct"] = 100.0 * float(
            np.mean([v["label"] for v in labeled]))
        report["aggregate"]["opposite_label_pct"] = 100.0 * float(
            np.mean([v["opposite_label"] for v in labeled]))
    with_metrics = [v for v in videos if "psnr_db" in v]
    if with_metrics:
        report["aggregate"]["mean_psnr_db"] = float(
            np.mean([v["psnr_db"] for v in with_metrics]))
        report["aggregate"]["mean_ssim"] = float(
            np.mean([v["ssim"] for v in with_metrics]))
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2)
    agg = report["aggregate"]
    print(f"wrote {args.report}: " + ", ".join(f"{k}={v:.2f}" for k, v in agg.items()))
    return 0


def cmd_eval_compare(args):
    a = clipio.read_clip(args.a)
    b = clipio.read_clip(args.b)
    report = {
        "a": args.a, "b": args.b,
        "psnr_db": evalharness.psnr(a, b),
        "psnr_per_frame_db": [v if v != float("inf") else "inf"
                              for v in evalharness.psnr_frames(a, b)],
        "ssim": evalharness.ssim(a, b),
        "ssim_per_frame": evalharness.ssim_frames(a, b),
    }
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"wrote {args.report}: psnr={report['psnr_db']:.2f} dB "
          f"ssim={report['ssim']:.4f}")
    return 0


# -- service ----------------------------------------------------------------------

def cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def vars_dict(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def build_parser():
    p = argparse.ArgumentParser(prog="lmcam",
                                description="landmark-based camera toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    tp = sub.add_parser("trajectory", help="author and sample camera paths")
    tsub = tp.add_subparsers(dest="subcommand", required=True)
    tg = tsub.add_parser("gen", help="generate a canonical-motion trajectory")
    tg.add_argument("--motion", required=True)
    tg.add_argument("--magnitude", type=float, default=None)
    tg.add_argument("--frames", type=int, default=81)
    tg.add_argument("--distance", type=float, default=2.0)
    tg.add_argument("--fov", type=float, default=40.0)
    tg.add_argument("--size", default="512x512")
    tg.add_argument("--out", required=True)
    tg.set_defaults(func=cmd_trajectory_gen)
    ts = tsub.add_parser("sample", help="expand a trajectory to per-frame poses")
    ts.add_argument("--traj", required=True)
    ts.add_argument("--frames", type=int, default=81)
    ts.add_argument("--out", required=True)
    ts.set_defaults(func=cmd_trajectory_sample)

    cp = sub.add_parser("condition", help="render landmark condition maps")
    cp.add_argument("--template", default="default")
    cp.add_argument("--traj", required=True)
    cp.add_argument("--size", default=None)
    cp.add_argument("--frames", type=int, default=None)
    cp.add_argument("--config", default=None)
    cp.add_argument("--out", required=True)
    cp.set_defaults(func=cmd_condition)

    dp = sub.add_parser("datagen", help="seeded video augmentation")
    dsub = dp.add_subparsers(dest="subcommand", required=True)
    da = dsub.add_parser("augment", help="scale + shared background color")
    da.add_argument("--source", required=True)
    da.add_argument("--target", required=True)
    da.add_argument("--source-masks", required=True)
    da.add_argument("--target-masks", required=True)
    da.add_argument("--seed", type=int, default=None)
    da.add_argument("--out", required=True)
    da.set_defaults(func=cmd_datagen_augment)
    dz = dsub.add_parser("zoom", help="linear synthetic zoom")
    dz.add_argument("--clip", required=True)
    dz.add_argument("--s-start", type=float, default=None)
    dz.add_argument("--s-end", type=float, default=None)
    dz.add_argument("--seed", type=int, default=None)
    dz.add_argument("--out", required=True)
    dz.set_defaults(func=cmd_datagen_zoom)
    dn = dsub.add_parser("pan", help="linear synthetic pan")
    dn.add_argument("--clip", required=True)
    dn.add_argument("--ox-start", type=float, default=None)
    dn.add_argument("--oy-start", type=float, default=0.0)
    dn.add_argument("--ox-end", type=float, default=None)
    dn.add_argument("--oy-end", type=float, default=0.0)
    dn.add_argument("--seed", type=int, default=None)
    dn.add_argument("--out", required=True)
    dn.set_defaults(func=cmd_datagen_pan)
    dst = dsub.add_parser("stitch", help="multi-shot stitching")
    dst.add_argument("--clips", nargs="+", required=True)
    dst.add_argument("--seed", type=int, default=None)
    dst.add_argument("--k-max", type=int, default=4)
    dst.add_argument("--out", required=True)
    dst.set_defaults(func=cmd_datagen_stitch)

    op = sub.add_parser("oracle", help="synthetic ground-truth datasets")
    osub = op.add_subparsers(dest="subcommand", required=True)
    for name, fn in (("sweep", cmd_oracle_sweep), ("rig", cmd_oracle_rig),
                     ("render", cmd_oracle_render)):
        o = osub.add_parser(name)
        o.add_argument("--out", required=True)
        o.add_argument("--seed", type=int, default=None)
        o.add_argument("--landmarks", type=int, default=68)
        o.add_argument("--frames", type=int, default=81)
        o.add_argument("--size", type=int, default=256)
        o.add_argument("--fov", type=float, default=40.0)
        o.add_argument("--distance", type=float, default=2.0)
        o.add_argument("--head-yaw", type=float, default=0.0)
        o.add_argument("--jaw", type=float, default=0.0)
        o.add_argument("--config", default=None)
        if name == "sweep":
            o.add_argument("--pan", type=float, default=0.25)
            o.add_argument("--zoom", type=float, default=1.25)
            o.add_argument("--arc", type=float, default=30.0)
        if name == "rig":
            o.add_argument("--views", type=int, default=16)
            o.add_argument("--elevation", type=float, default=15.0)
            o.add_argument("--head-pitch", type=float, default=0.0)
            o.add_argument("--brow", type=float, default=0.0)
        if name == "render":
            o.add_argument("--traj", required=True)
            o.add_argument("--motion", default=None)
        o.set_defaults(func=fn)

    ep = sub.add_parser("eval", help="camera-correctness and image metrics")
    esub = ep.add_subparsers(dest="subcommand", required=True)
    em = esub.add_parser("motions", help="label intended motions")
    em.add_argument("--dataset", required=True)
    em.add_argument("--report", required=True)
    em.add_argument("--condition-root", default=None)
    em.add_argument("--tau-px", type=float, default=None)
    em.add_argument("--tau-deg", type=float, default=None)
    em.add_argument("--config", default=None)
    em.set_defaults(func=cmd_eval_motions)
    ec = esub.add_parser("compare", help="PSNR/SSIM between two clips")
    ec.add_argument("--a", required=True)
    ec.add_argument("--b", required=True)
    ec.add_argument("--report", required=True)
    ec.set_defaults(func=cmd_eval_compare)

    sp = sub.add_parser("serve", help="local HTTP endpoint for the preview UI")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8750)
    sp.add_argument("--static-dir", default=None)
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = default_seed()
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
