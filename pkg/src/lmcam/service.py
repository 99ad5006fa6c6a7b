"""Local HTTP endpoint backing the preview UI.

All geometry runs through the same library calls as the CLI, so a preview
request and a `lmcam condition` run with the same parameters produce
byte-identical images. Status codes: 400 for schema violations, 422 for
geometric failures (e.g. head behind camera), 404 for unknown sessions.
"""

import threading

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .camera import Intrinsics, Pose
from .config import style_from_config
from .errors import GeometryError, ToolkitError
from .landmarks import (
    LandmarkTemplate3D,
    default_template,
    load_landmark_template,
    project_landmarks,
)
from .raster import rasterize
from .trajectory import sample, trajectory_from_dict


def _bad(detail):
    return JSONResponse(status_code=400, content={"detail": detail})


def _resolve_template(spec):
    if spec in (None, "default"):
        return default_template()
    if isinstance(spec, dict) and "path" in spec:
        return load_landmark_template(spec["path"])
    if isinstance(spec, dict) and "points" in spec:
        import numpy as np

        pts = np.array([[p["x"], p["y"], p["z"]] for p in spec["points"]], dtype=float)
        groups = [p.get("group", "other") for p in spec["points"]]
        return LandmarkTemplate3D(pts, groups=groups,
                                  edges=spec.get("edges", ()))
    raise ValueError("template must be 'default', {'path': ...} or inline points")


def _resolve_pose(body):
    if "pose" in body:
        p = body["pose"]
        return Pose.look_at(p["center"], p["look_at"], p.get("up", [0, 1, 0]))
    raise KeyError("pose")


def _resolve_intrinsics(body, default_size=(512, 512)):
    k = body.get("intrinsics", {})
    w = int(k.get("width", default_size[0]))
    h = int(k.get("height", default_size[1]))
    if "fov_deg" in k or "fx" not in k:
        return Intrinsics.from_fov(float(k.get("fov_deg", 40.0)), w, h)
    return Intrinsics(fx=float(k["fx"]), fy=float(k["fy"]),
                      cx=float(k.get("cx", w / 2)), cy=float(k.get("cy", h / 2)),
                      width=w, height=h)


def create_app(static_dir=None):
    app = FastAPI(title="lmcam preview service", version=__version__)
    sessions = {}
    lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request, exc):
        return _bad(str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/project")
    async def project_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad("body must be JSON")
        try:
            template = _resolve_template(body.get("template"))
            pose = _resolve_pose(body)
            k = _resolve_intrinsics(body)
        except GeometryError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        except (ToolkitError, KeyError, TypeError, ValueError) as exc:
            return _bad(f"invalid request: {exc!r}")
        try:
            frame = project_landmarks(template, pose, k)
        except GeometryError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        points = [[None, None] if not frame.visibility[i]
                  else [frame.points[i, 0], frame.points[i, 1]]
                  for i in range(len(frame))]
        return {"points": points,
                "visibility": [bool(v) for v in frame.visibility]}

    @app.post("/condition")
    async def condition_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad("body must be JSON")
        try:
            template = _resolve_template(body.get("template"))
            traj = trajectory_from_dict(body["trajectory"])
            time_s = float(body.get("time", 0.0))
            if not 0.0 <= time_s <= 1.0:
                raise ValueError(f"time must lie in [0, 1], got {time_s}")
            size = body.get("size", {})
            w = int(size.get("w", traj.width))
            h = int(size.get("h", traj.height))
            style = style_from_config({"raster": body.get("style", {})})
            frames = int(body.get("frames", 81))
        except (ToolkitError, KeyError, TypeError, ValueError) as exc:
            return _bad(f"invalid request: {exc!r}")
        try:
            poses, intr = sample(traj, frames, width=w, height=h)
            idx = round(time_s * (frames - 1))
            frame = project_landmarks(template, poses[idx], intr[idx])
            cmap = rasterize(frame, style, w, h)
        except GeometryError as exc:
            return JSONResponse(status_code=422,
                                content={"detail": str(exc),
                                         "frame_index": getattr(exc, "frame_index", None)})
        return Response(content=cmap.to_png_bytes(), media_type="image/png")

    @app.get("/trajectory")
    def get_trajectory(session: str = None):
        if not session:
            return _bad("missing session id")
        with lock:
            doc = sessions.get(session)
        if doc is None:
            return JSONResponse(status_code=404,
                                content={"detail": f"unknown session {session!r}"})
        return doc

    @app.put("/trajectory")
    async def put_trajectory(request: Request, session: str = None):
        if not session:
            return _bad("missing session id")
        try:
            body = await request.json()
        except Exception:
            return _bad("body must be JSON")
        try:
            trajectory_from_dict(body)  # validate against the file schema
        except ToolkitError as exc:
            return _bad(f"invalid trajectory: {exc}")
        with lock:
            sessions[session] = body
        return {"ok": True, "session": session}

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
