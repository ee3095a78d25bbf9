"""Command-line interface: ``qpzoom resize | map-box | stats | bench``.

Exit codes: 0 success, 1 I/O or malformed input file, 2 invalid arguments or
out-of-domain input, 3 internal failure.  Errors are reported on stderr as
``{"error": ..., "code": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional

import numpy as np

from . import __version__
from .coord_map import map_box_forward, map_box_reverse
from .errors import InvalidArgumentError, OutOfDomainError, QPZoomError
from .geometry import Box, ContextMode
from .imageio import ImageFormatError, read_image, write_image
from .importance import score_grid
from .pipeline import (MODES, ZOOM, HyperParams, SizeRecord, jitter_prior,
                       make_search_patch, target_size_stats)
from .qp import assemble, solve
from .resample import warp
from .warp_grid import AxisMap, axis_maps, control_grid

EXIT_IO = 1
EXIT_ARGS = 2
EXIT_INTERNAL = 3


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message, EXIT_ARGS)


def fmt(obj) -> str:
    """JSON text with every float written with exactly six decimals."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return "%.6f" % obj
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {fmt(v)}" for k, v in obj.items()) + "}"
    return "[" + ", ".join(fmt(v) for v in obj) + "]"


def parse_box(text: str) -> Box:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise CLIError(f"box must be cx,cy,w,h; got {text!r}", EXIT_ARGS) from None
    if len(vals) != 4:
        raise CLIError(f"box must have 4 components, got {len(vals)}", EXIT_ARGS)
    return Box(*vals)


def _add_hyper(p: argparse.ArgumentParser) -> None:
    d = HyperParams()
    p.add_argument("--size", type=int, default=d.search_size, help="output patch side (pixels)")
    p.add_argument("--context-factor", type=float, default=d.context_factor)
    p.add_argument("--context-mode", choices=[m.value for m in ContextMode],
                   default=d.context_mode.value)
    p.add_argument("--gamma", type=float, default=d.gamma, help="zoom factor")
    p.add_argument("--beta", type=float, default=d.beta, help="importance bandwidth")
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="rigid energy weight")
    p.add_argument("--epsilon", type=float, default=d.epsilon)
    p.add_argument("--grid", type=int, default=d.grid, help="patches per axis")


def _hyper(args) -> HyperParams:
    return HyperParams(search_size=args.size, context_factor=args.context_factor,
                       context_mode=ContextMode(args.context_mode), grid=args.grid,
                       beta=args.beta, gamma=args.gamma, lam=args.lam, epsilon=args.epsilon)


def cmd_resize(args) -> int:
    hp = _hyper(args)
    prev = parse_box(args.prev_box)
    if args.jitter:
        rng = np.random.default_rng(args.seed)
        pw, ph = jitter_prior(prev.w, prev.h, hp, rng)
        prev = Box(prev.cx, prev.cy, pw, ph)
    frame = read_image(args.input)
    res = make_search_patch(frame, prev, hp, mode=args.mode)
    write_image(args.output, res.patch)
    if args.grid_out:
        grid = res.axis_map.to_json()
        grid["origin"] = list(res.crop_origin)
        with open(args.grid_out, "w") as fh:
            json.dump(grid, fh)
    print(fmt({"crop_origin": list(res.crop_origin), "crop_extent": list(res.crop_extent),
               "prior_on_crop": res.prior_on_crop.as_list(), "fallback": res.fallback}))
    return 0


def cmd_map_box(args) -> int:
    with open(args.grid) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CLIError(f"grid file is not JSON: {exc}", EXIT_IO) from None
    am = AxisMap.from_json(obj)
    box = parse_box(args.box)
    ox, oy = obj.get("origin", (0, 0)) if args.frame_coords else (0, 0)
    if args.direction == "forward":
        out = map_box_forward(box.shifted(-ox, -oy), am)
    else:
        out = map_box_reverse(box, am).shifted(ox, oy)
    print(fmt(out.as_list()))
    return 0


def read_sequence(path) -> List[SizeRecord]:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec = SizeRecord(Box(*map(float, obj["gt"])), Box(*map(float, obj["prior"])),
                                 float(obj["frame_w"]), float(obj["frame_h"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise CLIError(f"line {lineno}: malformed record ({exc})", EXIT_IO) from None
            records.append(rec)
    if not records:
        raise CLIError("empty sequence", EXIT_IO)
    return records


def cmd_stats(args) -> int:
    hp = _hyper(args)
    records = read_sequence(args.sequence)
    modes = MODES if args.mode == "both" else (args.mode,)
    for mode in modes:
        st = target_size_stats(records, hp, mode)
        print(fmt({"mode": mode, "avg": st.avg, "std": st.std, "n": st.n}))
    return 0


def run_bench(iters: int, source_size: int, hp: HyperParams, seed: int = 0):
    """Per-stage timings in milliseconds: ``{stage: array of samples}``."""
    rng = np.random.default_rng(seed)
    src = rng.random((source_size, source_size, 3))
    W = H = float(source_size)
    side = source_size / hp.context_factor
    prior = Box(W / 2, H / 2, side, side)

    def grid_stage():
        S = score_grid(prior, W, H, hp.grid, hp.grid, hp.beta, hp.epsilon)
        iv = solve(assemble(S, W, H, hp.zoom))
        return axis_maps(control_grid(iv, W, H), hp.search_size, hp.search_size)

    am = grid_stage()
    warp(src, am)  # warm-up
    clock = time.perf_counter
    samples = {"solve": [], "resize": [], "total": []}
    for _ in range(iters):
        t0 = clock()
        grid_stage()
        t1 = clock()
        warp(src, am)
        t2 = clock()
        warp(src, grid_stage())
        t3 = clock()
        samples["solve"].append((t1 - t0) * 1e3)
        samples["resize"].append((t2 - t1) * 1e3)
        samples["total"].append((t3 - t2) * 1e3)
    return {k: np.asarray(v) for k, v in samples.items()}


def cmd_bench(args) -> int:
    if args.iters < 1:
        raise CLIError("--iters must be >= 1", EXIT_ARGS)
    samples = run_bench(args.iters, args.source_size, _hyper(args), args.seed)
    for stage, ms in samples.items():
        print(fmt({"stage": stage, "median_ms": float(np.median(ms)),
                   "p95_ms": float(np.percentile(ms, 95)), "iters": len(ms)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qpzoom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("resize", help="crop around a box and resize non-uniformly")
    r.add_argument("--input", required=True)
    r.add_argument("--output", required=True)
    r.add_argument("--prev-box", required=True, help="cx,cy,w,h in frame pixels")
    r.add_argument("--mode", choices=MODES, default=ZOOM)
    r.add_argument("--grid-out", help="write the axis-map grid JSON here")
    r.add_argument("--seed", type=int, default=0, help="seed for --jitter")
    r.add_argument("--jitter", action="store_true",
                   help="jitter the prior size as done when generating training patches")
    _add_hyper(r)
    r.set_defaults(func=cmd_resize)

    m = sub.add_parser("map-box", help="map a box between crop and patch coordinates")
    m.add_argument("--grid", required=True, help="grid JSON written by resize --grid-out")
    m.add_argument("--box", required=True, help="cx,cy,w,h")
    m.add_argument("--direction", choices=("forward", "reverse"), default="forward")
    m.add_argument("--frame-coords", action="store_true",
                   help="crop-side box is in frame pixels (uses the grid's origin)")
    m.set_defaults(func=cmd_map_box)

    s = sub.add_parser("stats", help="target size statistics over a JSONL sequence")
    s.add_argument("--sequence", required=True)
    s.add_argument("--mode", choices=MODES + ("both",), default="both")
    _add_hyper(s)
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("bench", help="time grid solving and resizing")
    b.add_argument("--iters", type=int, default=100)
    b.add_argument("--source-size", type=int, default=640)
    b.add_argument("--seed", type=int, default=0)
    _add_hyper(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CLIError as exc:
        code, msg = exc.code, str(exc)
    except (ImageFormatError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        code, msg = EXIT_IO, str(exc)
    except OSError as exc:
        code, msg = EXIT_IO, str(exc)
    except (InvalidArgumentError, OutOfDomainError) as exc:
        code, msg = EXIT_ARGS, str(exc)
    except QPZoomError as exc:
        code, msg = EXIT_INTERNAL, str(exc)
    except Exception as exc:  # noqa: BLE001 - last-resort reporting
        code, msg = EXIT_INTERNAL, f"{type(exc).__name__}: {exc}"
    sys.stderr.write(json.dumps({"error": msg, "code": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
