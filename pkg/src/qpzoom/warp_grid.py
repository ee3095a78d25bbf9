"""Control grid from solved intervals, and the separable resize mapping it defines.

With the axis-alignment constraint every control-grid row shares one y and
every column one x, so bilinear interpolation of the grid collapses into two
independent piecewise-linear functions, one per axis.  Those two functions
are the canonical form of the mapping; the dense per-pixel grid is only
materialized on request.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDeformationError, InvalidArgumentError, OutOfDomainError
from .qp import Intervals

# largest float drift in the interval sums that endpoint pinning may absorb
PIN_TOLERANCE = 1e-9
DOMAIN_SLACK = 1e-9


@dataclass(frozen=True)
class ControlGrid:
    xs: np.ndarray  # n + 1 column positions, 0 .. W
    ys: np.ndarray  # m + 1 row positions, 0 .. H

    @property
    def W(self) -> float:
        return float(self.xs[-1])

    @property
    def H(self) -> float:
        return float(self.ys[-1])

    @property
    def m(self) -> int:
        return len(self.ys) - 1

    @property
    def n(self) -> int:
        return len(self.xs) - 1


def _prefix(d: np.ndarray, total: float, axis: str) -> np.ndarray:
    pts = np.empty(len(d) + 1)
    pts[0] = 0.0
    np.cumsum(d, out=pts[1:])
    drift = abs(pts[-1] - total)
    if drift > PIN_TOLERANCE * max(1.0, abs(total)):
        raise InvalidArgumentError(
            f"{axis} intervals sum to {pts[-1]!r}, expected {total!r}")
    pts[-1] = total
    steps = np.diff(pts)
    bad = np.flatnonzero(~(steps > 0))
    if bad.size:
        i = int(bad[0])
        raise DegenerateDeformationError(axis, i, float(steps[i]))
    return pts


def control_grid(d: Intervals, W: float, H: float) -> ControlGrid:
    """Prefix sums of the intervals, with the last point pinned to ``W`` / ``H``."""
    return ControlGrid(_prefix(np.asarray(d.d_col, float), float(W), "col"),
                       _prefix(np.asarray(d.d_row, float), float(H), "row"))


class PiecewiseLinear:
    """Strictly increasing piecewise-linear map between two closed intervals.

    Forward and inverse evaluation both bracket the argument by binary search
    over the breakpoints and interpolate linearly inside the bracket.
    """

    def __init__(self, knots_in: np.ndarray, knots_out: np.ndarray):
        self.knots_in = np.asarray(knots_in, dtype=float)
        self.knots_out = np.asarray(knots_out, dtype=float)
        if self.knots_in.shape != self.knots_out.shape or self.knots_in.ndim != 1:
            raise InvalidArgumentError("knot arrays must be 1-D and of equal length")
        if not (np.all(np.diff(self.knots_in) > 0) and np.all(np.diff(self.knots_out) > 0)):
            raise InvalidArgumentError("knots must be strictly increasing")

    @staticmethod
    def _check(v, lo, hi):
        # float noise up to DOMAIN_SLACK (relative) at the ends is snapped back in
        v = np.asarray(v, dtype=float)
        slack = DOMAIN_SLACK * max(1.0, abs(hi - lo))
        if not np.all((v >= lo - slack) & (v <= hi + slack)):
            raise OutOfDomainError(f"value outside [{lo}, {hi}]")
        return np.clip(v, lo, hi)

    def __call__(self, v):
        v = self._check(v, self.knots_in[0], self.knots_in[-1])
        return np.interp(v, self.knots_in, self.knots_out)

    def inverse(self, v):
        v = self._check(v, self.knots_out[0], self.knots_out[-1])
        return np.interp(v, self.knots_out, self.knots_in)

    def eval_clamped(self, v):
        """Forward evaluation without the domain check (clamps outside)."""
        return np.interp(v, self.knots_in, self.knots_out)

    def slopes(self) -> np.ndarray:
        return np.diff(self.knots_out) / np.diff(self.knots_in)


def target_knots(extent: float, count: int) -> np.ndarray:
    """Fixed target-grid abscissae ``i * extent / count`` for ``i = 0..count``."""
    return np.arange(count + 1) * float(extent) / count


@dataclass(frozen=True)
class AxisMap:
    """Target -> source mapping ``(x', y') -> (x_map(x'), y_map(y'))``."""

    x_map: PiecewiseLinear
    y_map: PiecewiseLinear
    w: float
    h: float

    @property
    def W(self) -> float:
        return float(self.x_map.knots_out[-1])

    @property
    def H(self) -> float:
        return float(self.y_map.knots_out[-1])

    @property
    def grid(self) -> ControlGrid:
        return ControlGrid(self.x_map.knots_out, self.y_map.knots_out)

    def to_json(self) -> dict:
        return {"W": self.W, "H": self.H, "w": float(self.w), "h": float(self.h),
                "xs": [float(v) for v in self.x_map.knots_out],
                "ys": [float(v) for v in self.y_map.knots_out]}

    @classmethod
    def from_json(cls, obj: dict) -> "AxisMap":
        try:
            xs = np.asarray(obj["xs"], dtype=float)
            ys = np.asarray(obj["ys"], dtype=float)
            W, H, w, h = (float(obj[k]) for k in ("W", "H", "w", "h"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed grid description: {exc}") from exc
        if len(xs) < 2 or len(ys) < 2 or xs[0] != 0 or ys[0] != 0 or xs[-1] != W or ys[-1] != H:
            raise InvalidArgumentError("grid endpoints must be 0 and W (resp. H)")
        return axis_maps(ControlGrid(xs, ys), w, h)


def axis_maps(g: ControlGrid, w: float, h: float) -> AxisMap:
    """Piecewise-linear axis maps sending ``i*w/n -> xs[i]`` and ``j*h/m -> ys[j]``."""
    if not (w > 0 and h > 0):
        raise InvalidArgumentError(f"target size must be positive, got {w}x{h}")
    return AxisMap(PiecewiseLinear(target_knots(w, g.n), g.xs),
                   PiecewiseLinear(target_knots(h, g.m), g.ys),
                   float(w), float(h))


def uniform_axis_map(W: float, H: float, w: float, h: float, m: int = 1, n: int = 1) -> AxisMap:
    return axis_maps(control_grid(Intervals.uniform(W, H, m, n), W, H), w, h)


def dense_grid(am: AxisMap) -> np.ndarray:
    """Source sample location (pixel index space) for every target pixel, shape ``(h, w, 2)``.

    Pixel ``i`` is centered at continuous coordinate ``i + 1/2``.
    """
    wi, hi = int(round(am.w)), int(round(am.h))
    gx = am.x_map(np.arange(wi) + 0.5) - 0.5
    gy = am.y_map(np.arange(hi) + 0.5) - 0.5
    out = np.empty((hi, wi, 2))
    out[..., 0] = gx[None, :]
    out[..., 1] = gy[:, None]
    return out
