"""Point and box transfer between crop coordinates and resized-patch coordinates.

Forward goes crop -> patch (used for labels), reverse goes patch -> crop
(used for predictions).  Boxes are moved through their two corners, which
keeps them axis-aligned.
"""

from __future__ import annotations

from typing import Tuple

from .geometry import Box
from .warp_grid import AxisMap


def map_point_forward(x: float, y: float, am: AxisMap) -> Tuple[float, float]:
    return float(am.x_map.inverse(x)), float(am.y_map.inverse(y))


def map_point_reverse(xp: float, yp: float, am: AxisMap) -> Tuple[float, float]:
    return float(am.x_map(xp)), float(am.y_map(yp))


def map_box_forward(b: Box, am: AxisMap) -> Box:
    x1, y1, x2, y2 = b.corners
    u1, v1 = map_point_forward(x1, y1, am)
    u2, v2 = map_point_forward(x2, y2, am)
    return Box.from_corners(u1, v1, u2, v2)


def map_box_reverse(b: Box, am: AxisMap) -> Box:
    x1, y1, x2, y2 = b.corners
    u1, v1 = map_point_reverse(x1, y1, am)
    u2, v2 = map_point_reverse(x2, y2, am)
    return Box.from_corners(u1, v1, u2, v2)
