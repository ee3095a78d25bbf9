"""Non-uniform, QP-controlled search-region resizing for crop-based trackers."""

from .coord_map import map_box_forward, map_box_reverse, map_point_forward, map_point_reverse
from .errors import (DegenerateDeformationError, InvalidArgumentError, OutOfDomainError,
                     QPZoomError, SolverError)
from .geometry import Box, ContextMode, crop_image, crop_size
from .importance import ImportanceParams, ScoreGrid, gaussian_value, score_grid
from .pipeline import (HyperParams, ResizeResult, SizeRecord, SizeStats, jitter_prior,
                       make_search_patch, target_size_stats)
from .qp import Intervals, QPProblem, ZoomParams, assemble, energy, solve
from .resample import uniform_resize, warp
from .warp_grid import AxisMap, ControlGrid, axis_maps, control_grid, dense_grid

__version__ = "0.1.0"
