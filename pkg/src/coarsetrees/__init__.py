"""Colored cover towers and uniform embeddings into products of trees, on finite metric windows."""

from .covers import ColoredCover, greedy_colored_cover, procure_cover, verify_colored_cover
from .embed import Embedding, distortion_report, product_distance
from .errors import (
    ChainViolationError,
    CoarseError,
    EmptySetError,
    FormatError,
    NoCoveringSetError,
    NotACoverError,
    ScaleMismatchError,
    SeedInvalidError,
    SizeLimitError,
    WindowExhausted,
)
from .metric import (
    INF,
    FiniteMetricSpace,
    Subset,
    capacity,
    discrete_boundary,
    dist_point_set,
    gen_free_group_ball,
    gen_grid,
    lebesgue_number,
    line_window,
    mesh,
    neighborhood,
    product_space,
    set_set_distance,
)
from .tower import CoverTower, build_tower, verify_tower
from .trees import ScaleTree, TreePoint, build_tree, tree_colored_cover, tree_distance

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ChainViolationError",
    "CoarseError",
    "ColoredCover",
    "CoverTower",
    "Embedding",
    "EmptySetError",
    "FiniteMetricSpace",
    "FormatError",
    "NoCoveringSetError",
    "NotACoverError",
    "ScaleMismatchError",
    "ScaleTree",
    "SeedInvalidError",
    "SizeLimitError",
    "Subset",
    "TreePoint",
    "WindowExhausted",
    "build_tower",
    "build_tree",
    "capacity",
    "discrete_boundary",
    "dist_point_set",
    "distortion_report",
    "gen_free_group_ball",
    "gen_grid",
    "greedy_colored_cover",
    "lebesgue_number",
    "line_window",
    "mesh",
    "neighborhood",
    "procure_cover",
    "product_distance",
    "product_space",
    "set_set_distance",
    "tree_colored_cover",
    "tree_distance",
    "verify_colored_cover",
    "verify_tower",
]
