"""Self-contained JSON documents for every stage of the pipeline.

Each file carries ``format_version`` and ``kind`` and embeds whatever it
depends on (a cover file embeds its space, a trees file its tower, ...), so
any single file can be re-checked on its own.
"""

from __future__ import annotations

import json
from pathlib import Path

from .covers import ColoredCover
from .errors import FormatError
from .metric import DEFAULT_MAX_POINTS, FiniteMetricSpace
from .tower import CoverTower
from .trees import ScaleTree

FORMAT_VERSION = 1


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write(path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(dumps(doc))
    return path


def read(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise FormatError(f"{path}: missing 'kind' field")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format_version {doc.get('format_version')!r}")
    return doc


def cover_doc(cover: ColoredCover) -> dict:
    doc = cover.to_dict()
    doc["space"] = cover.space.to_dict()
    return doc


def load_cover(doc: dict, max_points=DEFAULT_MAX_POINTS) -> ColoredCover:
    space = FiniteMetricSpace.from_dict(doc["space"], max_points=max_points)
    return ColoredCover.from_dict(doc, space)


def trees_doc(tower: CoverTower, trees) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "trees",
        "tower": tower.to_dict(),
        "trees": [t.to_dict() for t in trees],
    }


def load_trees(doc: dict, max_points=DEFAULT_MAX_POINTS):
    space = FiniteMetricSpace.from_dict(doc["tower"]["space"], max_points=max_points)
    tower = CoverTower.from_dict(doc["tower"], space)
    return tower, [ScaleTree.from_dict(t, tower) for t in doc["trees"]]


def embedding_doc(tower: CoverTower, trees, embedding) -> dict:
    doc = trees_doc(tower, trees)
    doc["kind"] = "embedding"
    doc["embedding"] = embedding.to_dict()
    return doc
