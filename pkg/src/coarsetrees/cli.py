"""Command-line front end.

    coarsetrees pipeline --output-dir out --extent 256 --colors 2 --levels 3
    coarsetrees verify --input out/tower.json

Exit status: 0 when every check passes, 2 on a violation (a witness is
printed), 3 on unreadable input or a size limit.  Warnings such as a
truncated tower never change the exit status.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
import warnings
from pathlib import Path

from . import artifacts
from .covers import procure_cover, verify_colored_cover
from .embed import (
    Embedding,
    anchor_violations,
    deep_point_count,
    deep_point_violations,
    distortion_report,
)
from .errors import CoarseError, FormatError, WindowExhausted
from .metric import FiniteMetricSpace, fmt_rational, gen_free_group_ball, gen_grid, parse_rational
from .tower import CoverTower, build_tower, verify_tower
from .trees import build_tree, four_point_gap, random_tree_points

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 2, 3
FOUR_POINT_SAMPLES = 1000


class Violation(Exception):
    """A check failed; the message is the witness."""


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coarsetrees", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["gen", "cover", "tower", "trees", "embed", "report", "verify", "pipeline"])
    p.add_argument("--input", type=Path)
    p.add_argument("--output-dir", type=Path, default=Path("."))
    p.add_argument("--space", choices=["grid", "free-group"], default="grid")
    p.add_argument("--dim", type=_positive, default=1, help="grid dimension")
    p.add_argument("--metric", choices=["l1", "linf"], default="l1")
    p.add_argument("--extent", type=_positive, default=256)
    p.add_argument("--rank", type=_positive, default=2)
    p.add_argument("--radius", type=_positive, default=7)
    p.add_argument("--colors", type=_positive, default=2)
    p.add_argument("--levels", type=_positive, default=3)
    p.add_argument("--d0", default="8", help="seed separation (integer or p/q)")
    p.add_argument("--block", default="24", help="seed cluster diameter (integer or p/q)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p.add_argument("--max-points", type=_positive, default=10_000)
    p.add_argument("--workers", type=_positive, default=1, help="cap on pair-scan workers (scans run in one process)")
    return p


# ---------------------------------------------------------------------------
# stages


def stage_gen(args) -> FiniteMetricSpace:
    if args.space == "grid":
        return gen_grid(args.dim, args.extent, args.metric, max_points=args.max_points)
    return gen_free_group_ball(args.rank, args.radius, max_points=args.max_points)


def stage_cover(args, space):
    d0, block = parse_rational(args.d0), parse_rational(args.block)
    cover, attempts = procure_cover(space, d0, block, d0, max_colors=args.colors)
    return cover, attempts


def stage_tower(args, cover) -> CoverTower:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", WindowExhausted)
        tower = build_tower(cover.space, args.colors, args.levels, cover)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return tower


def stage_trees(tower):
    return [build_tree(tower, c) for c in range(tower.colors)]


def report_doc(tower, trees, emb, rep) -> dict:
    return {
        "format_version": artifacts.FORMAT_VERSION,
        "kind": "report",
        "embedding": artifacts.embedding_doc(tower, trees, emb),
        "report": rep.to_dict(),
    }


# ---------------------------------------------------------------------------
# checks


def check_space(space: FiniteMetricSpace, doc: dict) -> dict:
    metric = doc.get("metric", {})
    if metric.get("kind") == "matrix":
        bad = space.check_triangle()
        if bad is not None:
            raise Violation(f"triangle inequality fails for {bad}")
    return {"points": space.n, "diameter": fmt_rational(space.diameter)}


def check_cover(cover) -> dict:
    rep = verify_colored_cover(cover)
    if not rep.ok:
        raise Violation(f"cover check failed: {rep.witness}")
    return {"colors": cover.colors, "mesh": fmt_rational(rep.mesh), "lebesgue": fmt_rational(rep.lebesgue)}


def check_tower(tower) -> dict:
    rep = verify_tower(tower)
    if rep.violations:
        v = rep.violations[0]
        raise Violation(
            f"{len(rep.violations)} tower violations ({len(rep.interior_violations)} interior); "
            f"first: condition {v.condition} level {v.level}: {v.detail} witness {v.witness}"
        )
    return {"levels": rep.levels, "scales": [fmt_rational(s) for s in rep.scales], "truncated": rep.truncated}


def check_trees(tower, trees, stored=None, seed=0) -> dict:
    rebuilt = stage_trees(tower)
    if stored is not None:
        for c, (a, b) in enumerate(zip(rebuilt, stored)):
            if a.to_dict() != b.to_dict():
                raise Violation(f"stored tree of color {c} differs from the tree rebuilt from its tower")
        if len(stored) != len(rebuilt):
            raise Violation(f"{len(stored)} stored trees, tower has {len(rebuilt)} colors")
    rng = random.Random(seed)
    for t in rebuilt:
        issues = t.structure_issues()
        if issues:
            raise Violation(f"tree of color {t.color}: {issues[0]}")
        for _ in range(FOUR_POINT_SAMPLES):
            q = random_tree_points(t, rng, 4)
            gap = four_point_gap(t, *q)
            if gap != 0:
                raise Violation(f"four-point condition fails on color {t.color} at {q}: gap {gap}")
    return {"trees": len(rebuilt), "nodes": [t.size for t in rebuilt], "four_point_samples": FOUR_POINT_SAMPLES}


def check_embedding(emb, stored=None) -> dict:
    if stored is not None:
        bad = emb.matches(stored)
        if bad:
            raise Violation(f"{len(bad)} stored coordinates differ from the recomputed embedding, first at {bad[0]}")
    deep = deep_point_violations(emb)
    if deep:
        raise Violation(f"deep point with offset other than 2^k: {deep[0]}")
    anchors = anchor_violations(emb)
    if anchors:
        raise Violation(f"anchor function is not short: {anchors[0]}")
    return {"deep_points": deep_point_count(emb), "fallbacks": [int(f.sum()) for f in emb.fallback]}


def check_report(rep, stored=None) -> dict:
    doc = rep.to_dict()
    if stored is not None and doc != stored:
        raise Violation("stored report differs from the recomputed report")
    if not rep.all_pairs_ok:
        failed = [s for s in rep.shortness if s["violations"]]
        first = failed[0]["listed"][:1] if failed else rep.lipschitz["listed"][:1] or rep.deep_pairs
        raise Violation(f"distortion check failed; first witness {first}; divergence {doc['divergence']}")
    return {
        "pairs": rep.pairs_scanned,
        "interior_pairs": rep.interior_pairs,
        "divergence": [{"level": d["level"], "status": d["status"]} for d in rep.divergence],
    }


def verify_doc(doc: dict, args) -> dict:
    kind = doc["kind"]
    try:
        if kind == "space":
            return check_space(FiniteMetricSpace.from_dict(doc, max_points=args.max_points), doc)
        if kind == "cover":
            return check_cover(artifacts.load_cover(doc, args.max_points))
        if kind == "tower":
            space = FiniteMetricSpace.from_dict(doc["space"], max_points=args.max_points)
            return check_tower(CoverTower.from_dict(doc, space))
        if kind == "trees":
            tower, trees = artifacts.load_trees(doc, args.max_points)
            return check_trees(tower, trees, trees, args.seed)
        if kind == "embedding":
            tower, trees = artifacts.load_trees(doc, args.max_points)
            return check_embedding(Embedding(tower, trees), doc["embedding"])
        if kind == "report":
            tower, trees = artifacts.load_trees(doc["embedding"], args.max_points)
            emb = Embedding(tower, trees)
            check_embedding(emb, doc["embedding"]["embedding"])
            return check_report(distortion_report(tower.space, emb, tower), doc["report"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed {kind} document: {exc!r}") from exc
    raise FormatError(f"unknown artifact kind {kind!r}")


# ---------------------------------------------------------------------------
# driver


class Outputs:
    """Collects artifacts in memory and writes them only once a stage succeeds."""

    def __init__(self, directory: Path):
        self.directory = directory
        self.pending: dict[str, str] = {}

    def add(self, name: str, text: str):
        self.pending[name] = text

    def flush(self) -> list[str]:
        self.directory.mkdir(parents=True, exist_ok=True)
        for name, text in self.pending.items():
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=f".{name}.")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.chmod(tmp, 0o644)
            os.replace(tmp, self.directory / name)
        written = list(self.pending)
        self.pending.clear()
        return written


def _load(args, *kinds):
    if args.input is None:
        raise FormatError(f"{args.command} needs --input")
    doc = artifacts.read(args.input)
    if doc["kind"] not in kinds:
        raise FormatError(f"{args.command} expects a {' or '.join(kinds)} document, got {doc['kind']!r}")
    return doc


def run(args) -> tuple[int, dict]:
    out = Outputs(args.output_dir)
    summary = {"command": args.command, "checks": {}, "artifacts": []}
    code = EXIT_OK
    try:
        cmd = args.command
        if cmd == "verify":
            doc = artifacts.read(args.input) if args.input else _load(args)
            summary["kind"] = doc["kind"]
            summary["checks"][doc["kind"]] = verify_doc(doc, args)
            return EXIT_OK, summary

        if cmd in ("gen", "pipeline"):
            space = stage_gen(args)
            out.add("space.json", artifacts.dumps(space.to_dict()))
            summary["checks"]["space"] = check_space(space, {})
        if cmd == "cover":
            space = FiniteMetricSpace.from_dict(_load(args, "space"), max_points=args.max_points)
        if cmd in ("cover", "pipeline"):
            cover, attempts = stage_cover(args, space)
            out.add("cover.json", artifacts.dumps(artifacts.cover_doc(cover)))
            summary["cover_attempts"] = attempts
            summary["checks"]["cover"] = check_cover(cover)
        if cmd == "tower":
            cover = artifacts.load_cover(_load(args, "cover"), args.max_points)
        if cmd in ("tower", "pipeline"):
            tower = stage_tower(args, cover)
            out.add("tower.json", artifacts.dumps(tower.to_dict()))
            summary["checks"]["tower"] = check_tower(tower)
        if cmd == "trees":
            doc = _load(args, "tower")
            tower = CoverTower.from_dict(doc, FiniteMetricSpace.from_dict(doc["space"], max_points=args.max_points))
        if cmd in ("trees", "pipeline"):
            trees = stage_trees(tower)
            out.add("trees.json", artifacts.dumps(artifacts.trees_doc(tower, trees)))
            summary["checks"]["trees"] = check_trees(tower, None, None, args.seed)
        if cmd == "embed":
            tower, trees = artifacts.load_trees(_load(args, "trees"), args.max_points)
        if cmd in ("embed", "pipeline"):
            emb = Embedding(tower, trees)
            out.add("embedding.json", artifacts.dumps(artifacts.embedding_doc(tower, trees, emb)))
            summary["checks"]["embedding"] = check_embedding(emb)
        if cmd == "report":
            doc = _load(args, "embedding")
            tower, trees = artifacts.load_trees(doc, args.max_points)
            emb = Embedding(tower, trees)
            check_embedding(emb, doc["embedding"])
        if cmd in ("report", "pipeline"):
            rep = distortion_report(tower.space, emb, tower)
            out.add("report.json", artifacts.dumps(report_doc(tower, trees, emb, rep)))
            out.add("report.csv", rep.to_csv())
            summary["checks"]["report"] = check_report(rep)
    except Violation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        summary["violation"] = str(exc)
        code = EXIT_VIOLATION
    except (CoarseError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        summary["error"] = f"{type(exc).__name__}: {exc}"
        return EXIT_INPUT, summary
    # artifacts are written even when a check fails, so the witness can be inspected
    summary["artifacts"] = out.flush()
    return code, summary


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, summary = run(args)
    summary["exit"] = code
    summary["config"] = {
        k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k != "command"
    }
    if code != EXIT_INPUT or args.output_dir.is_dir():
        args.output_dir.mkdir(parents=True, exist_ok=True)
        with open(args.output_dir / "summary.jsonl", "a") as fh:
            fh.write(json.dumps(summary, sort_keys=True, default=str) + "\n")
    print(json.dumps({k: summary[k] for k in ("command", "exit", "checks")}, sort_keys=True, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
