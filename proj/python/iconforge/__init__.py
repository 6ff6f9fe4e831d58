"""Constraint-based editing of segmented icons.

Thin Python layer over the C++ core: scenes and programs are opaque handles,
motions and relation graphs come back as plain dicts.
"""

import json

from ._core import (
    EvalError,
    GeometryError,
    IconforgeError,
    IoError,
    ParseError,
    Program,
    Scene,
    TransportError,
    ValidationError,
    chamfer,
    dump_config,
    image_mse,
    parse_program,
    scene_chamfer,
    validate,
)
from . import _core

__all__ = [
    "EvalError",
    "GeometryError",
    "IconforgeError",
    "IoError",
    "ParseError",
    "Program",
    "Scene",
    "TransportError",
    "ValidationError",
    "chamfer",
    "dump_config",
    "edit",
    "image_mse",
    "load_scene",
    "parse_program",
    "relations",
    "render",
    "run_manifest",
    "scene_chamfer",
    "svg",
    "validate",
]


def load_scene(path):
    return Scene.load(str(path))


def _motions_json(motions):
    if motions is None:
        return ""
    if isinstance(motions, str):
        return motions
    if isinstance(motions, dict) and "motions" not in motions:
        motions = {"motions": [dict(m, id=int(k)) for k, m in motions.items()]}
    return json.dumps(motions)


def relations(scene, config=""):
    """Relation graph as a dict with an "edges" list."""
    return json.loads(_core.relations_json(scene, config))


def edit(scene, program, config=""):
    """Runs relations, the state search and rendering for one program.

    `program` may be source text or a parsed Program. Returns a dict with
    motions (id -> params), score, solves, states, order and image.
    """
    if isinstance(program, str):
        program = parse_program(program, scene)
    out = _core.edit(scene, program, config)
    out["motions"] = {m["id"]: m for m in json.loads(out.pop("motions_json"))["motions"]}
    return out


def render(scene, motions=None, order_mode="auto", width=0, height=0):
    """(H, W, 3) uint8 image of the scene under `motions`."""
    return _core.render(scene, _motions_json(motions), order_mode, width, height)


def svg(scene, motions=None, order_mode="auto"):
    return _core.svg(scene, _motions_json(motions), order_mode)


def run_manifest(path, config=""):
    return json.loads(_core.run_manifest(str(path), config))
