"""Config-document ingestion and canonical digests.

A config is a single JSON object with top-level ``"kind"`` of ``"scene"``
or ``"lie_algebra"``; the remaining fields mirror the corresponding domain
type, with all component functions written as expression strings.  The
scene digest hashes a canonicalized form of the document (expressions
re-rendered from their parse trees, keys sorted, the cosmetic ``name``
dropped), so it is insensitive to whitespace but changes with any
semantically meaningful field.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from . import exprlang
from .geometry import Scene
from .liealg import LieAlgebraPresentation, RMatrix

__all__ = [
    "ConfigError", "load_config", "scene_from_config", "scene_to_config",
    "presentation_from_config", "presentation_to_config", "canonical_digest",
]


class ConfigError(ValueError):
    """Malformed or inconsistent config document."""


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: not valid JSON ({err})") from err
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError(f"{path}: config must be a JSON object with a 'kind'")
    return doc


def _require(doc: dict, key: str, kind: str):
    if key not in doc:
        raise ConfigError(f"{kind} config is missing field {key!r}")
    return doc[key]


def scene_from_config(doc: dict) -> Scene:
    if doc.get("kind") != "scene":
        raise ConfigError(f"expected kind 'scene', got {doc.get('kind')!r}")
    coords = tuple(_require(doc, "coordinates", "scene"))
    n = int(doc.get("dimension", len(coords)))
    if n != len(coords):
        raise ConfigError(
            f"dimension {n} does not match {len(coords)} coordinate names")
    params = {str(k): float(v) for k, v in dict(doc.get("params", {})).items()}
    names = list(params)

    def parse_matrix(key: str):
        rows = _require(doc, key, "scene")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ConfigError(f"{key} must be a {n}x{n} array of expressions")
        try:
            return tuple(tuple(exprlang.parse(e, coords, names) for e in row)
                         for row in rows)
        except exprlang.ExprError as err:
            raise ConfigError(f"in {key}: {err}") from err

    metric = parse_matrix("metric")
    poisson = parse_matrix("poisson")
    box_doc = _require(doc, "box", "scene")
    if len(box_doc) != n or any(len(b) != 2 for b in box_doc):
        raise ConfigError("box must give one [lo, hi] pair per axis")
    box = tuple((float(lo), float(hi)) for lo, hi in box_doc)
    if any(hi <= lo for lo, hi in box):
        raise ConfigError("box bounds must satisfy lo < hi")
    exclude = None
    if doc.get("exclude") is not None:
        try:
            exclude = exprlang.parse(doc["exclude"], coords, names)
        except exprlang.ExprError as err:
            raise ConfigError(f"in exclude: {err}") from err
    orientation = int(doc.get("orientation", 1))
    if orientation not in (1, -1):
        raise ConfigError("orientation must be +1 or -1")
    return Scene(coords=coords, params=params, metric=metric, poisson=poisson,
                 box=box, exclude=exclude, orientation=orientation,
                 name=str(doc.get("name", "")))


def scene_to_config(scene: Scene) -> dict:
    doc = {
        "kind": "scene",
        "name": scene.name,
        "dimension": scene.dimension,
        "coordinates": list(scene.coords),
        "params": dict(scene.params),
        "metric": [[exprlang.pretty(e) for e in row] for row in scene.metric],
        "poisson": [[exprlang.pretty(e) for e in row] for row in scene.poisson],
        "box": [[lo, hi] for lo, hi in scene.box],
        "exclude": None if scene.exclude is None else exprlang.pretty(scene.exclude),
        "orientation": scene.orientation,
    }
    return doc


def presentation_from_config(doc: dict) -> tuple[LieAlgebraPresentation, RMatrix | None]:
    if doc.get("kind") != "lie_algebra":
        raise ConfigError(f"expected kind 'lie_algebra', got {doc.get('kind')!r}")
    basis = tuple(_require(doc, "basis", "lie_algebra"))
    n = int(doc.get("dim", len(basis)))
    if n != len(basis):
        raise ConfigError(f"dim {n} does not match {len(basis)} basis names")
    c = np.asarray(_require(doc, "structure_constants", "lie_algebra"), dtype=float)
    if c.shape != (n, n, n):
        raise ConfigError(f"structure_constants must have shape ({n},{n},{n})")
    b = np.asarray(_require(doc, "metric", "lie_algebra"), dtype=float)
    if b.shape != (n, n):
        raise ConfigError(f"metric must have shape ({n},{n})")
    pres = LieAlgebraPresentation(n, c, b, basis)
    r = None
    if doc.get("r_matrix") is not None:
        rm = np.asarray(doc["r_matrix"], dtype=float)
        if rm.shape != (n, n):
            raise ConfigError(f"r_matrix must have shape ({n},{n})")
        try:
            r = RMatrix(rm)
        except ValueError as err:
            raise ConfigError(str(err)) from err
    return pres, r


def presentation_to_config(pres: LieAlgebraPresentation,
                           r: RMatrix | None = None, name: str = "") -> dict:
    doc = {
        "kind": "lie_algebra",
        "name": name,
        "dim": pres.dim,
        "basis": list(pres.basis),
        "structure_constants": pres.structure_constants.tolist(),
        "metric": pres.metric.tolist(),
        "r_matrix": None if r is None else r.components.tolist(),
    }
    return doc


def canonical_digest(doc: dict) -> str:
    """sha256 of the canonicalized config (whitespace-insensitive in the
    expressions, independent of the cosmetic name and of key order)."""
    canon = dict(doc)
    canon.pop("name", None)
    if doc.get("kind") == "scene":
        scene = scene_from_config(doc)
        canon.update(scene_to_config(scene))
        canon.pop("name", None)
    payload = json.dumps(canon, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()
