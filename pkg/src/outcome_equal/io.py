"""Text file formats: schema config, joint distribution, synth config.

All three are JSON documents. A joint file looks like::

    {
      "format": "outcome-equal/joint",
      "version": 1,
      "manifest": {...},
      "schema": {"variables": [{"name": "y", "role": "outcome", "levels": ["0", "1"]}, ...]},
      "shape": [2, 1, 2],
      "probabilities": [
        0.20000000000000001,
        ...
      ]
    }

``probabilities`` is the ``|S| x |U| x |W|`` tensor flattened row-major (outcome
slowest, protected fastest), each value printed with 17 significant digits so
it parses back to the identical double. ``U`` and ``W`` are themselves
row-major products of the unprotected and protected variables in schema order.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dist import JointDistribution, VariableSchema
from .errors import FormatError, OutcomeEqualError
from .synth import SynthConfig

JOINT_FORMAT = "outcome-equal/joint"
FORMAT_VERSION = 1


def _read_json(path) -> dict:
    try:
        with Path(path).open(encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    return data


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def schema_text(schema: VariableSchema, manifest: dict | None = None) -> str:
    doc = schema.to_dict()
    if manifest is not None:
        doc["manifest"] = manifest
    return _dumps(doc)


def load_schema(path) -> VariableSchema:
    data = _read_json(path)
    try:
        return VariableSchema.from_dict(data)
    except OutcomeEqualError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def joint_text(dist: JointDistribution, manifest: dict | None = None) -> str:
    head = {
        "format": JOINT_FORMAT,
        "version": FORMAT_VERSION,
        "manifest": manifest,
        "schema": dist.schema.to_dict(),
        "shape": list(dist.shape),
    }
    numbers = ",\n    ".join(format(float(x), ".17g") for x in dist.mass.ravel())
    body = json.dumps(head, indent=2, ensure_ascii=False)
    return body[:-2] + ',\n  "probabilities": [\n    ' + numbers + "\n  ]\n}\n"


def parse_joint(data: dict, source="<joint>") -> JointDistribution:
    if data.get("format") != JOINT_FORMAT:
        raise FormatError(f"{source}: not a joint distribution file")
    try:
        schema = VariableSchema.from_dict(data["schema"])
        probs = np.array(data["probabilities"], dtype=float)
        shape = tuple(data.get("shape", schema.shape))
        if shape != schema.shape or probs.size != int(np.prod(shape)):
            raise FormatError(f"{source}: probabilities do not match schema shape {schema.shape}")
        return JointDistribution(schema, probs.reshape(shape))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{source}: {exc}") from exc


def load_joint(path) -> JointDistribution:
    return parse_joint(_read_json(path), path)


def load_manifest(path) -> dict | None:
    return _read_json(path).get("manifest")


def synth_config_text(config: SynthConfig) -> str:
    doc = config.schema.to_dict()
    doc.update(
        p_w=config.p_w.tolist(),
        p_u_given_w=config.p_u_given_w.tolist(),
        p_s_given_uw=config.p_s_given_uw.tolist(),
        n=int(config.n),
        seed=int(config.seed),
    )
    return _dumps(doc)


def load_synth_config(path) -> SynthConfig:
    data = _read_json(path)
    try:
        schema = VariableSchema.from_dict(data)
        return SynthConfig(
            schema,
            data["p_w"],
            data["p_u_given_w"],
            data["p_s_given_uw"],
            n=data.get("n", 1000),
            seed=data.get("seed", 0),
        )
    except OutcomeEqualError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    except KeyError as exc:
        raise FormatError(f"{path}: missing key {exc}") from exc


def write_atomic(files: dict) -> None:
    """Write every ``{path: text}`` or none of them.

    Each file goes to a temporary sibling first; renames happen only once all
    writes succeeded.
    """
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
