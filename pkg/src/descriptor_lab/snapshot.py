"""JSON snapshots of descriptor frames.

Each component is written as a Pauli-sum text when its decomposition has at
most 4096 terms and rebuilds the matrix bit for bit, and as a dense row-major
list of ``[re, im]`` pairs otherwise. Dense entries round-trip exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import SystemLayout
from .descriptors import Descriptor, DescriptorFrame
from .pauli import PauliSum, pauli_decompose

__all__ = ["FORMAT", "MAX_PAULI_TERMS", "frame_to_dict", "frame_from_dict", "dumps", "loads"]

FORMAT = "descriptor-frame/1"
MAX_PAULI_TERMS = 4096


def _dense(m: np.ndarray) -> dict:
    flat = np.asarray(m).reshape(-1)
    return {"dim": int(m.shape[0]), "data": [[float(v.real), float(v.imag)] for v in flat]}


def _undense(doc: dict) -> np.ndarray:
    d = int(doc["dim"])
    data = np.array(doc["data"], dtype=float)
    if data.shape != (d * d, 2):
        raise ValueError(f"dense block has shape {data.shape}, expected {(d * d, 2)}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(d, d)


def _encode_component(m: np.ndarray, pauli_ok: bool) -> dict:
    if pauli_ok:
        f = pauli_decompose(m, prune=0.0)
        if len(f) <= MAX_PAULI_TERMS and np.array_equal(f.materialize(), m):
            return {"pauli": f.to_text()}
    return {"dense": _dense(m)}


def _decode_component(doc: dict) -> np.ndarray:
    if "pauli" in doc:
        return PauliSum.parse(doc["pauli"], prune=0.0).materialize()
    return _undense(doc["dense"])


def frame_to_dict(frame: DescriptorFrame) -> dict:
    pauli_ok = frame.layout.all_qubits
    return {
        "format": FORMAT,
        "dims": list(frame.layout.dims),
        "time": frame.time,
        "reference": [[float(v.real), float(v.imag)] for v in frame.reference],
        "descriptors": [
            {
                "system": desc.system,
                "components": {k: _encode_component(c, pauli_ok) for k, c in desc.components.items()},
            }
            for desc in frame.descriptors
        ],
        "cumulative": {"dense": _dense(frame.cumulative)},
    }


def frame_from_dict(doc: dict) -> DescriptorFrame:
    if doc.get("format") != FORMAT:
        raise ValueError(f"unsupported snapshot format {doc.get('format')!r}")
    layout = SystemLayout(doc["dims"])
    ref = np.array(doc["reference"], dtype=float)
    reference = ref[:, 0] + 1j * ref[:, 1]
    descriptors = []
    for entry in doc["descriptors"]:
        comps = {}
        for k, c in entry["components"].items():
            m = _decode_component(c)
            m.flags.writeable = False
            comps[k] = m
        descriptors.append(Descriptor(int(entry["system"]), comps))
    cumulative = _decode_component(doc["cumulative"])
    for a in (reference, cumulative):
        a.flags.writeable = False
    return DescriptorFrame(layout, reference, tuple(descriptors), int(doc["time"]), cumulative)


def dumps(frame: DescriptorFrame, indent: int | None = None) -> str:
    return json.dumps(frame_to_dict(frame), indent=indent)


def loads(text: str) -> DescriptorFrame:
    return frame_from_dict(json.loads(text))
