"""Versioned JSON reports with a fixed field order."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from .finite import FiniteAlgebra

SCHEMA = 1


def digest(parts: dict[str, str]) -> str:
    h = hashlib.sha256()
    for key in sorted(parts):
        h.update(key.encode())
        h.update(b"\0")
        h.update(parts[key].encode())
        h.update(b"\0")
    return h.hexdigest()


def algebra_json(H: FiniteAlgebra) -> dict:
    sig = H.signature
    return {
        "carriers": {s: list(H.carriers[s]) for s in sig.sorts},
        "tables": {op: H.tables[op].tolist() for op in sig.op_names},
    }


def map_json(H_from: FiniteAlgebra, H_to: FiniteAlgebra, phi) -> dict:
    return {s: {H_from.carriers[s][i]: H_to.carriers[s][int(j)] for i, j in enumerate(phi[s])}
            for s in H_from.signature.sorts}


@dataclass
class Report:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    verdict: str = ""
    bounds: dict[str, Any] = field(default_factory=dict)
    result: dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": {"files": dict(sorted(self.inputs.items())), "digest": digest(self.inputs)},
            "verdict": self.verdict,
            "bounds": self.bounds,
            "result": self.result,
        }
        if timing:
            out["timing"] = {"seconds": round(self.seconds, 6)}
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, ensure_ascii=False) + "\n"


def strip_timing(text: str) -> str:
    """JSON text without the timing field, for determinism comparisons."""
    data = json.loads(text)
    data.pop("timing", None)
    return json.dumps(data, indent=2, ensure_ascii=False)
