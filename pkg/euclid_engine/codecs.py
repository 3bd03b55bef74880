"""Reading and writing the JSON/YAML documents the engine exchanges."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

import yaml

from euclid_engine.algebra_core import Algebra
from euclid_engine.incidence import IncidencePoint
from euclid_engine.subspace import Subspace


class DocumentCodec:
    """Safe loading of YAML or JSON documents and plain JSON output.

    YAML is a superset of JSON, so every input goes through `yaml.safe_load`.
    """

    def load(self, source: Path) -> Dict[str, Any]:
        with Path(source).open("r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
        return self._normalize(data)

    def load_str(self, text: str) -> Dict[str, Any]:
        data = yaml.safe_load(text) or {}
        return self._normalize(data)

    def load_stream(self, stream: Optional[TextIO] = None) -> Dict[str, Any]:
        return self.load_str((stream or sys.stdin).read())

    def dump(self, data: Dict[str, Any], target: Path) -> None:
        target = Path(target)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.dumps(data), encoding="utf-8")

    def dumps(self, data: Any) -> str:
        return json.dumps(data, indent=2, sort_keys=False)

    def validate(self, data: Dict[str, Any], required_keys: Sequence[str]) -> Tuple[bool, List[str]]:
        """Check for required keys, return (ok, missing)."""
        missing = [key for key in required_keys if key not in data]
        return (not missing), missing

    # -------------------------
    # Typed decoders
    # -------------------------
    def algebra(self, data: Dict[str, Any], toy: bool = False) -> Algebra:
        ok, missing = self.validate(data, ("prime", "kind"))
        if not ok:
            raise ValueError(f"algebra document is missing {missing}")
        return Algebra.from_json(data, toy=toy)

    def subspace(self, algebra: Algebra, data: Dict[str, Any]) -> Subspace:
        ok, missing = self.validate(data, ("side", "ambient", "basis"))
        if not ok:
            raise ValueError(f"subspace document is missing {missing}")
        subspace = Subspace.from_json(algebra.field, data)
        if subspace.ambient != algebra.n:
            raise ValueError(f"subspace ambient {subspace.ambient} does not match algebra dimension {algebra.n}")
        return subspace

    def point(self, algebra: Algebra, data: Dict[str, Any]) -> IncidencePoint:
        ok, missing = self.validate(data, ("X", "Y", "U"))
        if not ok:
            raise ValueError(f"point document is missing {missing}")
        return IncidencePoint.build(
            algebra,
            self.subspace(algebra, data["X"]),
            self.subspace(algebra, data["Y"]),
            self.subspace(algebra, data["U"]),
        )

    def _normalize(self, data: Any) -> Dict[str, Any]:
        return data if isinstance(data, dict) else {}
