from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional


class ReportStore:
    """Persist suite reports as JSON files.

    Reports land in `<root>/<suite>_<timestamp>.json` unless an explicit target
    is given. Every call returns a result dict instead of raising.
    """

    def __init__(self, report_root: Path) -> None:
        self.report_root = Path(report_root)
        self.report_root.mkdir(parents=True, exist_ok=True)

    def write(self, suite: str, report: Dict[str, Any], target: Optional[Path] = None) -> Dict[str, str]:
        timestamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        path = Path(target) if target is not None else self.report_root / f"{suite}_{timestamp}.json"
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(report, indent=2), encoding="utf-8")
            return {"status": "success", "detail": f"Report written: {path.name}", "path": str(path)}
        except Exception as exc:
            return {"status": "error", "detail": str(exc)}

    def load(self, source: Path) -> Dict[str, Any]:
        path = Path(source)
        if not path.exists():
            return {"status": "error", "detail": "Report not found"}
        try:
            return {"status": "success", "report": json.loads(path.read_text(encoding="utf-8"))}
        except Exception as exc:
            return {"status": "error", "detail": str(exc)}

    def list_reports(self) -> List[Dict[str, str]]:
        items = []
        for child in sorted(self.report_root.glob("*.json"), reverse=True):
            suite = child.stem.rsplit("_", 1)[0]
            items.append({"name": child.name, "path": str(child), "suite": suite})
        return items
