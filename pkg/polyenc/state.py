from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    command: str
    ok: bool
    summary: Dict[str, Any] = field(default_factory=dict)
    run_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    started: float = field(default_factory=time.time)
    seconds: float = 0.0

    def copy(self) -> Dict:
        return asdict(self)


class RunHistory:
    """Recent service runs plus uploaded problems, newest last."""

    def __init__(self, path: Optional[Path] = None, limit: int = 100) -> None:
        self._path: Optional[Path] = Path(path) if path else None
        self._limit = limit
        self._runs: List[RunRecord] = self._load()
        self._uploads: Dict[str, Dict[str, str]] = {}
        self._lock = threading.RLock()

    def record(self, command: str, ok: bool, summary: Dict[str, Any], seconds: float) -> Dict:
        with self._lock:
            rec = RunRecord(command, ok, summary, seconds=round(seconds, 4))
            self._runs.append(rec)
            if len(self._runs) > self._limit:
                del self._runs[: len(self._runs) - self._limit]
            self._persist()
            return rec.copy()

    def runs(self, limit: Optional[int] = None) -> List[Dict]:
        with self._lock:
            items = self._runs if limit is None else self._runs[-limit:]
            return [r.copy() for r in items]

    def clear(self) -> None:
        with self._lock:
            self._runs = []
            self._persist()

    def store_upload(self, filename: str, text: str) -> str:
        with self._lock:
            problem_id = uuid.uuid4().hex
            self._uploads[problem_id] = {"filename": filename, "text": text}
            return problem_id

    def upload(self, problem_id: str) -> Optional[Dict[str, str]]:
        with self._lock:
            item = self._uploads.get(problem_id)
            return dict(item) if item else None

    def _persist(self) -> None:
        if not self._path:
            return
        try:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            data = [r.copy() for r in self._runs]
            self._path.write_text(json.dumps(data, ensure_ascii=False, indent=2), encoding="utf-8")
        except Exception as exc:
            logger.warning("Failed to persist run history to %s: %s", self._path, exc)

    def _load(self) -> List[RunRecord]:
        if not self._path or not self._path.exists():
            return []
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
            return [RunRecord(**item) for item in data][-self._limit:]
        except Exception as exc:
            logger.warning("Ignoring unreadable run history %s: %s", self._path, exc)
            return []
