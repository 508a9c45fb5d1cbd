"""SQLite persistence for solved scalar codebooks."""

from __future__ import annotations

import json
import sqlite3
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import structlog
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

log = structlog.get_logger(__name__)

SCHEMA = """
CREATE TABLE IF NOT EXISTS codebooks (
    levels INTEGER PRIMARY KEY,
    codepoints TEXT NOT NULL,
    distortion REAL NOT NULL,
    residual REAL NOT NULL,
    solved_at TEXT
);
"""

_retry_locked = retry(
    retry=retry_if_exception_type(sqlite3.OperationalError),
    wait=wait_exponential(multiplier=0.05, min=0.05, max=2),
    stop=stop_after_attempt(6),
    reraise=True,
)


class CodebookStore:
    """Scalar quantizers keyed by level count; concurrent writers are last-writer-wins."""

    def __init__(self, path: Path):
        self.path = path
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.conn = sqlite3.connect(self.path, check_same_thread=False, timeout=5.0)
        self.conn.execute("PRAGMA journal_mode=WAL;")
        self.conn.execute(SCHEMA)
        self.conn.commit()

    @classmethod
    def in_dir(cls, cache_dir: Path) -> "CodebookStore":
        return cls(cache_dir / "codebooks.db")

    def close(self) -> None:
        self.conn.close()

    @_retry_locked
    def put(self, levels: int, codepoints: list[float], distortion: float, residual: float) -> None:
        with self._lock:
            self.conn.execute(
                """
                INSERT OR REPLACE INTO codebooks (levels, codepoints, distortion, residual, solved_at)
                VALUES (?, ?, ?, ?, ?)
                """,
                (
                    levels,
                    json.dumps(codepoints),
                    distortion,
                    residual,
                    datetime.now(timezone.utc).isoformat(),
                ),
            )
            self.conn.commit()
        log.debug("codebook_stored", levels=levels, path=str(self.path))

    def get(self, levels: int) -> Optional[tuple[list[float], float, float]]:
        with self._lock:
            cur = self.conn.execute(
                "SELECT codepoints, distortion, residual FROM codebooks WHERE levels = ?",
                (levels,),
            )
            row = cur.fetchone()
        if row is None:
            return None
        return json.loads(row[0]), float(row[1]), float(row[2])

    def count(self) -> int:
        with self._lock:
            row = self.conn.execute("SELECT COUNT(*) FROM codebooks").fetchone()
        return int(row[0]) if row else 0

    def max_levels(self) -> int:
        with self._lock:
            row = self.conn.execute("SELECT MAX(levels) FROM codebooks").fetchone()
        return int(row[0]) if row and row[0] is not None else 0
