"""
Storage Module - Output Files and Table Cache
Atomic writes for run tables, summaries and snapshots; on-disk transition tables
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from config import config
from world.gridworld import GridMap
from world.motion import (TABLE_FORMAT_VERSION, MotionParams, StateSpace, TransitionTable,
                          build_transition_table, transition_table_key)

logger = logging.getLogger(__name__)


def atomic_write_bytes(path: Path, data: bytes):
    """Write to a temp file in the same directory, then rename over path"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class OutputStore:
    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else config.OUTPUT_DIR
        self.written: List[Path] = []

    def path(self, name: str) -> Path:
        return self.root / name

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        logger.debug(f"Wrote {path}")
        return path

    # ==================== DOCUMENTS ====================

    def write_text(self, name: str, text: str) -> Path:
        path = self.path(name)
        atomic_write_bytes(path, text.encode("utf-8"))
        return self._record(path)

    def write_json(self, name: str, payload: dict) -> Path:
        return self.write_text(name, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def write_jsonl(self, name: str, records: Iterable[dict]) -> Path:
        lines = [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in records]
        return self.write_text(name, "\n".join(lines) + ("\n" if lines else ""))

    # ==================== TABLES ====================

    def write_table(self, name: str, fieldnames: Sequence[str], rows: Iterable[Dict],
                    footer: Optional[Dict[str, str]] = None) -> Path:
        """Delimited table with optional '# key: value' footer lines"""
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        for key, value in (footer or {}).items():
            buffer.write(f"# {key}: {value}\n")
        return self.write_text(name, buffer.getvalue())

    # ==================== BINARY ====================

    def save_image(self, name: str, image) -> Path:
        buffer = io.BytesIO()
        image.save(buffer, format="PNG")
        path = self.path(name)
        atomic_write_bytes(path, buffer.getvalue())
        return self._record(path)


class TableCache:
    """Transition tables stored as .npz, keyed by the (map, motion) content hash"""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else None
        self._memory: Dict[str, TransitionTable] = {}

    def _file(self, key: str) -> Path:
        return self.root / f"transition_{key}.npz"

    def load_or_build(self, grid: GridMap, params: MotionParams) -> TransitionTable:
        key = transition_table_key(grid, params)
        table = self._memory.get(key)
        if table is not None:
            return table

        if self.root is not None:
            table = self._load(key, grid, params)
        if table is None:
            table = build_transition_table(grid, params)
            if self.root is not None:
                self._save(key, table)
        self._memory[key] = table
        return table

    def _load(self, key: str, grid: GridMap, params: MotionParams) -> Optional[TransitionTable]:
        path = self._file(key)
        if not path.exists():
            return None
        try:
            with np.load(path) as data:
                if int(data["format"]) != TABLE_FORMAT_VERSION:
                    logger.warning(f"⚠️ Ignoring cached table {path.name}: format {int(data['format'])}")
                    return None
                space = StateSpace(grid, len(params.velocities))
                matrix = csr_matrix(
                    (data["data"], data["indices"], data["indptr"]),
                    shape=(space.size, space.size),
                )
        except (OSError, KeyError, ValueError) as e:
            logger.warning(f"⚠️ Ignoring unreadable cached table {path.name}: {e}")
            return None
        logger.info(f"✅ Transition table loaded from cache ({key})")
        return TransitionTable(space, params, matrix)

    def _save(self, key: str, table: TransitionTable):
        buffer = io.BytesIO()
        np.savez_compressed(
            buffer,
            format=np.array(TABLE_FORMAT_VERSION),
            data=table.matrix.data,
            indices=table.matrix.indices,
            indptr=table.matrix.indptr,
        )
        try:
            atomic_write_bytes(self._file(key), buffer.getvalue())
        except OSError as e:
            logger.warning(f"⚠️ Could not cache transition table: {e}")

    def clear_memory(self):
        self._memory.clear()


# Global cache instance
table_cache = TableCache(config.CACHE_DIR)
