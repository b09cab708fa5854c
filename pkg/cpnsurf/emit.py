"""Mesh, table and report emission with an index.jsonl manifest."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike

from .utils import content_hash, dump_json, ensure_directory, format_float, slugify

logger = structlog.get_logger()


class MeshEmitter:
    """Writes OBJ, PLY, CSV and JSON artifacts and maintains index.jsonl.

    All floats are written with 17 significant digits, so identical inputs
    give byte-identical files. Files whose content is unchanged are skipped.
    """

    def __init__(self, output_dir: Path):
        """Initialize the emitter.

        Args:
            output_dir: Directory receiving all artifacts
        """
        self.output_dir = Path(output_dir)
        self.index_path = self.output_dir / "index.jsonl"

        self.cumulative_stats = {
            "files": 0,
            "skipped": 0,
            "vertices": 0,
            "faces": 0,
            "rows": 0,
            "size_bytes": 0,
        }

        ensure_directory(self.output_dir)

    def write_obj(
        self, name: str, vertices: ArrayLike, faces: Sequence[Sequence[int]]
    ) -> Path:
        """ASCII OBJ with ``v`` and 1-based ``f`` records."""
        verts = np.asarray(vertices, dtype=np.float64)
        lines = [f"# cpnsurf mesh {name}"]
        lines += ["v " + " ".join(format_float(c) for c in v[:3]) for v in verts]
        lines += ["f " + " ".join(str(i + 1) for i in face) for face in faces]
        return self._emit(
            f"{slugify(name)}.obj",
            "\n".join(lines) + "\n",
            kind="obj",
            vertices=len(verts),
            faces=len(faces),
        )

    def write_ply(
        self, name: str, vertices: ArrayLike, faces: Sequence[Sequence[int]]
    ) -> Path:
        """ASCII PLY 1.0 with float vertices and list faces."""
        verts = np.asarray(vertices, dtype=np.float64)
        header = [
            "ply",
            "format ascii 1.0",
            f"comment cpnsurf mesh {name}",
            f"element vertex {len(verts)}",
            "property double x",
            "property double y",
            "property double z",
            f"element face {len(faces)}",
            "property list uchar int vertex_indices",
            "end_header",
        ]
        body = [" ".join(format_float(c) for c in v[:3]) for v in verts]
        body += [f"{len(face)} " + " ".join(str(i) for i in face) for face in faces]
        return self._emit(
            f"{slugify(name)}.ply",
            "\n".join(header + body) + "\n",
            kind="ply",
            vertices=len(verts),
            faces=len(faces),
        )

    def write_coords_csv(self, name: str, points: ArrayLike, coords: ArrayLike) -> Path:
        """CSV with header ``re_xi,im_xi,x1..x{d}``."""
        pts = np.asarray(points, dtype=np.complex128).ravel()
        data = np.asarray(coords, dtype=np.float64)
        header = ["re_xi", "im_xi", *(f"x{i + 1}" for i in range(data.shape[1]))]
        rows = [[p.real, p.imag, *row] for p, row in zip(pts, data, strict=True)]
        return self.write_table(name, header, rows)

    def write_table(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> Path:
        """CSV table; numbers are written with :func:`format_float`."""
        lines = [",".join(header)]
        count = 0
        for row in rows:
            lines.append(",".join(_cell(v) for v in row))
            count += 1
        return self._emit(
            f"{slugify(name)}.csv", "\n".join(lines) + "\n", kind="csv", rows=count
        )

    def write_json(self, name: str, data: Any) -> Path:
        """Deterministic JSON document (sorted keys)."""
        return self._emit(f"{slugify(name)}.json", dump_json(data), kind="json")

    def _emit(self, filename: str, text: str, kind: str, **counts: int) -> Path:
        path = self.output_dir / filename
        current_hash = content_hash(text)
        if self._should_skip_write(path, current_hash):
            logger.debug("Skipping unchanged file", file=filename)
            self.cumulative_stats["skipped"] += 1
            return path

        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)

        self._update_cumulative_stats(len(text.encode("utf-8")), counts)
        self._update_index(filename, kind, current_hash, counts)
        logger.info("Emitted file", file=filename, kind=kind, **counts)
        return path

    def _should_skip_write(self, path: Path, current_hash: str) -> bool:
        """Skip when the file exists with identical content."""
        if not path.exists():
            return False
        try:
            existing = path.read_text(encoding="utf-8")
        except OSError as e:
            logger.warning("Failed to read existing file", path=str(path), error=str(e))
            return False
        return content_hash(existing) == current_hash

    def _update_index(
        self, filename: str, kind: str, digest: str, counts: dict[str, int]
    ) -> None:
        entry = {"file": filename, "kind": kind, "content_hash": digest, **counts}

        existing_entries = []
        if self.index_path.exists():
            try:
                with open(self.index_path, encoding="utf-8") as f:
                    existing_entries = [json.loads(line) for line in f if line.strip()]
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("Failed to read existing index", error=str(e))

        existing_entries = [e for e in existing_entries if e.get("file") != filename]
        existing_entries.append(entry)
        existing_entries.sort(key=lambda e: e.get("file", ""))

        with open(self.index_path, "w", encoding="utf-8") as f:
            for item in existing_entries:
                f.write(json.dumps(item, sort_keys=True) + "\n")

    def _update_cumulative_stats(self, size_bytes: int, counts: dict[str, int]) -> None:
        self.cumulative_stats["files"] += 1
        self.cumulative_stats["size_bytes"] += size_bytes
        for key in ("vertices", "faces", "rows"):
            self.cumulative_stats[key] += int(counts.get(key, 0))

    def finalize_stats(self) -> dict[str, Any]:
        """Return cumulative statistics for the run."""
        stats = {
            "summary": self.cumulative_stats.copy(),
            "generated_at": datetime.now(timezone.utc).isoformat(),
        }
        logger.info(
            "Finalized emission stats",
            files=self.cumulative_stats["files"],
            skipped=self.cumulative_stats["skipped"],
        )
        return stats


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)
