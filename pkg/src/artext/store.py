"""Versioned manual storage on the filesystem.

Layout under the store root:

    manuals/<manual_id>/v<N>.json   one immutable document per version
    manuals/<manual_id>/index.json  latest version pointer + creation time
    gold/samples.jsonl              append-only expert verdicts

Updates never overwrite: every accepted update writes the next version
file, and old versions stay readable forever. Writers hold a process
lock and updates demand the base version they were derived from, so two
racing updates from the same base produce exactly one winner and one
ConcurrentUpdateConflict.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable

from .calibration import GoldSample
from .types import ManualDocument, decode_datetime, encode_datetime, utc_now

__all__ = ["NotFound", "ConcurrentUpdateConflict", "ManualSummary", "ManualStore"]


class NotFound(KeyError):
    """Unknown manual id or version."""


class ConcurrentUpdateConflict(RuntimeError):
    """An update was derived from a version that is no longer latest."""


@dataclass(frozen=True)
class ManualSummary:
    manual_id: str
    title: str
    version: int
    tags: frozenset[str]
    updated_at: Any

    def to_dict(self) -> dict[str, Any]:
        return {
            "manual_id": self.manual_id,
            "title": self.title,
            "version": self.version,
            "tags": sorted(self.tags),
            "updated_at": encode_datetime(self.updated_at),
        }


def _write_json(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)


class ManualStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._manuals = self.root / "manuals"
        self._gold = self.root / "gold" / "samples.jsonl"
        self._manuals.mkdir(parents=True, exist_ok=True)
        self._gold.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()

    # -- manuals ---------------------------------------------------------

    def create_manual(self, doc: ManualDocument) -> str:
        """Store a new manual as version 1 under a fresh id."""
        manual_id = uuid.uuid4().hex[:12]
        now = utc_now()
        stored = replace(doc, manual_id=manual_id, version=1, created_at=now, updated_at=now)
        with self._lock:
            mdir = self._manuals / manual_id
            mdir.mkdir(parents=True)
            _write_json(mdir / "v1.json", stored.to_dict())
            _write_json(
                mdir / "index.json",
                {
                    "manual_id": manual_id,
                    "latest_version": 1,
                    "created_at": encode_datetime(now),
                },
            )
        return manual_id

    def update_manual(self, manual_id: str, doc: ManualDocument) -> int:
        """Persist an edit as the next version.

        ``doc.version`` must equal the latest stored version (the base
        the edit was made from); anything else is a conflict.
        """
        with self._lock:
            index = self._read_index(manual_id)
            latest = index["latest_version"]
            if doc.version != latest:
                raise ConcurrentUpdateConflict(
                    f"manual {manual_id}: update based on version {doc.version}, "
                    f"latest is {latest}"
                )
            new_version = latest + 1
            stored = replace(
                doc,
                manual_id=manual_id,
                version=new_version,
                created_at=decode_datetime(index["created_at"]),
                updated_at=utc_now(),
            )
            mdir = self._manuals / manual_id
            _write_json(mdir / f"v{new_version}.json", stored.to_dict())
            index["latest_version"] = new_version
            _write_json(mdir / "index.json", index)
        return new_version

    def get_manual(self, manual_id: str, version: int | None = None) -> ManualDocument:
        with self._lock:
            if version is None:
                version = self._read_index(manual_id)["latest_version"]
            path = self._manuals / manual_id / f"v{version}.json"
            if not path.is_file():
                raise NotFound(f"manual {manual_id} has no version {version}")
            return ManualDocument.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_versions(self, manual_id: str) -> list[int]:
        with self._lock:
            self._read_index(manual_id)  # existence check
            mdir = self._manuals / manual_id
            return sorted(int(p.stem[1:]) for p in mdir.glob("v*.json"))

    def list_manual_ids(self) -> list[str]:
        with self._lock:
            return sorted(p.name for p in self._manuals.iterdir() if p.is_dir())

    def search(self, query: str = "", tags: Iterable[str] = ()) -> list[ManualSummary]:
        """Case-insensitive substring search over title, step text, tags."""
        needle = query.lower()
        wanted = {t.lower() for t in tags}
        hits = []
        for manual_id in self.list_manual_ids():
            doc = self.get_manual(manual_id)
            if wanted and not wanted <= {t.lower() for t in doc.tags}:
                continue
            if needle and not self._matches(doc, needle):
                continue
            hits.append(
                ManualSummary(
                    manual_id=doc.manual_id,
                    title=doc.title,
                    version=doc.version,
                    tags=doc.tags,
                    updated_at=doc.updated_at,
                )
            )
        return hits

    @staticmethod
    def _matches(doc: ManualDocument, needle: str) -> bool:
        if needle in doc.title.lower():
            return True
        for tag in doc.tags:
            if needle in tag.lower():
                return True
        for step in doc.steps:
            if needle in step.original_text.lower():
                return True
            if step.simplified_text and needle in step.simplified_text.lower():
                return True
        return False

    def _read_index(self, manual_id: str) -> dict:
        path = self._manuals / manual_id / "index.json"
        if not path.is_file():
            raise NotFound(f"no manual {manual_id}")
        return json.loads(path.read_text(encoding="utf-8"))

    # -- gold samples ------------------------------------------------------

    def append_gold(self, sample: GoldSample) -> None:
        with self._lock:
            with self._gold.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(sample.to_dict(), ensure_ascii=False) + "\n")

    def load_gold(self) -> list[GoldSample]:
        with self._lock:
            if not self._gold.is_file():
                return []
            lines = self._gold.read_text(encoding="utf-8").splitlines()
        return [GoldSample.from_dict(json.loads(line)) for line in lines if line.strip()]
