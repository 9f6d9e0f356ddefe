"""Deterministic dataset splits and training-set variants.

The split is a seeded shuffle followed by a contiguous partition: eval and
test each take floor(n/10) items, train takes the remainder. Cleaned-variant
training sets drop every function whose scan verdict is not clean; eval and
test membership never depends on verdicts, so those splits are identical
across variants.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .curate import CuratedPair
from .jsonl import dumps, write_json
from .qualscan import STATUS_CLEAN, verdict_status

SPLIT_NAMES = ("train", "eval", "test")
VARIANTS = ("full", "cleaned")


class MissingVerdict(KeyError):
    """A function in the train pool has no scan verdict."""


@dataclass(slots=True)
class SplitAssignment:
    func_id: object
    split: str
    in_full: bool = True
    in_cleaned: bool = True


@dataclass(frozen=True)
class DatasetManifest:
    seed: int
    variant: str
    counts: dict[str, int]
    files: dict[str, dict]
    config: dict
    tool_version: str = __version__

    def to_record(self) -> dict:
        return {
            "seed": self.seed,
            "variant": self.variant,
            "counts": dict(self.counts),
            "files": {k: dict(v) for k, v in self.files.items()},
            "config": dict(self.config),
            "tool_version": self.tool_version,
        }


def split_sizes(n: int) -> dict[str, int]:
    """Exact split sizes for n items: 10% eval, 10% test (floored), rest train."""
    tenth = n // 10
    return {"train": n - 2 * tenth, "eval": tenth, "test": tenth}


def _item_id(item: object) -> object:
    return getattr(item, "func_id", item)


def split(items: Iterable[object], seed: int = 42) -> list[SplitAssignment]:
    """Assign every item to train/eval/test, reproducibly for a given seed.

    Items may be curated pairs or bare ids. Returns one assignment per item
    in input order.
    """
    ids = [_item_id(item) for item in items]
    n = len(ids)
    if n == 0:
        raise ValueError("cannot split an empty collection")
    sizes = split_sizes(n)
    perm = np.random.RandomState(seed).permutation(n)
    codes = np.empty(n, dtype=np.uint8)
    codes[perm[: sizes["train"]]] = 0
    codes[perm[sizes["train"] : sizes["train"] + sizes["eval"]]] = 1
    codes[perm[sizes["train"] + sizes["eval"] :]] = 2
    return [SplitAssignment(func_id=ids[i], split=SPLIT_NAMES[codes[i]]) for i in range(n)]


def mark_cleaned(
    assignments: Iterable[SplitAssignment],
    verdicts: Mapping[object, object],
) -> int:
    """Set ``in_cleaned`` on train assignments from scan verdicts.

    Returns the number of train items excluded from the cleaned variant.
    Raises :class:`MissingVerdict` when a train function was never scanned.
    """
    dropped = 0
    for assignment in assignments:
        if assignment.split != "train":
            continue
        try:
            verdict = verdicts[assignment.func_id]
        except KeyError:
            raise MissingVerdict(assignment.func_id) from None
        if verdict_status(verdict) != STATUS_CLEAN:
            assignment.in_cleaned = False
            dropped += 1
    return dropped


def make_variants(
    train_pool: Iterable[object],
    verdicts: Mapping[object, object],
) -> tuple[list[object], list[object]]:
    """Build the full and cleaned training pools.

    The full variant keeps everything; the cleaned variant keeps only items
    with a clean verdict. Raises :class:`MissingVerdict` for unscanned items.
    """
    full: list[object] = []
    cleaned: list[object] = []
    for item in train_pool:
        full.append(item)
        key = _item_id(item)
        try:
            verdict = verdicts[key]
        except KeyError:
            raise MissingVerdict(key) from None
        if verdict_status(verdict) == STATUS_CLEAN:
            cleaned.append(item)
    return full, cleaned


def prompt_text(pair: CuratedPair) -> str:
    return f"{pair.description}\n{pair.signature}"


def _included(assignment: SplitAssignment, variant: str) -> bool:
    if assignment.split != "train":
        return True
    return assignment.in_cleaned if variant == "cleaned" else assignment.in_full


def emit(
    pairs: Iterable[CuratedPair],
    assignments: Iterable[SplitAssignment],
    out_dir: str | Path,
    variant: str = "full",
    seed: int = 42,
    config: dict | None = None,
) -> DatasetManifest:
    """Write one prompt/completion JSONL file per split plus a manifest.

    Rows are ordered by func_id, so repeated runs produce byte-identical
    files. Rows are materialized per split for that ordering; the streaming
    memory bound applies to the extract/curate/scan stages, not emission.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    membership: dict[object, str] = {}
    for assignment in assignments:
        if _included(assignment, variant):
            membership[assignment.func_id] = assignment.split

    rows: dict[str, list[tuple[object, str]]] = {name: [] for name in SPLIT_NAMES}
    for pair in pairs:
        name = membership.get(pair.func_id)
        if name is None:
            continue
        record = {
            "func_id": pair.func_id,
            "prompt": prompt_text(pair),
            "completion": pair.code,
        }
        rows[name].append((pair.func_id, dumps(record)))

    counts: dict[str, int] = {}
    files: dict[str, dict] = {}
    for name in SPLIT_NAMES:
        rows[name].sort(key=lambda item: str(item[0]))
        file_name = f"{name}.{variant}.jsonl"
        digest = hashlib.sha256()
        with open(out_dir / file_name, "w", encoding="utf-8") as handle:
            for _, line in rows[name]:
                handle.write(line)
                handle.write("\n")
                digest.update(line.encode("utf-8"))
                digest.update(b"\n")
        counts[name] = len(rows[name])
        files[name] = {"path": file_name, "sha256": digest.hexdigest(), "count": counts[name]}

    manifest = DatasetManifest(
        seed=seed,
        variant=variant,
        counts=counts,
        files=files,
        config=config or {},
    )
    write_json(out_dir / f"manifest.{variant}.json", manifest.to_record())
    return manifest


def assignment_to_record(assignment: SplitAssignment) -> dict:
    return {
        "func_id": assignment.func_id,
        "split": assignment.split,
        "in_full": assignment.in_full,
        "in_cleaned": assignment.in_cleaned,
    }


def assignment_from_record(record: dict) -> SplitAssignment:
    return SplitAssignment(
        func_id=record["func_id"],
        split=record["split"],
        in_full=record.get("in_full", True),
        in_cleaned=record.get("in_cleaned", True),
    )


__all__ = [
    "DatasetManifest",
    "MissingVerdict",
    "SPLIT_NAMES",
    "SplitAssignment",
    "VARIANTS",
    "assignment_from_record",
    "assignment_to_record",
    "emit",
    "make_variants",
    "mark_cleaned",
    "prompt_text",
    "split",
    "split_sizes",
]
