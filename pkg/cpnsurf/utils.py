"""Utility functions for cpnsurf."""

from __future__ import annotations

import hashlib
import json
import re
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def format_float(value: float) -> str:
    """Format a float with 17 significant digits.

    Args:
        value: Number to format

    Returns:
        Shortest-stable text that round-trips the double exactly
    """
    return f"{float(value):.17g}"


def format_number(num: int) -> str:
    """Format large numbers with commas.

    Args:
        num: Number to format

    Returns:
        Formatted number string
    """
    return f"{num:,}"


def to_jsonable(value: Any) -> Any:
    """Convert numpy/complex values into plain JSON types.

    Complex numbers become ``[re, im]`` pairs and arrays nested lists.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def dump_json(data: Any) -> str:
    """Serialise data deterministically (sorted keys, exact floats)."""
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def content_hash(content: str) -> str:
    """Generate SHA-256 hash of content.

    Args:
        content: Content to hash

    Returns:
        Hex digest of SHA-256 hash
    """
    return hashlib.sha256(content.encode("utf-8")).hexdigest()


def slugify(text: str) -> str:
    """Convert text to a file-name-safe slug.

    Args:
        text: Text to slugify

    Returns:
        Slug made of lowercase word characters, dots and hyphens
    """
    slug = re.sub(r"[^\w\s.-]", "", text.lower())
    slug = re.sub(r"[-\s_]+", "-", slug)
    return slug.strip("-")


def ensure_directory(path: Path) -> None:
    """Ensure directory exists, creating it if necessary.

    Args:
        path: Directory path to ensure exists
    """
    path.mkdir(parents=True, exist_ok=True)


def max_norm(array: Any) -> float:
    """Largest absolute entry of an array (0 for empty input)."""
    arr = np.asarray(array)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Apply fn to every item, on up to ``threads`` workers.

    Args:
        fn: Function of one item
        items: Inputs
        threads: Worker count; 1 runs inline

    Returns:
        Results in input order, whatever the thread count
    """
    work = list(items)
    if threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, work))
    return [fn(item) for item in work]
