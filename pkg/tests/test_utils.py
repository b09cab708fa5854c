"""Tests for utility functions."""

import json
import tempfile
from pathlib import Path

import numpy as np

from cpnsurf.utils import (
    content_hash,
    dump_json,
    ensure_directory,
    format_float,
    format_number,
    max_norm,
    parallel_map,
    slugify,
    to_jsonable,
)


class TestSlugify:
    """Test slugify function."""

    def test_slugify_basic(self):
        """Test basic slugification."""
        assert slugify("Hello World") == "hello-world"
        assert slugify("cp1-sphere") == "cp1-sphere"

    def test_slugify_special_characters(self):
        """Test slugification with special characters."""
        assert slugify("Hello, World!") == "hello-world"
        assert slugify("ex1 a=1") == "ex1-a1"

    def test_slugify_keeps_dots(self):
        """Test slugification preserves numbers and dots."""
        assert slugify("API v2.1") == "api-v2.1"

    def test_slugify_empty_string(self):
        """Test slugification of empty string."""
        assert slugify("") == ""
        assert slugify("   ") == ""


class TestContentHash:
    """Test content_hash function."""

    def test_content_hash_deterministic(self):
        """Test that content hash is deterministic."""
        assert content_hash("mesh") == content_hash("mesh")
        assert len(content_hash("mesh")) == 64

    def test_content_hash_different_content(self):
        """Test that different content produces different hashes."""
        assert content_hash("v 0 0 0") != content_hash("v 0 0 1")


class TestFormatting:
    """Test number formatting."""

    def test_format_float_round_trips(self):
        """Test 17 significant digits round-trip doubles."""
        value = 0.1 + 0.2
        assert float(format_float(value)) == value
        assert format_float(2.0) == "2"

    def test_format_number(self):
        """Test thousands separators."""
        assert format_number(1234567) == "1,234,567"


class TestJson:
    """Test JSON conversion."""

    def test_complex_becomes_pair(self):
        """Test complex numbers become [re, im]."""
        assert to_jsonable(1 + 2j) == [1.0, 2.0]
        assert to_jsonable(np.complex128(3j)) == [0.0, 3.0]

    def test_numpy_values(self):
        """Test arrays and numpy scalars become plain types."""
        data = {"a": np.arange(3), "b": np.float64(0.5), "c": np.bool_(True), 1: (np.int64(2),)}
        assert to_jsonable(data) == {"a": [0, 1, 2], "b": 0.5, "c": True, "1": [2]}

    def test_dump_json_sorted(self):
        """Test keys are sorted and output ends with a newline."""
        text = dump_json({"b": 1, "a": np.array([1j])})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text)["a"] == [[0.0, 1.0]]


class TestEnsureDirectory:
    """Test ensure_directory function."""

    def test_creates_nested(self):
        """Test that nested directories are created."""
        with tempfile.TemporaryDirectory() as temp_dir:
            target = Path(temp_dir) / "a" / "b"
            ensure_directory(target)
            assert target.is_dir()
            ensure_directory(target)


class TestMaxNorm:
    """Test max_norm function."""

    def test_values(self):
        """Test the largest absolute entry."""
        assert max_norm([[1, -3j], [2, 0]]) == 3.0
        assert max_norm([]) == 0.0


class TestParallelMap:
    """Test parallel_map."""

    def test_inline(self):
        """Test one thread maps in order."""
        assert parallel_map(lambda x: x * x, range(5)) == [0, 1, 4, 9, 16]

    def test_threads_keep_input_order(self):
        """Test results come back in input order on several workers."""
        items = list(range(50))
        assert parallel_map(lambda x: -x, items, threads=4) == [-x for x in items]

    def test_empty(self):
        """Test empty input gives an empty list."""
        assert parallel_map(str, [], threads=3) == []
