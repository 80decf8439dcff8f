"""Tests for giat_grouping.utilities: seeds, formatting, CSV helpers and logging."""

from __future__ import annotations

import logging

from rich.logging import RichHandler

from giat_grouping.utilities import (append_csv_row, configure_logging, derive_seed, format_float,
                                     groups_to_string, list_to_string, splitmix64, write_csv)


# ── Seeds ──────────────────────────────────────────────────────────────


class TestSeeds:

    def test_splitmix64_reference_value(self):
        """First splitmix64 output for state 0 matches the reference generator."""
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_derive_seed_deterministic_and_non_negative(self):
        seeds = [derive_seed(42, i) for i in range(50)]
        assert seeds == [derive_seed(42, i) for i in range(50)]
        assert all(0 <= s < 2**31 for s in seeds)

    def test_derive_seed_distinct(self):
        """Positions and master seeds give distinct per-problem seeds."""
        assert len({derive_seed(1, i) for i in range(100)}) == 100
        assert derive_seed(1, 0) != derive_seed(2, 0)


# ── Formatting ─────────────────────────────────────────────────────────


class TestFormatting:

    def test_list_to_string(self):
        assert list_to_string([1, 2, 3]) == '1, 2, 3'
        assert list_to_string(['a', '', 'b']) == 'a, b'
        assert list_to_string([0, 1], drop_bool=False) == '0, 1'

    def test_groups_to_string_is_one_based(self):
        assert groups_to_string([(0, 1), (2, 3)]) == '{1,2} {3,4}'

    def test_groups_to_string_truncates(self):
        groups = [(2 * i, 2 * i + 1) for i in range(8)]
        assert groups_to_string(groups, limit=2) == '{1,2} {3,4} ... (+6)'

    def test_format_float(self):
        assert format_float(float('inf')) == 'inf'
        assert format_float(float('-inf')) == '-inf'
        assert format_float(1.5) == '1.5'
        assert format_float(0) == '0.0'


# ── CSV ────────────────────────────────────────────────────────────────


class TestCsv:

    def test_write_csv_with_footer(self, tmp_path):
        path = write_csv(tmp_path / 'sub' / 'a.csv', ('x', 'y'), [(1, 2), (3, 4)], footer=('note=1',))
        assert path.read_text(encoding='utf-8').splitlines() == ['x,y', '1,2', '3,4', '# note=1']

    def test_append_writes_header_once(self, tmp_path):
        path = tmp_path / 'rows.csv'
        append_csv_row(path, ('a', 'b'), (1, 2))
        append_csv_row(path, ('a', 'b'), (3, 4))
        assert path.read_text(encoding='utf-8').splitlines() == ['a,b', '1,2', '3,4']


# ── Logging ────────────────────────────────────────────────────────────


class TestLogging:

    def test_configure_logging_is_idempotent(self):
        logger = configure_logging(logging.DEBUG)
        configure_logging(logging.ERROR)
        handlers = [h for h in logger.handlers if isinstance(h, RichHandler)]
        assert len(handlers) == 1
        assert logger.level == logging.ERROR
        assert logger.name == 'giat_grouping'
