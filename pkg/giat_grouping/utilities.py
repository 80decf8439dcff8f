##########################################################
# giat_grouping.utilities
#
#   Released under the MIT License.
#
##########################################################

import csv as _csv
import logging as _logging
import pathlib as _pathlib
from typing import Iterable as _Iterable, Sequence as _Sequence

from rich.logging import RichHandler as _RichHandler

MASK64 = (1 << 64) - 1

####################
#
# Logging
#
####################

def configure_logging(level: int = _logging.WARNING) -> _logging.Logger:
    """Attach a rich handler to the package logger.

    Repeated calls only adjust the level.

    Args:
        level (int, optional): logging level. Defaults to logging.WARNING.

    Returns:
        logging.Logger: the ``giat_grouping`` logger.
    """
    logger = _logging.getLogger("giat_grouping")
    if not any(isinstance(h, _RichHandler) for h in logger.handlers):
        handler = _RichHandler(show_path=False, rich_tracebacks=True)
        handler.setFormatter(_logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger

####################
#
# Seeds
#
####################

def splitmix64(state: int) -> int:
    """One splitmix64 output for the given 64-bit state.

    Args:
        state (int): input state, reduced modulo 2**64.

    Returns:
        int: mixed 64-bit value.
    """
    z = (state + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)

def derive_seed(master_seed: int, index: int) -> int:
    """Per-problem seed from the master seed and the problem position."""
    return splitmix64((master_seed & MASK64) ^ splitmix64(index)) & 0x7FFFFFFF

####################
#
# Formatting and CSV helpers
#
####################

def list_to_string(items: _Iterable, sep: str = ', ', drop_bool: bool = True) -> str:
    """Convert list to string

    Converts:
       [1, 2, 3]
    to:
       '1, 2, 3'

    Args:
        items (Iterable): items to join.
        sep (str, optional): separator. Defaults to ', '.
        drop_bool (bool, optional): drop falsy items. Defaults to True.

    Returns:
       str: joined string.
    """
    if not drop_bool:
        return sep.join(f'{item}' for item in items)
    return sep.join(f'{item}' for item in items if item)

def groups_to_string(groups: _Sequence[_Sequence[int]], limit: int = 6) -> str:
    """Short 1-based rendering of variable groups for terminal tables."""
    shown = ['{' + list_to_string((i + 1 for i in g), sep=',', drop_bool=False) + '}' for g in groups[:limit]]
    if len(groups) > limit:
        shown.append(f'... (+{len(groups) - limit})')
    return list_to_string(shown, sep=' ')

def write_csv(path: str | _pathlib.Path, header: _Sequence[str], rows: _Iterable[_Sequence], footer: _Sequence[str] = ()) -> _pathlib.Path:
    """Write rows to a CSV file, with optional ``#`` comment lines after the data.

    Args:
        path (str | Path): target file. Parent directories are created.
        header (Sequence[str]): column names.
        rows (Iterable[Sequence]): data rows.
        footer (Sequence[str], optional): comment lines, written with a leading '# '.

    Returns:
        Path: the written path.
    """
    p = _pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open('w', newline='', encoding='utf-8') as fh:
        writer = _csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
        for line in footer:
            fh.write(f'# {line}\n')
    return p

def append_csv_row(path: str | _pathlib.Path, header: _Sequence[str], row: _Sequence) -> _pathlib.Path:
    """Append one row, writing the header first when the file is new or empty."""
    p = _pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    new_file = not p.exists() or p.stat().st_size == 0
    with p.open('a', newline='', encoding='utf-8') as fh:
        writer = _csv.writer(fh, lineterminator='\n')
        if new_file:
            writer.writerow(header)
        writer.writerow(row)
    return p

def format_float(value: float) -> str:
    """Stable text form of a float for CSV and JSON output."""
    if value == float('inf'):
        return 'inf'
    if value == float('-inf'):
        return '-inf'
    return repr(float(value))
