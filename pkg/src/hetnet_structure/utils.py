"""Miscellaneous utility functions."""
from __future__ import annotations

import re
from typing import Any, Sequence

import numpy as np


def listify(x: Any) -> list:
    """If x is not a list, put it into one."""
    return [x] if not isinstance(x, (list, tuple, set)) else list(x)


def parse_grid(text: str | Sequence[float]) -> tuple[float, ...]:
    """Parse an alpha grid.

    Accepts either ``start:end:step`` (both endpoints included when reached) or a
    comma-separated list of values. A sequence of numbers is passed through.

    Examples
    --------
    >>> parse_grid("0:0.06:0.02")
    (0.0, 0.02, 0.04, 0.06)
    >>> parse_grid("0.005,0.01")
    (0.005, 0.01)
    """
    if not isinstance(text, str):
        return tuple(float(x) for x in listify(text))

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like start:end:step. Got '{text}'")
        start, end, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"grid step must be positive. Got {step}")
        if end < start:
            raise ValueError(f"grid end must not be below its start. Got '{text}'")
        # round to kill float drift like 0.06000000000000001
        count = int(np.floor((end - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 12) for k in range(count))

    values = tuple(float(v) for v in text.split(",") if v.strip())
    if not values:
        raise ValueError("grid must contain at least one value")
    return values


def natural_key(label: str) -> tuple:
    """Sort key putting ``w2`` before ``w10``."""
    return tuple(
        (0, int(tok), "") if tok.isdigit() else (1, 0, tok)
        for tok in re.split(r"(\d+)", label)
        if tok
    )
