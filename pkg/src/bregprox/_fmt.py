"""Deterministic CSV formatting shared by all CLI subcommands.

Conventions: comma-separated, '.' decimal point, scientific notation for
magnitudes below 1e-4 or above 1e6, LF line endings, one header row.
"""

from __future__ import annotations

import hashlib
import math
import os


def fmt_num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    ax = abs(x)
    if ax < 1e-4 or ax > 1e6:
        return f"{x:.12e}"
    return f"{x:.12g}"


def fmt_cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (list, tuple)):
        return ";".join(fmt_cell(v) for v in x)
    try:
        import numpy as np
        if isinstance(x, np.ndarray):
            return ";".join(fmt_num(v) for v in x.ravel())
    except ImportError:  # pragma: no cover
        pass
    return fmt_num(x)


def write_csv(path: str, header, rows) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt_cell(c) for c in row) + "\n")


def derive_seed(master_seed: int, label: str) -> int:
    """Per-experiment 64-bit seed derived from a master seed and a label."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")
