"""Heatmap files for single time-frequency maps."""

from __future__ import annotations

from pathlib import Path

from ..errors import ParameterError
from ..tfa import TimeFrequencyMap, to_csv, to_pgm


def export_heatmap(tfmap: TimeFrequencyMap, path) -> Path:
    """Write ``tfmap`` as PGM or CSV, chosen by the file suffix."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        path.write_bytes(to_pgm(tfmap))
    elif suffix == ".csv":
        path.write_text(to_csv(tfmap))
    else:
        raise ParameterError(f"heatmap format must be .pgm or .csv, got {suffix!r}")
    return path
