"""Sweep output writers."""

import logging
from typing import Dict, List, Sequence

import pandas as pd

from .errors import InputError
from .models import OverheadResult
from .renderers.base import join_ints

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["omega", "overhead", "l_max", "lambdas", "ds", "eps_A", "eps_Y"]


def sweep_frame(results: Sequence[OverheadResult]) -> pd.DataFrame:
    """One row per sweep point with the CSV columns."""
    rows = [
        {
            "omega": r.omega,
            "overhead": r.overhead,
            "l_max": r.schedule.l_max,
            "lambdas": join_ints(r.schedule.lambdas),
            "ds": join_ints(r.schedule.ds),
            "eps_A": r.eps_A,
            "eps_Y": r.eps_Y,
        }
        for r in results
    ]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def combined_frame(groups: Dict[str, Sequence[OverheadResult]]) -> pd.DataFrame:
    """A single group keeps the plain header; several get ``<label>_`` column groups after ``omega``."""
    labels = list(groups)
    if len(labels) == 1:
        return sweep_frame(groups[labels[0]])
    frames: List[pd.DataFrame] = []
    omegas = None
    for label in labels:
        frame = sweep_frame(groups[label])
        if omegas is None:
            omegas = frame["omega"]
        elif not omegas.equals(frame["omega"]):
            raise InputError("sweep groups must share the same omega points")
        frames.append(frame.drop(columns="omega").add_prefix(f"{label}_"))
    return pd.concat([omegas.to_frame()] + frames, axis=1)


class SweepWriter:
    """Writes optimized sweep points as CSV."""

    def __init__(self, float_format: str = "%.10g"):
        self.float_format = float_format

    def write(self, path: str, groups: Dict[str, Sequence[OverheadResult]]) -> pd.DataFrame:
        frame = combined_frame(groups)
        try:
            frame.to_csv(path, index=False, float_format=self.float_format, na_rep="")
        except OSError as e:
            raise InputError(f"cannot write sweep file {path}: {e}") from e
        logger.info("Wrote %d sweep rows to %s", len(frame), path)
        return frame
