"""Offline figure rendering for skewmf data dumps.

Consumes only the CSV and binary field artifacts written by the skewmf
command-line driver; reference curves and constants are recomputed here
from scratch so that a transcription error on either side shows up as a
visible mismatch in the figures.
"""

from .io import (FigureInputError, read_asymptotics_csv, read_field,
                 read_lambda_map_csv, read_mtcheck_csv)
from .reference import (critical_n_values, hyperbola, mt_reference,
                        slope_references)
from .render import FigureJob, render

__version__ = "0.1.0"

__all__ = [
    "FigureInputError", "FigureJob", "critical_n_values", "hyperbola",
    "mt_reference", "read_asymptotics_csv", "read_field",
    "read_lambda_map_csv", "read_mtcheck_csv", "render", "slope_references",
]
