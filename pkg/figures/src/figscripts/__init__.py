"""Batch figure rendering for sweep, Wigner and Klyshko CSV outputs."""

__version__ = "0.1.0"

from .render import PANELS, RenderResult, render
from .schema import (
    FigureSchemaError,
    KlyshkoTable,
    SweepTable,
    WignerTable,
    digest_arrays,
    read_klyshko,
    read_sweep,
    read_wigner,
)

__all__ = [
    "PANELS",
    "RenderResult",
    "render",
    "FigureSchemaError",
    "KlyshkoTable",
    "SweepTable",
    "WignerTable",
    "digest_arrays",
    "read_klyshko",
    "read_sweep",
    "read_wigner",
]
