"""Offline plots of estimation-run CSV records."""

from .plot import PlotSpec, RunData, SchemaError, load_run, plot_run

__all__ = ["PlotSpec", "RunData", "SchemaError", "load_run", "plot_run"]
