"""orqc: density-matrix simulation and diagnostics for closed and open
random quantum circuits (RUC, MLORC, MFORC)."""

__version__ = "0.1.0"
