"""Time-bin QKD simulator: passive detection, autocompensation, dephasing noise."""

__version__ = "0.1.0"
