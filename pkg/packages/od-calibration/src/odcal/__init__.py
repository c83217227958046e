"""odcal: simulation-based OD demand calibration against road counts."""

__version__ = "0.1.0"
