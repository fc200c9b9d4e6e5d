"""Simulated Doppler-radar hand-gesture recognition: synthesis, time-frequency maps, a numpy CNN."""

__version__ = "0.1.0"
