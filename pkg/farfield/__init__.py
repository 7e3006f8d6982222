"""Top-level package for far-field RIR simulation, target shaping and dataset synthesis."""

__version__ = "0.1.0"
