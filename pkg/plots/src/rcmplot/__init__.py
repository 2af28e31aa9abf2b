"""Figure rendering for persisted random connection model results."""

__version__ = "0.1.0"
