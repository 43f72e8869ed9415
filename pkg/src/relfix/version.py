"""Single source of the tool version string (kept in sync with packaging)."""

__version__ = "0.1.0"
