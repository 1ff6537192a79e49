"""Out-of-time-ordered correlators for spin chains coupled to bosonic baths."""

__version__ = "0.1.0"
