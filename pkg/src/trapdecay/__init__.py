"""Many-particle tunneling decay from a 1D leaking trap."""

__version__ = "0.1.0"
