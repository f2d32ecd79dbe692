"""m3lab: numerical laboratory for a (2+1)-dimensional integrable spin system,
its moving-frame formulations, and its NLS-type counterpart."""

__version__ = "0.1.0"
