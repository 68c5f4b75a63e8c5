"""ringnet: dynamical and control networks over finite commutative rings."""

__version__ = "0.1.0"
