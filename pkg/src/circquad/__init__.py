"""Mixed interpolation-regression quadrature on the unit circle."""

__version__ = "0.1.0"
