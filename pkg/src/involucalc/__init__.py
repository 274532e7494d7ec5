"""involucalc: exact symbolic and numerical analysis of locally integrable
involutive structures defined by polynomial first integrals."""

__version__ = "0.1.0"
