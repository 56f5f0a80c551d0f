"""Bubble model of a Mg impurity in superfluid helium, with spectrum analysis tools."""

__version__ = "0.1.0"
