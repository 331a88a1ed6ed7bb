"""gravidiff - matter-wave slit diffraction in a uniform gravitational field."""

__version__ = "0.1.0"
