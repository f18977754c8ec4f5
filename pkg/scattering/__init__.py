"""Effective s-wave scattering lengths of Bogoliubov quasi-particles."""

__version__ = '1.0.0'
