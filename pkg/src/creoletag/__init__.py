"""Multidialectal feature-structure TAG toolkit for French-based Creoles."""

__version__ = "0.1.0"
