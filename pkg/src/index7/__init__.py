"""Modular-form data for the index-7 noncongruence subgroups of PSL2(Z)."""

__version__ = "0.1.0"
