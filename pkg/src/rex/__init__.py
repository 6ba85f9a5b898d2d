"""Reactive notebook kernel and reaction-conformance harness."""

__version__ = "0.1.0"
