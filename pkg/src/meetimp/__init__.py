"""Proof systems, finite semantics and duality for the conjunction-implication fragment with box and monotone modalities."""

__version__ = "0.1.0"
