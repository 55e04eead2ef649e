"""Lattice-level invariants of Hitchin systems and their Langlands duals."""

__version__ = "0.1.0"

# Identifier of the frozen cup-product sign convention; embedded in reports.
CONVENTION = "cup-polygon-v1"
