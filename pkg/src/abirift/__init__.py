"""ABI compatibility toolkit for ELF shared libraries."""

__version__ = "0.1.0"
