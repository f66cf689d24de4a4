"""Conditional table discovery: search a pool of tables with a query table,
a natural-language condition, or both, behind an HTTP API, a CLI and a web
console."""

__version__ = "0.1.0"
