"""Scam-engagement measurement pipeline.

Ingests scam reports, drives staged conversations against (simulated)
scammers, extracts and clusters indicators of compromise, fingerprints scam
web infrastructure, and attributes cryptocurrency losses. An operator CLI
and HTTP API live under :mod:`anansi.control_plane`.
"""

__version__ = "0.1.0"
