"""Public-suffix-aware domain parsing.

Backed by a bundled snapshot of common public suffixes (one per line,
multi-label entries like `co.uk` supported). Scam infrastructure leans on
cheap TLDs, so the snapshot skews toward those; regenerate from a full
public-suffix list if coverage gaps show up.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_SNAPSHOT_RESOURCE = "public_suffixes.txt"


@dataclass(frozen=True)
class RegistrableDomain:
    domain: str        # full domain as given, lowercased
    sld: str           # label immediately below the public suffix
    suffix: str        # matched public suffix ("tld" in reports)

    @property
    def registrable(self) -> str:
        return f"{self.sld}.{self.suffix}"


class PublicSuffixes:
    """Longest-match lookup over a public-suffix snapshot."""

    def __init__(self, suffixes: set[str]):
        self._suffixes = {s.lower().strip(".") for s in suffixes if s.strip()}

    @classmethod
    def bundled(cls) -> "PublicSuffixes":
        text = resources.files("anansi").joinpath("data", _SNAPSHOT_RESOURCE).read_text("utf-8")
        return cls(set(text.split()))

    @classmethod
    def from_file(cls, path: str | Path) -> "PublicSuffixes":
        return cls(set(Path(path).read_text("utf-8").split()))

    def __contains__(self, suffix: str) -> bool:
        return suffix.lower() in self._suffixes

    def split(self, domain: str) -> RegistrableDomain | None:
        """Return the registrable split, or None if no known suffix matches
        or there is no label left below the suffix."""
        name = domain.lower().strip(".")
        labels = name.split(".")
        if len(labels) < 2 or any(not lab for lab in labels):
            return None
        # longest suffix wins: try co.uk before uk
        for take in range(len(labels) - 1, 0, -1):
            suffix = ".".join(labels[-take:])
            if suffix in self._suffixes:
                return RegistrableDomain(domain=name, sld=labels[-take - 1], suffix=suffix)
        return None


_BUNDLED: PublicSuffixes | None = None


def bundled_suffixes() -> PublicSuffixes:
    global _BUNDLED
    if _BUNDLED is None:
        _BUNDLED = PublicSuffixes.bundled()
    return _BUNDLED
