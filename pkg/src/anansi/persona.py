"""Deterministic synthetic victim personas.

Every persona field is a pure function of a 64-bit seed, drawn from the
bundled lexicons via SHA-256 (stable across platforms and Python
versions, unlike the stdlib Mersenne generator's helper methods). A
binding table pins one persona per conversation so answers stay
consistent when a scammer drags the conversation across platforms.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

QUESTION_KEYS = (
    "name", "age", "location", "occupation", "experience",
    "availability", "payment_app",
)

CRYPTO_EXPERIENCE_LEVELS = ("none", "beginner", "comfortable")

_ANSWER_PAYMENT_APPS = ("Cash App", "PayPal", "Venmo", "Zelle")


class UnknownQuestionKey(KeyError):
    pass


class BindingConflict(Exception):
    """A conversation is already bound to a different persona."""


@dataclass(frozen=True)
class VictimPersona:
    persona_id: str
    seed: int
    name: str
    age: int
    city: str
    state: str
    occupation: str
    prior_income_claim: int        # USD per month
    crypto_experience: str
    availability_hours: int        # per day
    backstory_facts: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class PersonaBinding:
    conversation_id: str
    persona_id: str
    bound_at: datetime


def _load_lines(name: str, override: str | Path | None = None) -> list[str]:
    if override is not None:
        text = Path(override).read_text("utf-8")
    else:
        text = resources.files("anansi").joinpath("data", name).read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


class PersonaLexicons:
    def __init__(self, names: list[str], cities: list[str], occupations: list[str]):
        if not (names and cities and occupations):
            raise ValueError("persona lexicons must be non-empty")
        self.names = names
        self.cities = cities
        self.occupations = occupations

    @classmethod
    def bundled(cls) -> "PersonaLexicons":
        return cls(
            _load_lines("names.txt"),
            _load_lines("cities.txt"),
            _load_lines("occupations.txt"),
        )


_LEX: PersonaLexicons | None = None


def _lexicons() -> PersonaLexicons:
    global _LEX
    if _LEX is None:
        _LEX = PersonaLexicons.bundled()
    return _LEX


def _draw(seed: int, field: str) -> int:
    material = seed.to_bytes(8, "big", signed=False) + b"|" + field.encode("ascii")
    return int.from_bytes(hashlib.sha256(b"persona:" + material).digest()[:8], "big")


def generate_persona(seed: int, lexicons: PersonaLexicons | None = None) -> VictimPersona:
    """Fully populated persona; same seed always yields the identical value."""
    seed = seed & ((1 << 64) - 1)
    lex = lexicons or _lexicons()
    name = lex.names[_draw(seed, "name") % len(lex.names)]
    age = 21 + _draw(seed, "age") % 45
    city_line = lex.cities[_draw(seed, "city") % len(lex.cities)]
    city, _, state = (part.strip() for part in city_line.partition(","))
    occupation = lex.occupations[_draw(seed, "occupation") % len(lex.occupations)]
    income = 1800 + (_draw(seed, "income") % 33) * 100
    experience = CRYPTO_EXPERIENCE_LEVELS[_draw(seed, "experience") % 3]
    hours = 1 + _draw(seed, "hours") % 8
    payment_app = _ANSWER_PAYMENT_APPS[_draw(seed, "payment_app") % len(_ANSWER_PAYMENT_APPS)]

    experience_phrase = {
        "none": "I've never used cryptocurrency before",
        "beginner": "I've only tried cryptocurrency once or twice",
        "comfortable": "I'm fairly comfortable with cryptocurrency",
    }[experience]
    facts: tuple[tuple[str, str], ...] = (
        ("name", f"My name is {name}."),
        ("age", f"I'm {age} years old."),
        ("location", f"I live in {city}, {state}."),
        ("occupation", f"I work as a {occupation}, making about ${income} a month."),
        ("experience", f"{experience_phrase}."),
        ("availability", f"I can put in about {hours} hours a day."),
        ("payment_app", f"I usually use {payment_app}."),
    )
    persona_id = "p-" + hashlib.sha256(b"persona-id:" + seed.to_bytes(8, "big")).hexdigest()[:12]
    return VictimPersona(
        persona_id=persona_id,
        seed=seed,
        name=name,
        age=age,
        city=city,
        state=state,
        occupation=occupation,
        prior_income_claim=income,
        crypto_experience=experience,
        availability_hours=hours,
        backstory_facts=facts,
    )


def persona_answer(persona: VictimPersona, question_key: str) -> str:
    """Stable keyed answer drawn from the persona's backstory."""
    for key, answer in persona.backstory_facts:
        if key == question_key:
            return answer
    raise UnknownQuestionKey(question_key)


class PersonaBindings:
    """First-writer-wins binding table (compare-and-set under a lock)."""

    def __init__(self) -> None:
        self._bindings: dict[str, PersonaBinding] = {}
        self._lock = threading.Lock()

    def bind(self, conversation_id: str, persona_id: str,
             at: datetime | None = None) -> PersonaBinding:
        at = at or datetime.now(timezone.utc)
        with self._lock:
            existing = self._bindings.get(conversation_id)
            if existing is not None:
                if existing.persona_id != persona_id:
                    raise BindingConflict(
                        f"{conversation_id} already bound to {existing.persona_id}")
                return existing
            binding = PersonaBinding(conversation_id, persona_id, at)
            self._bindings[conversation_id] = binding
            return binding

    def get(self, conversation_id: str) -> PersonaBinding | None:
        with self._lock:
            return self._bindings.get(conversation_id)

    def __len__(self) -> int:
        return len(self._bindings)
