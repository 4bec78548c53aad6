import threading

import pytest

from anansi.persona import (
    BindingConflict,
    PersonaBindings,
    UnknownQuestionKey,
    generate_persona,
    persona_answer,
)


def test_same_seed_identical_persona():
    assert generate_persona(0) == generate_persona(0)
    assert generate_persona(12345) == generate_persona(12345)


def test_determinism_over_1000_seeds():
    for seed in range(1000):
        assert generate_persona(seed) == generate_persona(seed)


def test_adjacent_seeds_mostly_differ():
    personas = [generate_persona(s) for s in range(1000)]
    differing = sum(
        1 for a, b in zip(personas, personas[1:]) if a != b
    )
    assert differing / 999 >= 0.99


def test_field_ranges():
    for seed in range(500):
        p = generate_persona(seed)
        assert 21 <= p.age <= 65
        assert 1 <= p.availability_hours <= 8
        assert p.crypto_experience in ("none", "beginner", "comfortable")
        assert p.name and p.city and p.state and p.occupation


def test_answer_contains_field():
    p = generate_persona(0)
    assert str(p.age) in persona_answer(p, "age")
    assert p.name in persona_answer(p, "name")
    assert p.city in persona_answer(p, "location")


def test_answers_stable_when_interleaved():
    personas = [generate_persona(s) for s in (0, 1, 2)]
    baselines = {p.persona_id: persona_answer(p, "age") for p in personas}
    for _ in range(10):
        for p in personas:
            assert persona_answer(p, "age") == baselines[p.persona_id]


def test_unknown_question_key():
    with pytest.raises(UnknownQuestionKey):
        persona_answer(generate_persona(0), "shoe_size")


def test_binding_first_writer_wins():
    table = PersonaBindings()
    first = table.bind("conv-1", "p-aaa")
    assert table.bind("conv-1", "p-aaa") == first  # idempotent rebind
    with pytest.raises(BindingConflict):
        table.bind("conv-1", "p-bbb")
    assert table.get("conv-1").persona_id == "p-aaa"


def test_binding_concurrent_single_winner():
    table = PersonaBindings()
    errors: list[Exception] = []

    def worker(pid: str) -> None:
        try:
            table.bind("conv-x", pid)
        except BindingConflict as exc:
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=(f"p-{i}",)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(errors) == 7
    assert table.get("conv-x") is not None
