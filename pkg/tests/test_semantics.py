import random

import pytest

from mbca import (
    Configuration,
    MbcaError,
    UPWord,
    extract_loop_witness,
    member,
    parse_word,
    run,
    step,
    validate,
)
from conftest import random_machine


def test_parse_word_syntax():
    w = parse_word("a a a b b ; c")
    assert w == UPWord(("a", "a", "a", "b", "b"), ("c",))
    assert parse_word("; a") == UPWord((), ("a",))
    with pytest.raises(MbcaError):
        parse_word("a a a")
    with pytest.raises(MbcaError):
        parse_word("a ;")


def test_run_accepting_ramp(a1):
    trace = run(a1, parse_word("a a a b b ; c"))
    assert trace.outcome.kind in ("periodic", "ramp")
    assert trace.inf_set == frozenset(["q2"])


def test_run_blocked_at_third_b(a1):
    trace = run(a1, parse_word("a a b b b ; c"))
    assert trace.outcome.kind == "blocked"
    assert trace.outcome.position == 4  # third b, zero counter, no Z-entry
    assert trace.inf_set is None


def test_run_fixed_point(a_all):
    trace = run(a_all, parse_word("; a"))
    assert trace.outcome.kind == "periodic"
    assert trace.inf_set == frozenset(["q"])


def test_membership_example_1(a1):
    assert member(a1, parse_word("a a a b b ; c"))
    assert not member(a1, parse_word("a a b b b ; c"))
    assert member(a1, parse_word("; c"))
    assert not member(a1, parse_word("; a"))


def test_membership_empty_family(a_none):
    assert not member(a_none, parse_word("; a"))


def test_shift_monotonicity_random():
    rng = random.Random(11)
    for _ in range(60):
        machine = random_machine(rng, n_states=4, n_letters=3)
        word = [rng.choice(machine.alphabet) for _ in range(rng.randrange(1, 9))]
        q = rng.choice(machine.states)
        c = rng.randrange(0, 4)
        d = rng.randrange(1, 4)
        low, high = Configuration(q, c), Configuration(q, c + d)
        for a in word:
            nlow = step(machine, low, a)
            if nlow is None:
                break
            nhigh = step(machine, high, a)
            assert nhigh is not None
            assert nhigh.state == nlow.state
            assert nhigh.counter == nlow.counter + d
            low, high = nlow, nhigh


def test_member_stable_under_period_unrolling():
    rng = random.Random(13)
    for _ in range(40):
        machine = random_machine(rng, n_states=3, n_letters=2)
        u = tuple(rng.choice(machine.alphabet) for _ in range(rng.randrange(0, 4)))
        v = tuple(rng.choice(machine.alphabet) for _ in range(rng.randrange(1, 4)))
        assert member(machine, UPWord(u, v)) == member(machine, UPWord(u + v, v))


def test_witness_visited_equals_inf(a1):
    trace = run(a1, parse_word("a a a b b ; c"))
    witness = extract_loop_witness(trace)
    assert witness.visited == trace.inf_set
    assert witness.kind == "equal"
    assert witness.anchor_state == "q2"


def test_witness_pump_plus_archetype():
    machine = validate(
        "pump", ["a"], ["q"], "q",
        [("q", "a", "Z", "q", 1), ("q", "a", "I", "q", 1)], [],
    )
    witness = extract_loop_witness(run(machine, parse_word("; a")))
    assert (witness.level, witness.kind) == ("I", "plus")
    assert witness.anchor_counter > 0


def test_witness_zero_level_equal_archetype(a_all):
    witness = extract_loop_witness(run(a_all, parse_word("; a")))
    assert (witness.level, witness.kind) == ("Z", "equal")
    assert witness.anchor_counter == 0


def test_witness_counters_respect_anchor():
    rng = random.Random(17)
    checked = 0
    for _ in range(300):
        machine = random_machine(rng, n_states=4, n_letters=3)
        u = tuple(rng.choice(machine.alphabet) for _ in range(rng.randrange(0, 5)))
        v = tuple(rng.choice(machine.alphabet) for _ in range(rng.randrange(1, 4)))
        trace = run(machine, UPWord(u, v))
        if trace.outcome.kind == "blocked":
            continue
        witness = extract_loop_witness(trace)
        checked += 1
        assert witness.visited == trace.inf_set
        segment = trace.configs[witness.anchor_index : witness.close_index + 1]
        assert segment[0].state == segment[-1].state == witness.anchor_state
        assert all(c.counter >= witness.anchor_counter for c in segment)
        if witness.level == "Z":
            assert witness.anchor_counter == 0
    assert checked > 20


def test_blocked_run_has_no_witness(a1):
    trace = run(a1, parse_word("a b b ; c"))
    assert trace.outcome.kind == "blocked"
    with pytest.raises(MbcaError):
        extract_loop_witness(trace)
