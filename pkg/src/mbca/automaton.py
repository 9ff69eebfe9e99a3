"""Deterministic realtime blind one-counter machines with Muller acceptance.

The pushdown alphabet is fixed to {Z0, I} and a store word I^n Z0 is kept as
the integer n.  Transitions are tabulated per (state, letter, level), where
level "Z" applies when the counter is zero and "I" when it is positive.
Blindness means every Z-level entry is mirrored verbatim at I-level, so the
machine can never observe its counter; the converse may fail, which is how a
run blocks at zero level.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

LEVEL_ZERO = "Z"
LEVEL_POS = "I"
LEVELS = (LEVEL_ZERO, LEVEL_POS)


class Transition(NamedTuple):
    source: str
    letter: str
    level: str
    target: str
    delta: int


class Configuration(NamedTuple):
    state: str
    counter: int


@dataclass(frozen=True)
class Violation:
    """One broken well-formedness rule, anchored at the offending table entry."""

    rule: str  # BlindnessViolation | DeltaOutOfRange | NondeterministicEntry | DanglingReference
    detail: str
    where: tuple | None = None


class MbcaError(Exception):
    """Base class for errors raised by this package."""


class InvalidMachine(MbcaError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(f"{v.rule}: {v.detail}" for v in violations)
        super().__init__(f"machine is not a valid MBCA ({lines})")


@dataclass(frozen=True)
class Mbca:
    """A Muller blind one-counter automaton.

    Immutable after construction; build through :func:`validate` (or
    :func:`parse_machine`) so the determinism, delta-range and blindness
    rules are enforced.
    """

    name: str
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...]
    accept_family: frozenset[frozenset[str]]

    def initial_configuration(self) -> Configuration:
        return Configuration(self.initial, 0)

    def max_positive_delta(self) -> int:
        return max((t.delta for t in self.transitions if t.delta > 0), default=0)

    def entry(self, state: str, letter: str, level: str) -> tuple[str, int] | None:
        return _delta_map(self).get((state, letter, level))


@lru_cache(maxsize=None)
def _delta_map(machine: Mbca) -> dict[tuple[str, str, str], tuple[str, int]]:
    return {(t.source, t.letter, t.level): (t.target, t.delta) for t in machine.transitions}


def check(
    name: str,
    alphabet: Iterable[str],
    states: Iterable[str],
    initial: str,
    transitions: Iterable[Transition],
    accept_family: Iterable[Iterable[str]],
) -> list[Violation]:
    """Collect every violated well-formedness rule of a candidate machine."""
    alphabet = tuple(alphabet)
    states = tuple(states)
    transitions = tuple(Transition(*t) for t in transitions)
    violations: list[Violation] = []
    state_set, letter_set = set(states), set(alphabet)

    seen: dict[tuple[str, str, str], Transition] = {}
    for t in transitions:
        key = (t.source, t.letter, t.level)
        if key in seen and seen[key] != t:
            violations.append(
                Violation("NondeterministicEntry", f"two entries for {key}", key)
            )
        seen[key] = t
        if t.level not in LEVELS:
            violations.append(Violation("DanglingReference", f"unknown level {t.level!r}", key))
            continue
        if t.level == LEVEL_ZERO and t.delta < 0:
            violations.append(
                Violation("DeltaOutOfRange", f"Z-level delta {t.delta} < 0 at {key}", key)
            )
        if t.level == LEVEL_POS and t.delta < -1:
            violations.append(
                Violation("DeltaOutOfRange", f"I-level delta {t.delta} < -1 at {key}", key)
            )
        for q in (t.source, t.target):
            if q not in state_set:
                violations.append(Violation("DanglingReference", f"unknown state {q!r}", key))
        if t.letter not in letter_set:
            violations.append(Violation("DanglingReference", f"unknown letter {t.letter!r}", key))

    table = {k: (t.target, t.delta) for k, t in seen.items()}
    for (q, a, level), move in table.items():
        if level == LEVEL_ZERO:
            if table.get((q, a, LEVEL_POS)) != move:
                violations.append(
                    Violation(
                        "BlindnessViolation",
                        f"Z-entry for ({q}, {a}) lacks an identical I-entry",
                        (q, a, LEVEL_ZERO),
                    )
                )

    if initial not in state_set:
        violations.append(Violation("DanglingReference", f"initial state {initial!r} unknown"))
    for member in accept_family:
        for q in member:
            if q not in state_set:
                violations.append(
                    Violation("DanglingReference", f"accept set mentions unknown state {q!r}")
                )
    return violations


def validate(
    name: str,
    alphabet: Iterable[str],
    states: Iterable[str],
    initial: str,
    transitions: Iterable[Transition | tuple],
    accept_family: Iterable[Iterable[str]],
) -> Mbca:
    """Build a machine, raising :class:`InvalidMachine` with the full report on failure."""
    transitions = tuple(sorted(Transition(*t) for t in transitions))
    violations = check(name, alphabet, states, initial, transitions, accept_family)
    if violations:
        raise InvalidMachine(violations)
    return Mbca(
        name=name,
        alphabet=tuple(alphabet),
        states=tuple(states),
        initial=initial,
        transitions=transitions,
        accept_family=frozenset(frozenset(f) for f in accept_family),
    )


def step(machine: Mbca, config: Configuration, letter: str) -> Configuration | None:
    """Apply one input letter; ``None`` means the run blocks (a legal outcome)."""
    level = LEVEL_ZERO if config.counter == 0 else LEVEL_POS
    move = machine.entry(config.state, letter, level)
    if move is None:
        return None
    target, delta = move
    return Configuration(target, config.counter + delta)


# --- bit-exact text format -------------------------------------------------
#
#   mbca <name>
#   alphabet <letter>+
#   states <state>+
#   initial <state>
#   accept { <state>* }            # one line per accept-family member
#   trans <state> <letter> <Z|I> <state> <signed-int>


def parse_machine(text: str) -> Mbca:
    name = ""
    alphabet: list[str] = []
    states: list[str] = []
    initial = ""
    accept: list[list[str]] = []
    transitions: list[Transition] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        directive, args = tokens[0], tokens[1:]
        if directive == "mbca":
            if len(args) != 1:
                raise InvalidMachine([Violation("DanglingReference", f"line {lineno}: bad mbca line")])
            name = args[0]
        elif directive == "alphabet":
            alphabet.extend(args)
        elif directive == "states":
            states.extend(args)
        elif directive == "initial":
            if len(args) != 1:
                raise InvalidMachine([Violation("DanglingReference", f"line {lineno}: bad initial line")])
            initial = args[0]
        elif directive == "accept":
            if not args or args[0] != "{" or args[-1] != "}":
                raise InvalidMachine([Violation("DanglingReference", f"line {lineno}: accept needs {{ }}")])
            accept.append(args[1:-1])
        elif directive == "trans":
            if len(args) != 5:
                raise InvalidMachine([Violation("DanglingReference", f"line {lineno}: bad trans line")])
            src, letter, level, dst, delta = args
            try:
                d = int(delta)
            except ValueError:
                raise InvalidMachine(
                    [Violation("DeltaOutOfRange", f"line {lineno}: bad delta {delta!r}")]
                ) from None
            transitions.append(Transition(src, letter, level, dst, d))
        else:
            raise InvalidMachine(
                [Violation("DanglingReference", f"line {lineno}: unknown directive {directive!r}")]
            )
    return validate(name or "machine", alphabet, states, initial, transitions, accept)


def _fmt_delta(d: int) -> str:
    return f"+{d}" if d > 0 else str(d)


def emit_machine(machine: Mbca) -> str:
    lines = [f"mbca {machine.name}"]
    lines.append("alphabet " + " ".join(machine.alphabet))
    lines.append("states " + " ".join(machine.states))
    lines.append(f"initial {machine.initial}")
    order = {q: i for i, q in enumerate(machine.states)}
    for member in sorted(machine.accept_family, key=lambda f: sorted(order[q] for q in f)):
        lines.append("accept { " + " ".join(sorted(member, key=order.get)) + " }")
    for t in machine.transitions:
        lines.append(
            f"trans {t.source} {t.letter} {t.level} {t.target} {_fmt_delta(t.delta)}"
        )
    return "\n".join(lines) + "\n"
