"""Runs on ultimately periodic words, membership, and loop witnesses.

An ultimately periodic word u . v^omega is the decidable carrier for every
membership question here.  The simulator halts at the first of: blocking, an
exact repetition of (state, counter, phase), or two period boundaries showing
the same state with a non-decreasing counter.  The last rule is sound only
because blind counters are shift-monotone: a segment that was valid from a
lower counter replays verbatim from any higher one, so the future of the run
is the same state sequence shifted upward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .automaton import Configuration, Mbca, MbcaError, step


class UPWord(NamedTuple):
    prefix: tuple[str, ...]
    period: tuple[str, ...]

    def letter_at(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def render(self) -> str:
        return " ".join(self.prefix) + " ; " + " ".join(self.period)


def parse_word(text: str) -> UPWord:
    """Parse the ``u ; v`` syntax with space-separated letters."""
    if ";" not in text:
        raise MbcaError(f"word {text!r} lacks the ';' prefix/period separator")
    u, v = text.split(";", 1)
    period = tuple(v.split())
    if not period:
        raise MbcaError("period must be nonempty")
    return UPWord(tuple(u.split()), period)


class CapExceeded(MbcaError):
    """The provable step bound was exceeded: an implementation bug, not an input."""


@dataclass(frozen=True)
class Outcome:
    kind: str  # blocked | periodic | ramp
    position: int = 0  # blocked: index of the letter that could not be read
    cycle_start: int = 0  # periodic/ramp: position of the anchor boundary
    cycle_len: int = 0  # periodic/ramp: length of the repeating segment
    counter_shift: int = 0  # ramp: counter gain per segment (0 for periodic)


@dataclass(frozen=True)
class RunTrace:
    """A finite prefix of the unique run, long enough to determine its tail.

    ``configs[i]`` is the configuration before reading letter ``i``; for
    non-blocked outcomes the stored prefix extends two segments past the
    detected repeat so loop witnesses can be re-anchored inside it.
    """

    word: UPWord
    configs: tuple[Configuration, ...]
    outcome: Outcome
    inf_set: frozenset[str] | None


def run(machine: Mbca, word: UPWord) -> RunTrace:
    """Simulate until the ultimately periodic tail of the run is decided."""
    u_len, v_len = len(word.prefix), len(word.period)
    configs: list[Configuration] = [machine.initial_configuration()]
    boundary_seen: dict[str, list[tuple[int, int]]] = {}

    def simulate_to(pos_target: int) -> Outcome | None:
        while len(configs) - 1 < pos_target:
            pos = len(configs) - 1
            nxt = step(machine, configs[-1], word.letter_at(pos))
            if nxt is None:
                return Outcome("blocked", position=pos)
            configs.append(nxt)
        return None

    blocked = simulate_to(u_len)
    if blocked is None:
        c_u = configs[u_len].counter
        max_periods = len(machine.states) * (
            c_u + len(machine.states) * machine.max_positive_delta() * v_len + 1
        ) + 2
        detected: Outcome | None = None
        for k in range(max_periods):
            pos = u_len + k * v_len
            blocked = simulate_to(pos)
            if blocked is not None:
                break
            state, counter = configs[pos]
            for prev_pos, prev_counter in boundary_seen.get(state, ()):
                if counter >= prev_counter:
                    detected = Outcome(
                        "periodic" if counter == prev_counter else "ramp",
                        cycle_start=prev_pos,
                        cycle_len=pos - prev_pos,
                        counter_shift=counter - prev_counter,
                    )
                    break
            if detected:
                break
            boundary_seen.setdefault(state, []).append((pos, counter))
        else:
            raise CapExceeded(f"no repetition within {max_periods} periods")

    if blocked is not None:
        return RunTrace(word, tuple(configs), blocked, None)

    assert detected is not None
    # Two extra segments so extract_loop_witness can re-anchor past the repeat.
    tail = simulate_to(detected.cycle_start + 3 * detected.cycle_len)
    assert tail is None, "segment replay cannot block (shift monotonicity)"
    seg = range(detected.cycle_start, detected.cycle_start + detected.cycle_len)
    inf_set = frozenset(configs[i].state for i in seg)
    return RunTrace(word, tuple(configs), detected, inf_set)


def member(machine: Mbca, word: UPWord) -> bool:
    trace = run(machine, word)
    return trace.outcome.kind != "blocked" and trace.inf_set in machine.accept_family


class LoopWitness(NamedTuple):
    anchor_index: int
    close_index: int
    anchor_state: str
    anchor_counter: int
    visited: frozenset[str]
    kind: str  # plus | equal
    level: str  # Z | I


def extract_loop_witness(trace: RunTrace) -> LoopWitness:
    """Cut one anchored loop out of a non-blocked trace.

    The anchor is the earliest minimal-counter position of the repeating
    segment, so every later explored position carries at least its counter.
    With a positive counter shift the anchor is moved one segment up to keep
    the anchor counter positive (the zero-level case demands equality).
    """
    if trace.outcome.kind == "blocked":
        raise MbcaError("blocked runs have no loop witness")
    start, length = trace.outcome.cycle_start, trace.outcome.cycle_len
    shift = trace.outcome.counter_shift
    seg = range(start, start + length)
    anchor = min(seg, key=lambda i: (trace.configs[i].counter, i))
    if shift > 0 and trace.configs[anchor].counter == 0:
        anchor += length
    close = anchor + length
    visited = frozenset(
        trace.configs[i].state for i in range(anchor, close)
    )
    counter = trace.configs[anchor].counter
    kind = "plus" if shift > 0 else "equal"
    level = "Z" if counter == 0 else "I"
    return LoopWitness(anchor, close, trace.configs[anchor].state, counter, visited, kind, level)
