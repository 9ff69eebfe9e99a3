"""Blind-counter Muller automata: invariants, Wadge names, games."""

from .automaton import (
    Configuration,
    InvalidMachine,
    Mbca,
    MbcaError,
    Transition,
    Violation,
    check,
    emit_machine,
    parse_machine,
    step,
    validate,
)
from .hierarchy import (
    Analyzer,
    Chain,
    InvariantTriple,
    OmegaLink,
    OrdinalW2,
    Superchain,
    chains,
    invariants,
    parse_ordinal,
    superchains,
)
from .loops import AnchorUnreachable, LoopDescriptor, essential_sets, loops, witness_word
from .naming import (
    DerivationContext,
    MalformedName,
    NameBlock,
    NotDerivable,
    WadgeName,
    compare,
    degree_rank,
    derive,
    parse_name,
    wadge_name,
)
from .reachability import ReachSet, StateReach, min_counter_to, reach, reachable_unbounded
from .semantics import (
    CapExceeded,
    LoopWitness,
    RunTrace,
    UPWord,
    extract_loop_witness,
    member,
    parse_word,
    run,
)
from .wagner import is_counter_free, wagner_invariants

__all__ = [name for name in dir() if not name.startswith("_")]
