"""Derivation, recursive Wadge names, name comparison, and ordinal ranks.

A non-prime machine is derived: keep the states from which positive and
negative maximal superchains both stay reachable, with per-state counter
thresholds marking the least counter that preserves the choice; the residual
analysis keeps only loops whose anchors are reachable at or above their
threshold.  The recursion strictly shrinks the maximal chain length, and the
resulting name E_{m1}^{a1} ... H_{mk+1}^{ak+1} (H in {C, D}, or a bare E
terminal) is compared blockwise: equal index prefixes, then either the
shorter name ends compatibly or the first divergent block decides by (m, a).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .automaton import Mbca, MbcaError
from .hierarchy import Analyzer, InvariantTriple, OrdinalW2, parse_ordinal
from .reachability import min_counter_to


class NotDerivable(MbcaError):
    pass


class MalformedName(MbcaError):
    pass


class NameBlock(NamedTuple):
    letter: str  # C | D | E
    m: int
    alpha: OrdinalW2


@dataclass(frozen=True)
class WadgeName:
    """Blocks with strictly decreasing m; only the last may be C or D.

    A name whose blocks are empty, or whose last letter is E, is bare-E
    terminated (the recursion bottomed out in a loop-free residual).
    """

    blocks: tuple[NameBlock, ...]

    @property
    def terminal_bare_e(self) -> bool:
        return not self.blocks or self.blocks[-1].letter == "E"

    def render(self) -> str:
        parts = [f"{b.letter}_{b.m}^{b.alpha.render()}" for b in self.blocks]
        if self.terminal_bare_e:
            parts.append("E")
        return " ".join(parts)


def check_name(name: WadgeName) -> None:
    prev_m = None
    for i, block in enumerate(name.blocks):
        if block.letter not in ("C", "D", "E"):
            raise MalformedName(f"bad letter {block.letter!r}")
        if block.letter in ("C", "D") and i != len(name.blocks) - 1:
            raise MalformedName("C/D allowed only in the final block")
        if block.m < 1:
            raise MalformedName("block m must be positive")
        if prev_m is not None and block.m >= prev_m:
            raise MalformedName("block m values must strictly decrease")
        if block.alpha < OrdinalW2(0, 1):
            raise MalformedName("indexed blocks need alpha >= 1")
        prev_m = block.m


def parse_name(text: str) -> WadgeName:
    blocks: list[NameBlock] = []
    tokens = text.split()
    if not tokens:
        raise MalformedName("empty name")
    for i, token in enumerate(tokens):
        if token == "E" and "_" not in token:
            if i != len(tokens) - 1:
                raise MalformedName("bare E must be terminal")
            break
        try:
            letter, rest = token.split("_", 1)
            m_text, alpha_text = rest.split("^", 1)
            blocks.append(NameBlock(letter, int(m_text), parse_ordinal(alpha_text)))
        except (ValueError, IndexError):
            raise MalformedName(f"bad block {token!r}") from None
    name = WadgeName(tuple(blocks))
    check_name(name)
    return name


# -- derivation ----------------------------------------------------------------


@dataclass(frozen=True)
class DerivationContext:
    sub_states: tuple[str, ...]
    thresholds: dict[str, int]
    machine: Mbca  # the restricted automaton


def _superchain_entries(analyzer: Analyzer):
    """Per sign, the (state, floor) options whose reachability means the sign's
    maximal superchains stay reachable."""
    entries: dict[str, set[tuple[str, int]]] = {"positive": set(), "negative": set()}
    for sign, options in analyzer.superchain_entry_options().items():
        for kind, payload in options:
            if kind == "site":
                for d in analyzer.descriptors(payload):
                    entries[sign].add((d.anchor, analyzer.operating_min(d)))
            else:
                entries[sign].add((payload.anchor, analyzer.operating_min(payload)))
    return entries


def derive(machine: Mbca, analyzer: Analyzer | None = None) -> DerivationContext:
    """Restrict to states keeping both superchain signs reachable, with thresholds."""
    analyzer = analyzer or Analyzer(machine)
    inv = analyzer.invariants()
    if inv.s != 0:
        raise NotDerivable(f"machine is prime (s = {inv.s:+d})")
    entries = _superchain_entries(analyzer)

    def pred_for(options):
        return lambda rs: any(rs.at(q).has_value_at_least(f) for q, f in options)

    floor_cap = max((f for opts in entries.values() for _, f in opts), default=0)
    counters = min_counter_to(
        machine,
        [pred_for(entries["positive"]), pred_for(entries["negative"])],
        extra_cap=floor_cap,
    )
    sub_states = tuple(q for q in machine.states if counters[q] is not None)
    keep = set(sub_states)
    assert machine.initial in keep, "the initial state always keeps both options"
    transitions = tuple(
        t for t in machine.transitions if t.source in keep and t.target in keep
    )
    # blind twins share their target, so the restriction cannot break blindness
    restricted = Mbca(
        name=machine.name + "'",
        alphabet=machine.alphabet,
        states=sub_states,
        initial=machine.initial,
        transitions=transitions,
        accept_family=frozenset(
            f for f in machine.accept_family if f <= keep
        ),
    )
    new_thresholds = {
        q: max(analyzer.threshold(q), counters[q]) for q in sub_states
    }
    return DerivationContext(sub_states, new_thresholds, restricted)


def wadge_name(machine: Mbca) -> WadgeName:
    """The recursive name; each derivation strictly decreases m."""
    analyzer = Analyzer(machine)
    blocks: list[NameBlock] = []
    while True:
        inv = analyzer.invariants()
        if inv.m == 0:
            break  # loop-free residual: bare E terminal
        if inv.s == 1:
            blocks.append(NameBlock("C", inv.m, inv.n))
            break
        if inv.s == -1:
            blocks.append(NameBlock("D", inv.m, inv.n))
            break
        blocks.append(NameBlock("E", inv.m, inv.n))
        ctx = derive(analyzer.machine, analyzer)
        analyzer = Analyzer(ctx.machine, ctx.thresholds)
        assert analyzer.invariants().m < inv.m, "derivation must shrink m"
    name = WadgeName(tuple(blocks))
    check_name(name)
    return name


def machine_class(machine: Mbca) -> InvariantTriple:
    return Analyzer(machine).invariants()


# -- comparison ------------------------------------------------------------------


def _leq(a: WadgeName, b: WadgeName) -> bool:
    """One direction of the blockwise order on names."""
    ka, kb = len(a.blocks), len(b.blocks)
    if ka == 0:
        return True  # lone E sits below everything
    common = 0
    while (
        common < min(ka, kb)
        and a.blocks[common].m == b.blocks[common].m
        and a.blocks[common].alpha == b.blocks[common].alpha
    ):
        common += 1
    # a exhausted within b, letters compatible at a's last position
    if common == ka and ka <= kb:
        b_letter = b.blocks[ka - 1].letter
        if b_letter == "E" or a.blocks[-1].letter == b_letter:
            return True
    # first divergent indexed position decides
    if common < min(ka, kb):
        ba, bb = a.blocks[common], b.blocks[common]
        if ba.m < bb.m or (ba.m == bb.m and ba.alpha < bb.alpha):
            return True
    return False


def compare(a: WadgeName, b: WadgeName) -> str:
    """``less``, ``greater``, ``equivalent``, or ``dual``."""
    check_name(a)
    check_name(b)
    forward, backward = _leq(a, b), _leq(b, a)
    if forward and backward:
        return "equivalent"
    if forward:
        return "less"
    if backward:
        return "greater"
    if (
        a.blocks
        and b.blocks
        and a.blocks[:-1] == b.blocks[:-1]
        and a.blocks[-1].m == b.blocks[-1].m
        and a.blocks[-1].alpha == b.blocks[-1].alpha
        and {a.blocks[-1].letter, b.blocks[-1].letter} == {"C", "D"}
    ):
        return "dual"
    raise MbcaError(
        f"names {a.render()!r} and {b.render()!r} are incomparable and not dual; "
        "this cannot happen for names of actual machines"
    )


# -- ordinal rank -----------------------------------------------------------------


@dataclass(frozen=True)
class CnfOrdinal:
    """Ordinal below omega^omega in Cantor normal form, exponents decreasing."""

    terms: tuple[tuple[int, int], ...]  # (exponent, coefficient)

    def key(self):
        return tuple((-e, c) for e, c in self.terms)

    def __lt__(self, other: "CnfOrdinal") -> bool:
        for (ea, ca), (eb, cb) in zip(self.terms, other.terms):
            if ea != eb:
                return ea < eb
            if ca != cb:
                return ca < cb
        return len(self.terms) < len(other.terms)

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            else:
                base = "w" if e == 1 else f"w^{e}"
                parts.append(base if c == 1 else f"{base}*{c}")
        return "+".join(parts)


def degree_rank(name: WadgeName) -> CnfOrdinal:
    """A rank below omega^omega, order-compatible with compare on C/D names.

    Block (letter, m, omega*p + s) contributes omega^(2m-1)*p + omega^(2m-2)*s;
    m=1 names land below omega^2 and the whole image sits below omega^omega.
    """
    check_name(name)
    terms: list[tuple[int, int]] = []
    for block in name.blocks:
        if block.alpha.p:
            terms.append((2 * block.m - 1, block.alpha.p))
        if block.alpha.s:
            terms.append((2 * block.m - 2, block.alpha.s))
    merged: dict[int, int] = {}
    for e, c in terms:
        merged[e] = merged.get(e, 0) + c
    return CnfOrdinal(tuple(sorted(merged.items(), reverse=True)))
