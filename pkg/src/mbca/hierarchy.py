"""Alternating chains, transfinite superchains, and the m/n/s invariants.

Chains are strictly increasing alternating sequences of essential sets inside
a site (a maximal essential set).  Finite superchains are one-way alternating
walks over the sites carrying maximal chains.  A length-omega unit pairs an
I-level equal-kind loop of a positive maximal site with one of a negative
maximal site, mutually reachable at high counter with unboundedly reachable
anchors; the counter then meters how often the two sides may alternate.
Longer transfinite parts chain such units through genuinely re-pumping
(tail) reachability, and a finite prefix of maximal chains may sit on top,
giving lengths omega*p + s below omega^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

from .automaton import LEVEL_POS, Configuration, Mbca
from .loops import LoopDescriptor, admissible, loops
from .reachability import ReachSet, analysis, cutoff


@total_ordering
@dataclass(frozen=True)
class OrdinalW2:
    """An ordinal omega*p + s below omega^2, ordered lexicographically."""

    p: int
    s: int

    def __lt__(self, other: "OrdinalW2") -> bool:
        return (self.p, self.s) < (other.p, other.s)

    def is_zero(self) -> bool:
        return self.p == 0 and self.s == 0

    def render(self) -> str:
        if self.p == 0:
            return str(self.s)
        text = f"w*{self.p}"
        return f"{text}+{self.s}" if self.s else text


def parse_ordinal(text: str) -> OrdinalW2:
    text = text.strip()
    if "w" not in text:
        return OrdinalW2(0, int(text))
    body = text[1:]  # drop 'w'
    p, s = 1, 0
    if body.startswith("*"):
        rest = body[1:]
        if "+" in rest:
            p_text, s_text = rest.split("+", 1)
            p, s = int(p_text), int(s_text)
        else:
            p = int(rest)
    elif body.startswith("+"):
        s = int(body[1:])
    elif body:
        raise ValueError(f"bad ordinal {text!r}")
    return OrdinalW2(p, s)


@dataclass(frozen=True)
class Chain:
    sets: tuple[frozenset[str], ...]
    sign: str  # sign of the first element
    site: frozenset[str]

    def __len__(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class OmegaLink:
    pos_site: frozenset[str]
    neg_site: frozenset[str]
    pos_loop: LoopDescriptor
    neg_loop: LoopDescriptor

    def states(self) -> frozenset[str]:
        return self.pos_site | self.neg_site


@dataclass(frozen=True)
class Superchain:
    length: OrdinalW2
    finite_part: tuple[Chain, ...]
    omega_part: tuple[OmegaLink, ...]
    sign: str
    anchor_loop: LoopDescriptor | None  # sign carrier when the finite part is empty


@dataclass(frozen=True)
class InvariantTriple:
    m: int
    n: OrdinalW2
    s: int  # +1 / -1 / 0

    @property
    def coarse_class(self) -> str:
        if self.m == 0:
            return "E"
        letter = {1: "C", -1: "D", 0: "E"}[self.s]
        return f"{letter}_{self.m}^{self.n.render()}"


def _opposite(sign: str) -> str:
    return "negative" if sign == "positive" else "positive"


class Analyzer:
    """One machine (plus per-state counter thresholds) analyzed lazily.

    Thresholds come from derivations: a loop is admissible only if its anchor
    is reachable with a counter at least max(its own operating minimum, the
    anchor's threshold).  The base machine has no thresholds.
    """

    def __init__(self, machine: Mbca, thresholds: dict[str, int] | None = None):
        self.machine = machine
        self.thresholds = dict(thresholds or {})
        self._cache: dict[str, object] = {}

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    # -- loops and essential sets ----------------------------------------

    def threshold(self, state: str) -> int:
        return self.thresholds.get(state, 0)

    def admissible_loops(self) -> tuple[LoopDescriptor, ...]:
        return self._memo(
            "admissible",
            lambda: tuple(
                d
                for d in loops(self.machine)
                if admissible(self.machine, d, self.threshold(d.anchor))
            ),
        )

    def essential(self) -> dict[frozenset[str], str]:
        def build():
            out: dict[frozenset[str], str] = {}
            for d in self.admissible_loops():
                out[d.essential_set] = d.sign
            return out

        return self._memo("essential", build)

    def descriptors(self, essential_set: frozenset[str]) -> tuple[LoopDescriptor, ...]:
        return tuple(
            d for d in self.admissible_loops() if d.essential_set == essential_set
        )

    def sites(self) -> tuple[frozenset[str], ...]:
        def build():
            ess = list(self.essential())
            return tuple(
                sorted(
                    (f for f in ess if not any(f < g for g in ess)),
                    key=sorted,
                )
            )

        return self._memo("sites", build)

    # -- chains -----------------------------------------------------------

    def _chain_data(self):
        """Per site: maximal chain length and one representative per first sign."""

        def build():
            ess = self.essential()
            info = {}
            for site in self.sites():
                inside = sorted(
                    (f for f in ess if f <= site), key=lambda f: (len(f), sorted(f))
                )
                lp: dict[frozenset[str], int] = {}
                first: dict[frozenset[str], set[str]] = {}
                for f in inside:
                    lp[f], first[f] = 1, {ess[f]}
                    for e in inside:
                        if e < f and ess[e] != ess[f]:
                            if lp[e] + 1 > lp[f]:
                                lp[f], first[f] = lp[e] + 1, set(first[e])
                            elif lp[e] + 1 == lp[f] and lp[f] > 1:
                                first[f] |= first[e]
                length = max(lp[f] for f in inside)

                def rebuild(end, sign):
                    sets = [end]
                    cur, need = end, lp[end]
                    while need > 1:
                        cur = next(
                            e
                            for e in inside
                            if e < cur
                            and ess[e] != ess[cur]
                            and lp[e] == need - 1
                            and sign in first[e]
                        )
                        sets.append(cur)
                        need -= 1
                    sets.reverse()
                    return Chain(tuple(sets), sign, site)

                reps: dict[str, Chain] = {}
                for f in inside:
                    if lp[f] == length:
                        for sign in sorted(first[f]):
                            if sign not in reps:
                                reps[sign] = rebuild(f, sign)
                info[site] = (length, frozenset(reps), reps)
            return info

        return self._memo("chain_data", build)

    def chains(self) -> tuple[Chain, ...]:
        """One longest alternating chain per site (per achievable first sign)."""
        out = []
        for _, _, reps in self._chain_data().values():
            out.extend(reps[sign] for sign in sorted(reps))
        return tuple(out)

    def m_value(self) -> int:
        data = self._chain_data()
        return max((length for length, _, _ in data.values()), default=0)

    def max_sites(self) -> tuple[frozenset[str], ...]:
        m = self.m_value()
        return tuple(site for site, (l, _, _) in self._chain_data().items() if l == m)

    def site_first_signs(self, site: frozenset[str]) -> frozenset[str]:
        return self._chain_data()[site][1]

    def site_chain(self, site: frozenset[str], sign: str | None = None) -> Chain:
        reps = self._chain_data()[site][2]
        if sign is None:
            sign = sorted(reps)[0]
        return reps[sign]

    # -- reachability helpers ----------------------------------------------

    def initial_reach(self):
        return self._memo(
            "initial_reach",
            lambda: analysis(self.machine, self.machine.initial_configuration()),
        )

    def high_floor(self) -> int:
        k = len(self.machine.states)
        return cutoff(self.machine) + k * (self.machine.max_positive_delta() + 2)

    def operating_min(self, d: LoopDescriptor) -> int:
        return max(d.min_anchor_counter, self.threshold(d.anchor))

    def _cycle_net(self, d: LoopDescriptor) -> int:
        base = d.dip + 1
        counter = base
        state = d.anchor
        for letter in d.cycle:
            move = self.machine.entry(state, letter, LEVEL_POS)
            if move is None:  # Z-level cycle letters replay through blind twins
                move = self.machine.entry(state, letter, "Z")
            state, delta = move[0], move[1]
            counter += delta
        return counter - base

    def loop_sources(self, essential_set: frozenset[str]) -> list[Configuration]:
        """Configurations from which everything reachable while iterating some
        admissible loop of the set is reachable (highest known entry points)."""
        sources = []
        high = self.high_floor()
        for d in self.descriptors(essential_set):
            opmin = self.operating_min(d)
            sr = self.initial_reach().reach_set.at(d.anchor)
            entry = sr.least_value_at_least(opmin)
            if entry is None:
                continue
            if sr.tail is not None:
                entry = sr.least_value_at_least(max(opmin, high))
            elif d.delta_kind == "plus":
                net = self._cycle_net(d)
                if net > 0 and entry < high:
                    entry += ((high - entry + net - 1) // net) * net
            else:
                entry = max(v for v in sr.finite if v >= opmin)
            sources.append(Configuration(d.anchor, entry))
        return sources

    def _reach_from(self, source: Configuration) -> ReachSet:
        return analysis(self.machine, source).reach_set

    def site_anchored_reachable(self, sources: list[Configuration], site) -> bool:
        for src in sources:
            rs = self._reach_from(src)
            for d in self.descriptors(site):
                if rs.at(d.anchor).has_value_at_least(self.operating_min(d)):
                    return True
        return False

    def tail_reaches(self, sources: list[Configuration], target_state: str) -> bool:
        return any(
            self._reach_from(src).at(target_state).tail is not None for src in sources
        )

    # -- omega structure ----------------------------------------------------

    def links(self) -> tuple[OmegaLink, ...]:
        def build():
            out = []
            signs = {site: self.site_first_signs(site) for site in self.max_sites()}
            pos_sites = [s for s in self.max_sites() if "positive" in signs[s]]
            neg_sites = [s for s in self.max_sites() if "negative" in signs[s]]
            init = self.initial_reach().reach_set
            high = self.high_floor()
            for p_site in pos_sites:
                for n_site in neg_sites:
                    if p_site == n_site:
                        continue
                    link = None
                    for dp in self.descriptors(p_site):
                        if dp.level != LEVEL_POS or dp.delta_kind != "equal":
                            continue
                        if init.at(dp.anchor).tail is None:
                            continue
                        for dn in self.descriptors(n_site):
                            if dn.level != LEVEL_POS or dn.delta_kind != "equal":
                                continue
                            if init.at(dn.anchor).tail is None:
                                continue
                            src_p = Configuration(
                                dp.anchor,
                                init.at(dp.anchor).least_value_at_least(high),
                            )
                            src_n = Configuration(
                                dn.anchor,
                                init.at(dn.anchor).least_value_at_least(high),
                            )
                            fwd = self._reach_from(src_p).at(dn.anchor)
                            bwd = self._reach_from(src_n).at(dp.anchor)
                            if fwd.has_value_at_least(
                                self.operating_min(dn)
                            ) and bwd.has_value_at_least(self.operating_min(dp)):
                                link = OmegaLink(p_site, n_site, dp, dn)
                                break
                        if link:
                            break
                    if link:
                        out.append(link)
            return tuple(out)

        return self._memo("links", build)

    def _link_high_sources(self, link: OmegaLink) -> list[Configuration]:
        init = self.initial_reach().reach_set
        high = self.high_floor()
        sources = []
        for s in sorted(link.states()):
            sr = init.at(s)
            if sr.tail is not None:
                sources.append(Configuration(s, sr.least_value_at_least(high)))
            elif sr.finite:
                sources.append(Configuration(s, max(sr.finite)))
        return sources

    def _link_edges(self):
        def build():
            links = self.links()
            edges: dict[int, set[int]] = {i: set() for i in range(len(links))}
            for i, a in enumerate(links):
                srcs = self._link_high_sources(a)
                for j, b in enumerate(links):
                    if i == j:
                        continue
                    # every state of the next unit, with genuinely re-pumped counters,
                    # from every state of this one
                    if all(
                        any(
                            self._reach_from(src).at(t).tail is not None
                            for src in srcs
                            if src.state == s
                        )
                        for s in sorted(a.states())
                        for t in sorted(b.states())
                    ):
                        edges[i].add(j)
            return edges

        return self._memo("link_edges", build)

    def _link_chains(self) -> list[tuple[int, ...]]:
        """All simple paths over links (indices), longest first."""
        links = self.links()
        edges = self._link_edges()
        paths: list[tuple[int, ...]] = []

        def extend(path: tuple[int, ...]):
            paths.append(path)
            for j in sorted(edges[path[-1]]):
                if j not in path:
                    extend(path + (j,))

        for i in range(len(links)):
            extend((i,))
        paths.sort(key=len, reverse=True)
        return paths

    # -- superchain assembly -------------------------------------------------

    def _h_edges(self):
        def build():
            sites = self.max_sites()
            edges: dict[frozenset, set[frozenset]] = {s: set() for s in sites}
            for a in sites:
                sources = self.loop_sources(a)
                for b in sites:
                    if a != b and self.site_anchored_reachable(sources, b):
                        edges[a].add(b)
            return edges

        return self._memo("h_edges", build)

    def _alternating_paths(self, allowed, require_tail_to=None):
        """Longest alternating simple paths over allowed sites.

        Returns (best_length, heads) with heads the (first_site, first_sign)
        pairs of maximal paths; a path counts only if its last element
        tail-reaches one of the ``require_tail_to`` anchor states (no
        constraint when None).
        """
        edges = self._h_edges()
        allowed = list(allowed)
        best = 0
        heads: set[tuple[frozenset[str], str]] = set()

        def ok_terminal(site) -> bool:
            if require_tail_to is None:
                return True
            sources = self.loop_sources(site)
            return any(self.tail_reaches(sources, q) for q in require_tail_to)

        def walk(site, sign, path):
            nonlocal best, heads
            length = len(path)
            if ok_terminal(site):
                if length > best:
                    best, heads = length, set()
                if length == best:
                    heads.add(path[0])
            for nxt in sorted(edges[site], key=sorted):
                if nxt in {p for p, _ in path}:
                    continue
                if nxt not in allowed:
                    continue
                nsign = _opposite(sign)
                if nsign in self.site_first_signs(nxt):
                    walk(nxt, nsign, path + ((nxt, nsign),))

        for site in allowed:
            for sign in sorted(self.site_first_signs(site)):
                walk(site, sign, ((site, sign),))
        return best, heads

    def _prefix_allowed(self, chain_links: tuple[int, ...]) -> list[frozenset[str]]:
        """Sites usable before the omega part: not reachable back from it."""
        links = self.links()
        blocked: set[frozenset] = set()
        for idx in chain_links:
            link = links[idx]
            srcs = self._link_high_sources(link)
            for site in self.max_sites():
                if site in blocked:
                    continue
                if self.site_anchored_reachable(srcs, site):
                    blocked.add(site)
        return [s for s in self.max_sites() if s not in blocked]

    def _sign_loop_entries(self, link: OmegaLink) -> dict[str, set[LoopDescriptor]]:
        """Admissible loops, by sign, from which the first unit is re-pumpable."""
        anchors = (link.pos_loop.anchor, link.neg_loop.anchor)
        out: dict[str, set[LoopDescriptor]] = {"positive": set(), "negative": set()}
        for d in self.admissible_loops():
            sources = [
                s for s in self.loop_sources(d.essential_set) if s.state == d.anchor
            ]
            if any(self.tail_reaches(sources, q) for q in anchors):
                out[d.sign].add(d)
        return out

    def _superchain_summary(self):
        """Maximal (p, s) length with the signs and entry structures achieving it.

        Entries are ("site", F) for prefixed superchains (the first chain's
        site) and ("loop", descriptor) for bare omega parts; the derivation
        needs every one of them, not a single representative.
        """

        def build():
            candidates: list[tuple[OrdinalW2, dict[str, set]]] = []
            if self.max_sites():
                smax, heads = self._alternating_paths(self.max_sites())
                if smax:
                    entry: dict[str, set] = {"positive": set(), "negative": set()}
                    for site, sign in heads:
                        entry[sign].add(("site", site))
                    candidates.append((OrdinalW2(0, smax), entry))
            for chain in self._link_chains():
                links = self.links()
                p = len(chain)
                allowed = self._prefix_allowed(chain)
                first = links[chain[0]]
                anchors = (first.pos_loop.anchor, first.neg_loop.anchor)
                s, heads = self._alternating_paths(allowed, require_tail_to=anchors)
                if s:
                    entry = {"positive": set(), "negative": set()}
                    for site, sign in heads:
                        entry[sign].add(("site", site))
                    candidates.append((OrdinalW2(p, s), entry))
                loop_entries = self._sign_loop_entries(first)
                if loop_entries["positive"] or loop_entries["negative"]:
                    entry = {
                        sign: {("loop", d) for d in descriptors}
                        for sign, descriptors in loop_entries.items()
                    }
                    candidates.append((OrdinalW2(p, 0), entry))
            if not candidates:
                return OrdinalW2(0, 0), {"positive": set(), "negative": set()}
            top = max(length for length, _ in candidates)
            merged: dict[str, set] = {"positive": set(), "negative": set()}
            for length, entry in candidates:
                if length == top:
                    merged["positive"] |= entry["positive"]
                    merged["negative"] |= entry["negative"]
            return top, merged

        return self._memo("superchain_summary", build)

    def superchain_entry_options(self) -> dict[str, set]:
        """Entry structures of every maximal superchain, keyed by sign."""
        return self._superchain_summary()[1]

    def n_value(self) -> OrdinalW2:
        return self._superchain_summary()[0]

    def achieved_signs(self) -> set[str]:
        _, entries = self._superchain_summary()
        return {sign for sign, options in entries.items() if options}

    def superchains(self) -> tuple[Superchain, ...]:
        """Representative superchains of maximal length, one per achieved sign."""
        length, _ = self._superchain_summary()
        if length.is_zero():
            return ()
        return tuple(
            self._witness_superchain(length, sign) for sign in sorted(self.achieved_signs())
        )

    def _witness_superchain(self, length: OrdinalW2, sign: str) -> Superchain:
        links = self.links()
        if length.p == 0:
            prefix = self._witness_prefix(length.s, sign, self.max_sites(), None)
            assert prefix is not None, "summary promised a finite superchain"
            return Superchain(
                length,
                tuple(self.site_chain(site, s) for site, s in prefix),
                (),
                sign,
                None,
            )
        for chain in self._link_chains():
            if len(chain) != length.p:
                continue
            first = links[chain[0]]
            anchors = (first.pos_loop.anchor, first.neg_loop.anchor)
            omega = tuple(links[i] for i in chain)
            if length.s:
                allowed = self._prefix_allowed(chain)
                prefix = self._witness_prefix(length.s, sign, allowed, anchors)
                if prefix is None:
                    continue
                return Superchain(
                    length,
                    tuple(self.site_chain(site, s) for site, s in prefix),
                    omega,
                    sign,
                    None,
                )
            for d in self.admissible_loops():
                if d.sign != sign:
                    continue
                sources = [
                    s for s in self.loop_sources(d.essential_set) if s.state == d.anchor
                ]
                if any(self.tail_reaches(sources, q) for q in anchors):
                    return Superchain(length, (), omega, sign, d)
        raise AssertionError("summary promised a superchain that cannot be rebuilt")

    def _witness_prefix(self, s_len, sign, allowed, anchors):
        edges = self._h_edges()

        def ok_terminal(site):
            if anchors is None:
                return True
            sources = self.loop_sources(site)
            return any(self.tail_reaches(sources, q) for q in anchors)

        def walk(site, cur_sign, path):
            if len(path) == s_len:
                return path if ok_terminal(site) else None
            for nxt in sorted(edges[site], key=sorted):
                if nxt in {p for p, _ in path} or nxt not in allowed:
                    continue
                nsign = _opposite(cur_sign)
                if nsign in self.site_first_signs(nxt):
                    got = walk(nxt, nsign, path + ((nxt, nsign),))
                    if got:
                        return got
            return None

        for site in allowed:
            if sign in self.site_first_signs(site):
                got = walk(site, sign, ((site, sign),))
                if got:
                    return got
        return None

    # -- invariants ------------------------------------------------------------

    def invariants(self) -> InvariantTriple:
        m = self.m_value()
        if m == 0:
            return InvariantTriple(0, OrdinalW2(0, 0), 0)
        n = self.n_value()
        signs = self.achieved_signs()
        if signs == {"positive"}:
            s = 1
        elif signs == {"negative"}:
            s = -1
        else:
            s = 0
        return InvariantTriple(m, n, s)


def chains(machine: Mbca) -> tuple[Chain, ...]:
    return Analyzer(machine).chains()


def superchains(machine: Mbca) -> tuple[Superchain, ...]:
    return Analyzer(machine).superchains()


def invariants(machine: Mbca) -> InvariantTriple:
    return Analyzer(machine).invariants()
