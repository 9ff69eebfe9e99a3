"""Independent chain/superchain baseline for counter-free machines.

A machine is counter-free when every table entry keeps the counter at zero;
then only zero-level entries ever fire and the machine is a partial Muller
automaton over its Z-graph.  This module redoes the m/n/s analysis for that
case directly: plain cycle enumeration, subset lattice, longest alternating
path. It shares no code with the counter-aware pipeline, so the two can
cross-check each other.
"""

from __future__ import annotations

from itertools import combinations

from .automaton import LEVEL_ZERO, Mbca
from .hierarchy import InvariantTriple, OrdinalW2


def is_counter_free(machine: Mbca) -> bool:
    return all(t.delta == 0 for t in machine.transitions)


def _z_graph(machine: Mbca) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {q: set() for q in machine.states}
    for t in machine.transitions:
        if t.level == LEVEL_ZERO:
            adj[t.source].add(t.target)
    return adj


def _reachable_from_initial(machine: Mbca, adj) -> set[str]:
    seen = {machine.initial}
    stack = [machine.initial]
    while stack:
        q = stack.pop()
        for p in adj[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def _strongly_connected_within(subset: frozenset[str], adj) -> bool:
    if len(subset) == 1:
        (q,) = subset
        return q in adj[q]
    start = next(iter(subset))
    fwd = {start}
    stack = [start]
    while stack:
        q = stack.pop()
        for p in adj[q]:
            if p in subset and p not in fwd:
                fwd.add(p)
                stack.append(p)
    if fwd != subset:
        return False
    rev: dict[str, set[str]] = {q: set() for q in subset}
    for q in subset:
        for p in adj[q]:
            if p in subset:
                rev[p].add(q)
    back = {start}
    stack = [start]
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in back:
                back.add(p)
                stack.append(p)
    return back == subset


def wagner_invariants(machine: Mbca) -> InvariantTriple:
    """(m, n, s) of a counter-free machine by direct Muller-automaton analysis."""
    if not is_counter_free(machine):
        raise ValueError("baseline applies to counter-free machines only")
    adj = _z_graph(machine)
    live = _reachable_from_initial(machine, adj)

    essential: dict[frozenset[str], str] = {}
    for size in range(1, len(live) + 1):
        for combo in combinations(sorted(live), size):
            subset = frozenset(combo)
            if _strongly_connected_within(subset, adj):
                essential[subset] = (
                    "positive" if subset in machine.accept_family else "negative"
                )
    if not essential:
        return InvariantTriple(0, OrdinalW2(0, 0), 0)

    sites = [f for f in essential if not any(f < g for g in essential)]

    def chain_info(site):
        inside = sorted((f for f in essential if f <= site), key=lambda f: (len(f), sorted(f)))
        lp: dict[frozenset[str], int] = {}
        first: dict[frozenset[str], set[str]] = {}
        for f in inside:
            lp[f], first[f] = 1, {essential[f]}
            for e in inside:
                if e < f and essential[e] != essential[f]:
                    if lp[e] + 1 > lp[f]:
                        lp[f], first[f] = lp[e] + 1, set(first[e])
                    elif lp[e] + 1 == lp[f]:
                        first[f] |= first[e]
        length = max(lp.values())
        signs = set()
        for f in inside:
            if lp[f] == length:
                signs |= first[f]
        return length, signs

    info = {site: chain_info(site) for site in sites}
    m = max(length for length, _ in info.values())
    max_sites = [site for site in sites if info[site][0] == m]

    plain_reach: dict[str, set[str]] = {}
    for q in live:
        seen = {q}
        stack = [q]
        while stack:
            x = stack.pop()
            for p in adj[x]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        plain_reach[q] = seen

    def site_reaches(a, b) -> bool:
        return any(t in plain_reach[s] for s in a for t in b)

    best = 0
    best_signs: set[str] = set()

    def walk(site, sign, path):
        nonlocal best, best_signs
        if len(path) > best:
            best, best_signs = len(path), set()
        if len(path) == best:
            best_signs.add(path[0][1])
        for nxt in max_sites:
            if nxt in {p for p, _ in path} or not site_reaches(site, nxt):
                continue
            flip = "negative" if sign == "positive" else "positive"
            if flip in info[nxt][1]:
                walk(nxt, flip, path + ((nxt, flip),))

    for site in max_sites:
        for sign in sorted(info[site][1]):
            walk(site, sign, ((site, sign),))

    if best_signs == {"positive"}:
        s = 1
    elif best_signs == {"negative"}:
        s = -1
    else:
        s = 0
    return InvariantTriple(m, OrdinalW2(0, best), s)
