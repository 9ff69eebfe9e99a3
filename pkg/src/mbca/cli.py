"""Command-line front end: parse the text formats, run the pipeline, report.

Exit codes: 0 success, 1 validation failure, 2 usage error.  ``--format
structured`` prints one canonical JSON document per invocation (sorted keys,
two-space indent), stable under parse-and-rerender.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arena import copycat, default_suite, parse_strategy, play, validate_strategy
from .automaton import InvalidMachine, Mbca, MbcaError, emit_machine, parse_machine
from .gallery import canonical, parse_class_spec
from .hierarchy import Analyzer
from .loops import loops
from .naming import compare, degree_rank, parse_name, wadge_name
from .semantics import member, parse_word, run
from .wagner import wagner_invariants


def _load_machine(path: str) -> Mbca:
    return parse_machine(Path(path).read_text())


def _emit(payload: dict, fmt: str, text_lines) -> None:
    if fmt == "structured":
        print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=True))
    else:
        for line in text_lines:
            print(line)


def _sorted_set(states) -> list[str]:
    return sorted(states)


def _machine_summary(machine: Mbca) -> dict:
    return {
        "name": machine.name,
        "states": list(machine.states),
        "alphabet": list(machine.alphabet),
        "initial": machine.initial,
        "accept_family": sorted(sorted(f) for f in machine.accept_family),
        "transitions": len(machine.transitions),
    }


def _report(machine: Mbca, include_name: bool = True) -> dict:
    analyzer = Analyzer(machine)
    inv = analyzer.invariants()
    payload = {
        "machine": _machine_summary(machine),
        "essential_sets": [
            {"states": _sorted_set(f), "sign": sign}
            for f, sign in sorted(
                analyzer.essential().items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))
            )
        ],
        "loops": [
            {
                "anchor": d.anchor,
                "level": d.level,
                "states": _sorted_set(d.essential_set),
                "kind": d.delta_kind,
                "sign": d.sign,
                "dip": d.dip,
                "min_anchor_counter": d.min_anchor_counter,
            }
            for d in analyzer.admissible_loops()
        ],
        "chains": [
            {
                "site": _sorted_set(c.site),
                "sign": c.sign,
                "length": len(c),
                "sets": [_sorted_set(f) for f in c.sets],
            }
            for c in analyzer.chains()
        ],
        "superchains": [
            {
                "length": sc.length.render(),
                "sign": sc.sign,
                "finite_part": [_sorted_set(c.site) for c in sc.finite_part],
                "omega_part": [
                    {
                        "positive_site": _sorted_set(l.pos_site),
                        "negative_site": _sorted_set(l.neg_site),
                    }
                    for l in sc.omega_part
                ],
            }
            for sc in analyzer.superchains()
        ],
        "invariants": {"m": inv.m, "n": inv.n.render(), "s": inv.s},
        "coarse_class": inv.coarse_class,
    }
    if include_name:
        name = wadge_name(machine)
        payload["name"] = name.render()
        payload["degree_rank"] = degree_rank(name).render()
        payload["delta02"] = inv.m < 2
    return payload


def _cmd_validate(args) -> int:
    try:
        machine = _load_machine(args.machine)
    except InvalidMachine as err:
        payload = {
            "valid": False,
            "violations": [
                {"rule": v.rule, "detail": v.detail} for v in err.violations
            ],
        }
        _emit(
            payload,
            args.format,
            ["invalid"] + [f"  {v.rule}: {v.detail}" for v in err.violations],
        )
        return 1
    payload = {"valid": True, "machine": _machine_summary(machine)}
    _emit(payload, args.format, [f"valid: {machine.name}"])
    return 0


def _cmd_simulate(args) -> int:
    machine = _load_machine(args.machine)
    word = parse_word(args.word)
    trace = run(machine, word)
    payload = {
        "word": word.render(),
        "outcome": trace.outcome.kind,
        "inf_set": _sorted_set(trace.inf_set) if trace.inf_set else None,
        "configurations": [[c.state, c.counter] for c in trace.configs[:64]],
    }
    lines = [f"outcome: {trace.outcome.kind}"]
    if trace.outcome.kind == "blocked":
        payload["blocked_at"] = trace.outcome.position
        lines.append(f"blocked at letter index {trace.outcome.position}")
    else:
        lines.append(f"inf set: {{{' '.join(_sorted_set(trace.inf_set))}}}")
    _emit(payload, args.format, lines)
    return 0


def _cmd_member(args) -> int:
    machine = _load_machine(args.machine)
    verdict = member(machine, parse_word(args.word))
    _emit({"member": verdict}, args.format, ["true" if verdict else "false"])
    return 0


def _cmd_loops(args) -> int:
    machine = _load_machine(args.machine)
    report = _report(machine, include_name=False)
    lines = [
        f"L{'+' if d['sign'] == 'positive' else '-'}({d['anchor']}, {d['level']}, "
        f"{{{' '.join(d['states'])}}}, {'+' if d['kind'] == 'plus' else '='}) "
        f"dip={d['dip']}"
        for d in report["loops"]
    ]
    _emit({"loops": report["loops"], "raw_count": len(loops(machine))}, args.format, lines)
    return 0


def _cmd_chains(args) -> int:
    machine = _load_machine(args.machine)
    report = _report(machine, include_name=False)
    lines = [
        f"site {{{' '.join(c['site'])}}}: length {c['length']}, {c['sign']}"
        for c in report["chains"]
    ]
    _emit({"chains": report["chains"]}, args.format, lines)
    return 0


def _cmd_superchains(args) -> int:
    machine = _load_machine(args.machine)
    report = _report(machine, include_name=False)
    lines = [
        f"length {sc['length']}, {sc['sign']}, finite part "
        f"{[' '.join(s) for s in sc['finite_part']]}, omega units {len(sc['omega_part'])}"
        for sc in report["superchains"]
    ]
    _emit({"superchains": report["superchains"]}, args.format, lines or ["none"])
    return 0


def _cmd_invariants(args) -> int:
    machine = _load_machine(args.machine)
    report = _report(machine, include_name=False)
    inv = report["invariants"]
    _emit(
        {"invariants": inv, "coarse_class": report["coarse_class"]},
        args.format,
        [f"m = {inv['m']}", f"n = {inv['n']}", f"s = {inv['s']}",
         f"class {report['coarse_class']}"],
    )
    return 0


def _cmd_classify(args) -> int:
    machine = _load_machine(args.machine)
    report = _report(machine)
    _emit(report, args.format, [report["name"]])
    return 0


def _cmd_compare(args) -> int:
    left = _load_machine(args.machine)
    right = _load_machine(args.other)
    verdict = compare(wadge_name(left), wadge_name(right))
    _emit(
        {
            "left": wadge_name(left).render(),
            "right": wadge_name(right).render(),
            "verdict": verdict,
        },
        args.format,
        [verdict],
    )
    return 0


def _cmd_canonical(args) -> int:
    machine = canonical(parse_class_spec(args.class_spec))
    if args.format == "structured":
        _emit({"machine_text": emit_machine(machine)}, args.format, [])
    else:
        sys.stdout.write(emit_machine(machine))
    return 0


def _cmd_game(args) -> int:
    left = _load_machine(args.machine)
    right = _load_machine(args.other)
    if args.strategy:
        defender = parse_strategy(Path(args.strategy).read_text())
    else:
        defender = copycat(right.alphabet)
    if args.opponent:
        record = play(
            left,
            right,
            parse_strategy(Path(args.opponent).read_text()),
            defender,
            horizon=args.horizon,
        )
        payload = {
            "verdict": record.verdict,
            "a_word": record.a_word.render(),
            "b_word": record.b_word.render() if record.b_word else None,
        }
        _emit(payload, args.format, [record.verdict])
        return 0
    report = validate_strategy(
        left, right, defender, default_suite(left.alphabet, right.alphabet),
        horizon=args.horizon,
    )
    payload = {
        "defender": report.defender,
        "plays": report.plays,
        "losses": report.losses,
        "clean": report.clean,
        "note": "tournament evidence only, not a proof of reducibility",
    }
    _emit(payload, args.format, [report.summary()])
    return 0 if report.clean else 1


def _cmd_selftest(args) -> int:
    import itertools

    from .automaton import validate as make

    passed = failed = 0

    def record(ok: bool, label: str):
        nonlocal passed, failed
        if ok:
            passed += 1
        else:
            failed += 1
            print(f"selftest FAIL: {label}")

    states = ["q0", "q1"]
    letters = ["a", "b"]
    subsets = [frozenset(c) for r in (1, 2) for c in itertools.combinations(states, r)]
    for targets in itertools.product([None, "q0", "q1"], repeat=4):
        trans = []
        for (q, a), tgt in zip(itertools.product(states, letters), targets):
            if tgt is not None:
                trans.append((q, a, "Z", tgt, 0))
                trans.append((q, a, "I", tgt, 0))
        for bits in range(2 ** len(subsets)):
            fam = [sorted(subsets[i]) for i in range(len(subsets)) if bits >> i & 1]
            machine = make("cf", letters, states, "q0", trans, fam)
            got = Analyzer(machine).invariants()
            want = wagner_invariants(machine)
            record((got.m, got.n, got.s) == (want.m, want.n, want.s), f"wagner {targets} {fam}")

    for text in ["C_1^1", "C_1^2", "D_1^2", "E_1^1", "C_2^1", "D_2^w*1", "C_2^w*1+1"]:
        machine = canonical(parse_class_spec(text))
        got = wadge_name(machine).render()
        want = parse_name(text).render()
        record(got == want, f"gallery {text}: got {got}")

    print(f"selftest: {passed} passed, {failed} failed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mbca",
        description="Analyze blind-counter Muller automata and their Wadge classes",
    )
    parser.add_argument("--format", choices=["text", "structured"], default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **flags):
        p = sub.add_parser(name)
        for flag, kwargs in flags.items():
            p.add_argument(flag, **kwargs)
        p.set_defaults(func=func)
        return p

    add("validate", _cmd_validate, **{"--machine": {"required": True}})
    add("simulate", _cmd_simulate, **{"--machine": {"required": True}, "--word": {"required": True}})
    add("member", _cmd_member, **{"--machine": {"required": True}, "--word": {"required": True}})
    add("loops", _cmd_loops, **{"--machine": {"required": True}})
    add("chains", _cmd_chains, **{"--machine": {"required": True}})
    add("superchains", _cmd_superchains, **{"--machine": {"required": True}})
    add("invariants", _cmd_invariants, **{"--machine": {"required": True}})
    add("classify", _cmd_classify, **{"--machine": {"required": True}})
    add("compare", _cmd_compare, **{"--machine": {"required": True}, "--other": {"required": True}})
    canon = sub.add_parser("canonical")
    canon.add_argument("--class", dest="class_spec", required=True)
    canon.set_defaults(func=_cmd_canonical)
    game = sub.add_parser("game")
    game.add_argument("--machine", required=True)
    game.add_argument("--other", required=True)
    game.add_argument("--strategy")
    game.add_argument("--opponent")
    game.add_argument("--horizon", type=int, default=10_000)
    game.set_defaults(func=_cmd_game)
    add("selftest", _cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidMachine as err:
        for v in err.violations:
            print(f"{v.rule}: {v.detail}", file=sys.stderr)
        return 1
    except MbcaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
