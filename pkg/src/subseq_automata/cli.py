"""Command-line front end: build, match, stats, verify, bench, export.

Exit codes: 0 success (or: pattern accepted), 1 pattern rejected (match only),
2 usage/IO/parameter error, 3 verification failure.

Text inputs are byte sequences by default (files are read as latin-1, one
symbol per byte); ``--codepoints`` switches file decoding to UTF-8. For
``stats``/``verify``/``export``, passing ``--variant`` selects build-parameter
mode (``--file`` is then a text file); without it ``--file`` names a
serialized automaton document, as it always does for ``match``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .automaton import (
    Automaton,
    DocumentError,
    ParameterError,
    deserialize,
    export_dot,
    reachable_states,
    run,
    serialize,
    size_metrics,
    validate,
)
from .multi import (
    DEFAULT_STATE_BUDGET,
    StateBudgetError,
    build_any_level,
    build_common_level,
    build_naive_common,
)
from .oracles import (
    AnySubsequenceOracle,
    CommonSubsequenceOracle,
    EnumerationBudgetError,
    GreedySubsequenceOracle,
    default_check_alphabet,
    equivalence_check,
    structural_delay_cap,
    trace_equivalence,
    tradeoff_table,
)
from .single import build_chain, build_k_level, build_level, build_sa

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2
EXIT_VERIFY_FAILED = 3

SINGLE_VARIANTS = {"sa", "chain", "level", "klevel"}
MULTI_VARIANTS = {"naive-common", "common-level", "any-level"}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (
        ParameterError,
        DocumentError,
        StateBudgetError,
        EnumerationBudgetError,
        ValueError,
        OSError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subseqa",
        description="Subsequence automata with default transitions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p, with_variant=True):
        p.add_argument("--text", help="inline input text")
        p.add_argument("--file", help="input file (or automaton document, see command help)")
        p.add_argument("--texts", nargs="+", help="two or more inline texts (multi-string variants)")
        p.add_argument("--codepoints", action="store_true", help="decode files as UTF-8 instead of latin-1 bytes")
        if with_variant:
            p.add_argument(
                "--variant",
                choices=sorted(SINGLE_VARIANTS | MULTI_VARIANTS | {"naive"}),
            )
            p.add_argument("--k", type=int, help="base for the klevel variant")
            p.add_argument("--mode", choices=["common", "any"], help="multi-string acceptance mode")
            p.add_argument("--sigma", type=int, help="override the alphabet size upward")
            p.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)

    p = sub.add_parser("build", help="build an automaton and write its document")
    add_inputs(p)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("match", help="run a pattern against an automaton document")
    p.add_argument("--file", required=True, help="automaton document")
    p.add_argument("--pattern", required=True)
    p.add_argument("--trace", action="store_true", help="print consumed targets and defaults per character")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("stats", help="size and delay measurements")
    add_inputs(p)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="oracle equivalence, trace equivalence, and invariants")
    add_inputs(p)
    p.add_argument("--max-len", type=int, default=4, help="pattern length bound for enumeration")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="size/delay trade-off table across variants")
    add_inputs(p)
    p.add_argument("--ks", default="2", help="comma-separated bases, e.g. 2,4,16,256")
    p.add_argument("--random", nargs=3, type=int, metavar=("N", "SIGMA", "SEED"), help="synthesize a uniform random text")
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export", help="export DOT or the serialized document")
    add_inputs(p)
    p.add_argument("--format", choices=["dot", "structured"], default="dot")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    return parser


# ---------------------------------------------------------------------------
# input handling


def _read_text_file(path: str, codepoints: bool) -> str:
    data = Path(path).read_bytes()
    return data.decode("utf-8") if codepoints else data.decode("latin-1")


def _input_texts(args, file_is_text: bool) -> list[str]:
    given = [
        args.text is not None,
        file_is_text and args.file is not None,
        bool(args.texts),
    ]
    if sum(given) != 1:
        raise ParameterError("provide exactly one input: --text, --file, or --texts")
    if args.text is not None:
        return [args.text]
    if bool(args.texts):
        if len(args.texts) < 2:
            raise ParameterError("--texts needs at least two strings")
        return list(args.texts)
    return [_read_text_file(args.file, args.codepoints)]


def _resolve_variant(args, n_texts: int) -> str:
    v = args.variant
    if v is None:
        raise ParameterError("--variant is required here")
    mode = args.mode
    if n_texts >= 2:
        if v == "level":
            v = f"{mode or 'common'}-level"
        elif v == "naive":
            v = "naive-common"
        if v not in MULTI_VARIANTS:
            raise ParameterError(f"variant {v!r} takes a single text")
        if mode is not None and not v.startswith(mode):
            raise ParameterError(f"--mode {mode} contradicts variant {v!r}")
        if v == "naive-common" and mode == "any":
            raise ParameterError("the naive construction exists only in common mode")
    else:
        if mode is not None:
            raise ParameterError("--mode applies to multi-string inputs only")
        if v not in SINGLE_VARIANTS:
            raise ParameterError(f"variant {v!r} needs --texts with at least two strings")
    if v == "klevel":
        if args.k is None:
            raise ParameterError("variant klevel requires --k")
    elif args.k is not None:
        raise ParameterError("--k applies to the klevel variant only")
    if args.sigma is not None and v in {"sa", "chain", "level", "naive-common"}:
        raise ParameterError("--sigma applies to klevel, common-level, and any-level")
    return v


def _build_automaton(args) -> Automaton:
    texts = _input_texts(args, file_is_text=True)
    variant = _resolve_variant(args, len(texts))
    if variant == "sa":
        return build_sa(texts[0])
    if variant == "chain":
        return build_chain(texts[0])
    if variant == "level":
        return build_level(texts[0])
    if variant == "klevel":
        return build_k_level(texts[0], args.k, sigma=args.sigma)
    if variant == "naive-common":
        if len(texts) != 2:
            raise ParameterError("the naive common construction takes exactly two texts")
        return build_naive_common(texts[0], texts[1], state_budget=args.state_budget)
    if variant == "common-level":
        return build_common_level(texts, sigma=args.sigma, state_budget=args.state_budget)
    return build_any_level(texts, sigma=args.sigma, state_budget=args.state_budget)


def _load_document(path: str) -> Automaton:
    return deserialize(Path(path).read_text(encoding="utf-8"))


def _load_or_build(args) -> Automaton:
    if args.variant is not None:
        return _build_automaton(args)
    if args.file is None:
        raise ParameterError("provide --variant with inputs, or --file with an automaton document")
    return _load_document(args.file)


def _write_output(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def reconstruct_text(a: Automaton) -> str:
    """Source text of a single-string automaton: character i is the label of
    the edge from state i-1 to state i, which every variant carries."""
    n = a.meta.get("n")
    if n is None:
        raise ParameterError(
            "cannot reconstruct the source texts of a multi-string document; pass --texts"
        )
    chars = []
    for i in range(1, n + 1):
        for c, t in a.transitions(i - 1):
            if t == i:
                chars.append(a.alphabet.char(c))
                break
        else:
            raise DocumentError(f"document carries no edge from state {i - 1} to {i}; cannot recover the text")
    return "".join(chars)


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    a = _build_automaton(args)
    _write_output(serialize(a), args.out)
    return EXIT_OK


def cmd_match(args) -> int:
    a = _load_document(args.file)
    outcome = run(a, args.pattern)
    print("accept" if outcome.accepted else "reject")
    if args.trace:
        labels = " ".join(a.state_label(s) for s in outcome.consumed_targets)
        print(f"targets: {labels}")
        print(f"defaults: {' '.join(str(d) for d in outcome.defaults_per_char)}")
        if outcome.reject_position is not None:
            print(f"rejected at: {outcome.reject_position}")
    return EXIT_OK if outcome.accepted else EXIT_REJECT


def stats_document(a: Automaton) -> dict:
    m = size_metrics(a)
    doc: dict = {"version": 1, "variant": a.meta["variant"]}
    if "lengths" in a.meta:
        doc["lengths"] = list(a.meta["lengths"])
    else:
        doc["n"] = a.meta["n"]
    doc.update(
        sigma=a.meta.get("sigma", len(a.alphabet)),
        k=a.meta.get("k"),
        states=m.states,
        regular_transitions=m.regular_transitions,
        default_transitions=m.default_transitions,
        size_total=m.size_total,
        longest_default_chain=m.longest_default_chain,
        reachable_states=reachable_states(a),
        delay_bound_structural=m.longest_default_chain + 1,
        theoretical_delay_cap=structural_delay_cap(a.meta),
    )
    return doc


def cmd_stats(args) -> int:
    a = _load_or_build(args)
    doc = stats_document(a)
    if args.format == "structured":
        out = json.dumps(doc, indent=2) + "\n"
    else:
        out = "".join(f"{k}: {v}\n" for k, v in doc.items())
    _write_output(out, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.variant is not None:
        texts = _input_texts(args, file_is_text=True)
        variant = _resolve_variant(args, len(texts))
        a = _build_automaton(args)
    else:
        if args.file is None:
            raise ParameterError("verify needs build parameters or --file with a document")
        a = _load_document(args.file)
        variant = a.meta["variant"]
        if args.texts:
            texts = list(args.texts)
        elif args.text is not None:
            texts = [args.text]
        else:
            texts = [reconstruct_text(a)]

    if variant in MULTI_VARIANTS and len(texts) < 2:
        raise ParameterError(f"variant {variant!r} needs the source texts (--texts)")

    if variant == "any-level":
        oracle = AnySubsequenceOracle(texts)
    elif variant in MULTI_VARIANTS:
        oracle = CommonSubsequenceOracle(texts)
    else:
        oracle = GreedySubsequenceOracle(texts[0])
    chars = default_check_alphabet(texts)

    results: list[tuple[str, bool, str]] = []

    report = validate(a)
    results.append(("validate", report.ok, "; ".join(report.violations[:3])))

    eq = equivalence_check(a, oracle, chars, args.max_len)
    detail = f"{eq.patterns_checked} patterns, max defaults/char {eq.max_defaults_per_char}"
    if eq.mismatches:
        mm = eq.mismatches[0]
        detail += f"; first counterexample {mm.pattern!r}"
    results.append(("oracle-equivalence", eq.ok, detail))

    if variant == "any-level":
        results.append(("trace-equivalence", True, "skipped: no reference construction for any mode"))
    else:
        if variant in MULTI_VARIANTS:
            if len(texts) == 2:
                ref = build_naive_common(texts[0], texts[1], state_budget=args.state_budget)
            else:
                ref = build_common_level(texts, state_budget=args.state_budget)
        else:
            ref = build_sa(texts[0])
        tr = trace_equivalence(a, ref, chars, args.max_len)
        results.append(
            (
                "trace-equivalence",
                tr.equal,
                f"{tr.patterns_checked} patterns"
                + ("" if tr.equal else f"; counterexample {tr.counterexample!r}"),
            )
        )

    m = size_metrics(a)
    cap = structural_delay_cap(a.meta)
    results.append(
        (
            "delay-bound",
            m.longest_default_chain <= cap,
            f"longest default chain {m.longest_default_chain} <= {cap}",
        )
    )
    results.append(
        (
            "observed-delay",
            eq.max_defaults_per_char <= m.longest_default_chain,
            f"max defaults/char {eq.max_defaults_per_char} <= chain {m.longest_default_chain}",
        )
    )

    ok = True
    for name, passed, detail in results:
        ok &= passed
        print(f"{name}: {'pass' if passed else 'FAIL'}" + (f" ({detail})" if detail else ""))
    print("result: " + ("pass" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _random_text(n: int, sigma: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    return "".join(chr(int(v)) for v in rng.integers(0, sigma, size=n))


def cmd_bench(args) -> int:
    if args.random:
        n, sigma, seed = args.random
        if args.text is not None or args.file is not None or args.texts:
            raise ParameterError("--random replaces the text inputs")
        if sigma < 1 or n < 0:
            raise ParameterError("--random needs N >= 0 and SIGMA >= 1")
        text = _random_text(n, sigma, seed)
        sigma_override: int | None = sigma
        source = {"random": True, "n": n, "sigma": sigma, "seed": seed}
    else:
        texts = _input_texts(args, file_is_text=True)
        if len(texts) != 1:
            raise ParameterError("bench sweeps single-string variants; give one text")
        text = texts[0]
        sigma_override = args.sigma
        source = {"random": False, "n": len(text), "seed": None}

    try:
        ks = [int(x) for x in args.ks.split(",") if x.strip() != ""]
    except ValueError:
        raise ParameterError(f"--ks must be a comma-separated integer list, got {args.ks!r}") from None
    if not ks:
        raise ParameterError("--ks must name at least one base")

    rows = tradeoff_table(text, ks, sigma=sigma_override)
    if args.format == "structured":
        doc = {
            "version": 1,
            "source": source,
            "rows": [r.stats_dict() for r in rows],
        }
        out = json.dumps(doc, indent=2) + "\n"
    else:
        lines = []
        if source["random"]:
            lines.append(f"# random text: n={source['n']} sigma={source['sigma']} seed={source['seed']}")
        header = f"{'variant':<10} {'k':>4} {'states':>9} {'regular':>9} {'defaults':>9} {'size':>9} {'chain':>6} {'delay<=':>8} {'cap':>4}"
        lines.append(header)
        for r in rows:
            m = r.metrics
            lines.append(
                f"{r.variant:<10} {r.k if r.k is not None else '-':>4} {m.states:>9} "
                f"{m.regular_transitions:>9} {m.default_transitions:>9} {m.size_total:>9} "
                f"{m.longest_default_chain:>6} {r.delay_bound:>8} {r.theoretical_delay_cap:>4}"
            )
        out = "\n".join(lines) + "\n"
    _write_output(out, args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    a = _load_or_build(args)
    out = export_dot(a) if args.format == "dot" else serialize(a)
    _write_output(out, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
