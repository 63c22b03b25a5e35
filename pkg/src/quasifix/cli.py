"""Command-line front end.

Subcommands operate on substitution files (see `morphisms.parse_substitution`
for the format) and print deterministic text reports; `--json` switches to a
schema-stable JSON document and `--no-timing` drops the trailing timing line.
Exit codes: 0 success, 1 invalid input or a failed check, 2 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction

from . import worked_examples
from .blocks import (
    block_substitution,
    certify_fiber_qfp,
    fiber_windows,
    minimal_subsystems,
    parse_factor_map,
    push_qfp,
    verify_block_laws,
)
from .desub import desub_digits, desubstitute_window, detect_qfp, disjoint_factorization_count
from .kadic import DigitExpansion, KAdicRational
from .kernel import build_kernel_automaton, equal_sequences, export_dfao, kernel_size
from .language import language_table
from .morphisms import Substitution, analyze, load_substitution
from .onesided import interpretation_count, onesided_desub, prolong_two_sided
from .qfp import Qfp, dedup, enumerate_seeds, parse_seed
from .words import NotGrowingError, ParseError, UndeterminedError, Window

SCHEMA = 1


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load(path: str, allow_nongrowing: bool = False):
    return load_substitution(_read(path), allow_nongrowing=allow_nongrowing)


def parse_window(sub: Substitution, text: str) -> Window:
    parts = text.split()
    if not parts or not parts[0].startswith("pos="):
        raise ParseError("window must start with pos=<lo>")
    lo = int(parts[0][len("pos="):])
    letters = sub.alphabet.word(" ".join(parts[1:]) if len(parts) > 1 else "")
    if not letters:
        raise ParseError("window needs at least one letter")
    return Window(lo, letters)


def _render_window(sub: Substitution, window: Window) -> str:
    return "pos=%d %s" % (window.lo, sub.alphabet.render(window.letters))


def _seed_line(sub: Substitution, q: Qfp) -> str:
    m, c = q.relation()
    return "%s in_system=%s c=%d" % (q.describe(), "yes" if q.seed.in_system else "no", c)


# -- subcommand handlers -------------------------------------------------------


def cmd_analyze(args, out):
    sub, coding = _load(args.file, args.allow_nongrowing)
    info = analyze(sub)
    toks = sub.alphabet.tokens
    table = language_table(sub)
    letters = sorted(toks[a] for a in {x for p in table.pairs for x in p})
    pairs = sorted(sub.alphabet.render(p) for p in table.pairs)
    out.line("alphabet: %s" % " ".join(toks))
    out.line("growing: %s" % info.is_growing)
    out.line("constant_length: %s" % (info.constant_length if info.constant_length else "no"))
    out.line("primitive: %s" % info.is_primitive)
    out.line("right_prolongable: %s" % (" ".join(toks[a] for a in info.right_prolongable) or "-"))
    out.line("left_prolongable: %s" % (" ".join(toks[a] for a in info.left_prolongable) or "-"))
    out.line("ambi_idempotent_power: %d (bound %d)" % (info.n_amb, info.n_amb_bound))
    out.line("letters_in_language: %s" % " ".join(letters))
    out.line("pairs_in_language: %s" % " ".join(pairs))
    if coding is not None:
        out.line("coding_targets: %s" % " ".join(coding.target.tokens))
    out.data.update(
        growing=info.is_growing,
        constant_length=info.constant_length,
        primitive=info.is_primitive,
        right_prolongable=[toks[a] for a in info.right_prolongable],
        left_prolongable=[toks[a] for a in info.left_prolongable],
        n_amb=info.n_amb,
        n_amb_bound=info.n_amb_bound,
        letter_language=letters,
        pair_language=pairs,
    )
    return 0


def cmd_language(args, out):
    sub, _ = _load(args.file)
    table = language_table(sub)
    words = table.factors(args.max_len)
    by_len = {}
    for w in words:
        by_len.setdefault(len(w), []).append(w)
    counts = {length: len(ws) for length, ws in sorted(by_len.items())}
    out.line("word_counts: %s" % " ".join("%d:%d" % kv for kv in counts.items()))
    out.data["word_counts"] = {str(k): v for k, v in counts.items()}
    if args.words:
        for length in sorted(by_len):
            for w in sorted(by_len[length]):
                out.line("word %s" % sub.alphabet.render(w))
    if args.contains is not None:
        word = sub.alphabet.word(args.contains)
        ok = table.contains(word)
        out.line("contains %s: %s" % (sub.alphabet.render(word), "yes" if ok else "no"))
        out.data["contains"] = ok
    return 0


def cmd_qfp(args, out):
    sub, coding = _load(args.file)
    if args.action == "list":
        points = [Qfp(seed) for seed in enumerate_seeds(sub, args.period)]
        if args.dedup:
            points = dedup(points)
        for q in points:
            out.line(_seed_line(sub, q))
        out.line("total: %d" % len(points))
        out.data["seeds"] = [q.describe() for q in points]
        return 0
    q = parse_seed(sub, args.seed)
    m, c = q.relation()
    if args.action == "show":
        out.line(_seed_line(sub, q))
        window = q.materialize(-args.radius, args.radius)
        out.line(_render_window(sub, window))
        out.data["window"] = _render_window(sub, window)
        return 0
    if args.action == "verify":
        ok = q.verify(args.radius)
        out.line(("OK: T^%d(φ^%d(z))=z" % (c, m)) if ok else "FAIL: relation does not hold")
        out.data.update(ok=ok, m=m, c=c)
        return 0 if ok else 1
    raise ParseError("unknown qfp action %r" % args.action)


def cmd_desub(args, out):
    sub, _ = _load(args.file)
    window = parse_window(sub, args.window)
    steps = desubstitute_window(sub, window)
    out.line("steps: %d" % len(steps))
    for step in steps:
        out.line("step c=%d pred %s" % (step.c, _render_window(sub, step.pred)))
    out.data["steps"] = [{"c": s.c, "pred": _render_window(sub, s.pred)} for s in steps]
    if args.depth > 1:
        det = detect_qfp(sub, window, args.depth)
        out.line("detect: %s%s" % (det.status, " " + det.detail if det.detail else ""))
        if det.digits:
            out.line("digits: %s" % ",".join(str(d) for d in det.digits))
        if det.qfp is not None:
            out.line("candidate: %s relation m=%d c=%d" % (det.qfp.describe(), det.relation[0], det.relation[1]))
        out.data["detect"] = det.status
    return 0


def cmd_kernel(args, out):
    sub, coding = _load(args.file)
    q = parse_seed(sub, args.seed)
    use_coding = coding if args.coding else None
    auto = build_kernel_automaton(q, use_coding)
    minimized = auto.minimize()
    out.line("raw_states: %d" % len(auto))
    out.line("kernel_size: %d" % len(minimized))
    out.line("chain: t=%d ell=%d digits=%s" % (
        auto.meta["t"], auto.meta["ell"], ",".join(str(d) for d in auto.meta["digits"])))
    out.data.update(raw_states=len(auto), kernel_size=len(minimized))
    if args.export:
        out.line(export_dfao(minimized, args.export).rstrip("\n"))
    return 0


def cmd_kadic(args, out):
    if args.relation is not None:
        c, m, k = args.relation
        value = KAdicRational.from_relation(c, m, k)
    else:
        frac, k = args.expand
        value = KAdicRational(Fraction(frac), int(k))
    expansion = value.expansion()
    out.line("%d/%d; digits %s" % (value.value.numerator, value.value.denominator, expansion))
    out.data.update(
        numerator=value.value.numerator,
        denominator=value.value.denominator,
        base=value.base,
        preperiod=list(expansion.preperiod),
        cycle=list(expansion.cycle),
    )
    return 0


def cmd_block(args, out):
    sub, _ = _load(args.file)
    pres = block_substitution(sub, args.r)
    out.line("block_alphabet_size: %d" % len(pres.alphabet))
    out.line("block_letters: %s" % " ".join(pres.alphabet.tokens))
    out.line("constant_length: %s" % (pres.sub.constant_length or "no"))
    out.data.update(size=len(pres.alphabet), letters=list(pres.alphabet.tokens))
    if args.verify:
        report = verify_block_laws(sub, args.r)
        out.line("laws: %s" % ("ok" if report.ok else "FAILED: " + report.failure))
        out.data["laws_ok"] = report.ok
        return 0 if report.ok else 1
    return 0


def cmd_factor(args, out):
    sub, _ = _load(args.file)
    code = parse_factor_map(_read(args.code), sub)
    if args.push is not None:
        q = parse_seed(sub, args.push)
        handle = push_qfp(sub, code, q)
        window = handle.window(-args.radius, args.radius)
        out.line("image %s" % ("pos=%d %s" % (window.lo, handle.alphabet.render(window.letters))))
        out.line("kernel_size: %d" % kernel_size(handle.automaton))
        out.data["image"] = handle.alphabet.render(window.letters)
        return 0
    if args.fiber is not None:
        target_alpha = code.target
        parts = args.fiber.split()
        lo = int(parts[0][len("pos="):])
        letters = target_alpha.word(" ".join(parts[1:]))
        target = Window(lo, letters)
        windows = fiber_windows(sub, code, target)
        out.line("preimage_windows: %d" % len(windows))
        for w in windows[: args.limit]:
            out.line("preimage %s" % _render_window(sub, w))
        out.data["count"] = len(windows)
        if args.certify:
            cert = certify_fiber_qfp(sub, code, target, args.depth)
            tally = cert.counts
            out.line("certification: %s" % " ".join("%s:%d" % kv for kv in sorted(tally.items())))
            out.data["certification"] = tally
        return 0
    raise ParseError("factor needs --push or --fiber")


def cmd_subsystems(args, out):
    sub, coding = _load(args.file)
    report = minimal_subsystems(sub, coding)
    out.line("power_used: %d" % report.power)
    for letter, letters, restriction in report.entries:
        out.line("subsystem b=%s letters=%s primitive=%s"
                 % (letter, ",".join(letters), restriction.is_primitive()))
    out.data["subsystems"] = [{"b": e[0], "letters": list(e[1])} for e in report.entries]
    return 0


def cmd_onesided(args, out):
    sub, _ = _load(args.file)
    prefix = sub.alphabet.word(args.prefix)
    if args.action == "prolong":
        one = prolong_two_sided(sub, args.m, args.c, prefix)
        out.line("parent: %s" % one.parent.describe())
        out.line("start: %d" % one.start)
        out.data.update(parent=one.parent.describe(), start=one.start)
        return 0
    if args.action == "desub":
        steps = onesided_desub(sub, prefix)
        out.line("steps: %d" % len(steps))
        for s in steps:
            out.line("step c=%d pred start=0 %s" % (s.c, sub.alphabet.render(s.pred[:16])))
        out.data["steps"] = [s.c for s in steps]
        return 0
    if args.action == "interpret":
        power = sub.power(args.power)
        report = interpretation_count(prefix, list(power.images))
        out.line("interpretations: %d (of %d) bound=%d nonperiodic=%s"
                 % (report.count, report.total, len(set(power.images)), report.nonperiodic))
        out.data.update(count=report.count, total=report.total)
        return 0
    raise ParseError("unknown onesided action %r" % args.action)


def cmd_examples(args, out):
    facts = worked_examples.run_examples(args.only)
    failed = 0
    for fact in facts:
        status = "PASS" if fact.ok else "FAIL"
        suffix = (" " + fact.detail) if (fact.detail and not fact.ok) else ""
        out.line("%s/%s: %s%s" % (fact.example, fact.anchor, status, suffix))
        failed += 0 if fact.ok else 1
    out.line("facts: %d passed, %d failed" % (len(facts) - failed, failed))
    out.data["failed"] = failed
    out.data["facts"] = [
        {"example": f.example, "anchor": f.anchor, "ok": f.ok} for f in facts
    ]
    return 0 if failed == 0 else 1


# -- wiring ---------------------------------------------------------------------


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.data: dict = {"schema": SCHEMA}

    def line(self, text: str):
        self.lines.append(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasifix",
                                     description="exact computation with growing substitutions")
    parser.add_argument("--json", action="store_true", help="emit a JSON report")
    parser.add_argument("--no-timing", action="store_true", help="suppress the timing line")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="structural analysis of a substitution file")
    p.add_argument("file")
    p.add_argument("--allow-nongrowing", action="store_true")
    p.set_defaults(fn=cmd_analyze)

    p = subs.add_parser("language", help="language words up to a length")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--contains")
    p.add_argument("--words", action="store_true", help="list the words themselves")
    p.set_defaults(fn=cmd_language)

    p = subs.add_parser("qfp", help="enumerate, show, or verify quasi-fixed points")
    p.add_argument("action", choices=["list", "show", "verify"])
    p.add_argument("file")
    p.add_argument("--period", type=int, default=1)
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--seed")
    p.add_argument("--radius", type=int, default=100)
    p.set_defaults(fn=cmd_qfp)

    p = subs.add_parser("desub", help="desubstitute a window, optionally iterating")
    p.add_argument("file")
    p.add_argument("--window", required=True)
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(fn=cmd_desub)

    p = subs.add_parser("kernel", help="build and minimize the kernel automaton of a seed")
    p.add_argument("file")
    p.add_argument("--seed", required=True)
    p.add_argument("--coding", action="store_true", help="apply the file's coding to outputs")
    p.add_argument("--export", choices=["text", "dot"])
    p.set_defaults(fn=cmd_kernel)

    p = subs.add_parser("kadic", help="rational base-k addresses and digit expansions")
    # let values like -1/3 pass as arguments rather than options
    p._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--relation", nargs=3, type=int, metavar=("C", "M", "K"))
    group.add_argument("--expand", nargs=2, metavar=("P/Q", "K"))
    p.set_defaults(fn=cmd_kadic)

    p = subs.add_parser("block", help="the r-block substitution of a system")
    p.add_argument("file")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(fn=cmd_block)

    p = subs.add_parser("factor", help="push a point through a factor map, or fiber search")
    p.add_argument("file")
    p.add_argument("--code", required=True)
    p.add_argument("--push", metavar="SEED")
    p.add_argument("--fiber", metavar="WINDOW")
    p.add_argument("--radius", type=int, default=30)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(fn=cmd_factor)

    p = subs.add_parser("subsystems", help="minimal subsystems of the generated system")
    p.add_argument("file")
    p.set_defaults(fn=cmd_subsystems)

    p = subs.add_parser("onesided", help="one-sided prolongation, desubstitution, interpretations")
    p.add_argument("action", choices=["prolong", "desub", "interpret"])
    p.add_argument("file")
    p.add_argument("--prefix", required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--power", type=int, default=1)
    p.set_defaults(fn=cmd_onesided)

    p = subs.add_parser("paper-examples", help="run the bundled worked-example suite")
    p.add_argument("--only")
    p.set_defaults(fn=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Report()
    start = time.perf_counter()
    try:
        code = args.fn(args, out)
    except (ParseError, NotGrowingError, UndeterminedError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except AssertionError as exc:
        print("internal invariant breach: %s" % exc, file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - start
    if args.json:
        out.data["command"] = args.command
        if not args.no_timing:
            out.data["seconds"] = round(elapsed, 3)
        print(json.dumps(out.data, sort_keys=True))
    else:
        for line in out.lines:
            print(line)
        if not args.no_timing:
            print("time: %.3fs" % elapsed)
    return code


if __name__ == "__main__":
    sys.exit(main())
