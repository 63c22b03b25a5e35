"""Bundled worked examples with their expected exact values.

Each example builds its objects from scratch, checks a list of named facts,
and returns the outcomes; the CLI exposes the collection under the
`paper-examples` subcommand.  Expected values are pinned constants verified
against independent derivations in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .blocks import (
    SlidingBlockCode,
    block_substitution,
    fiber_windows,
    minimal_subsystems,
    push_qfp,
)
from .desub import desub_digits, desubstitute_window
from .kernel import build_kernel_automaton
from .language import contains, language_table, letter_language, pair_language
from .morphisms import Coding, Substitution, parse_substitution
from .onesided import onesided_desub, prolong_two_sided
from .qfp import Qfp, QfpSeed, enumerate_seeds, parse_seed
from .words import Alphabet, Window, least_period

THUE_MORSE = "alphabet: 0 1\nmap 0 -> 0 1\nmap 1 -> 1 0\n"
REMARK = "alphabet: 0 1 2\nmap 0 -> 1 2\nmap 1 -> 2 2\nmap 2 -> 1 1\n"
FIBER = (
    "alphabet: 0 1 2 3\n"
    "map 0 -> 0 1 2 3\nmap 1 -> 1 0 3 1\nmap 2 -> 2 3 3 2\nmap 3 -> 3 2 2 3\n"
    "coding 0 -> 0\ncoding 1 -> 1\ncoding 2 -> 2\ncoding 3 -> 2\n"
)
SHIFT_PAIR = (
    "alphabet: 0 1 2 3 4\n"
    "map 0 -> 0 1 3 0\nmap 1 -> 3 4 4 3\nmap 2 -> 4 3 3 4\nmap 3 -> 1 2 2 1\nmap 4 -> 2 1 1 2\n"
    "coding 0 -> 0\ncoding 1 -> 1\ncoding 2 -> 2\ncoding 3 -> 3\ncoding 4 -> 3\n"
)
ONESIDED = (
    "alphabet: 0 1 2 3\n"
    "map 0 -> 1 0 2 3\nmap 1 -> 1 2 0 1\nmap 2 -> 2 3 3 2\nmap 3 -> 3 2 2 3\n"
    "coding 0 -> 0\ncoding 1 -> 1\ncoding 2 -> 0\ncoding 3 -> 0\n"
)
# length-5 primitive substitution with a nonperiodic two-sided fixed point of
# its square; the fallback is used if the nonperiodicity scan ever failed
CLUB_BASE = "alphabet: 0 1\nmap 0 -> 0 0 1 0 1\nmap 1 -> 1 1 0 1 0\n"
CLUB_FALLBACK = "alphabet: 0 1\nmap 0 -> 0 0 0 1 1\nmap 1 -> 1 1 1 0 0\n"


@dataclass(frozen=True)
class Fact:
    example: str
    anchor: str
    ok: bool
    detail: str = ""


def _fact(example, anchor, ok, detail=""):
    return Fact(example, anchor, bool(ok), detail)


def thue_morse_example() -> list[Fact]:
    name = "thue-morse"
    sub, _ = parse_substitution(THUE_MORSE)
    out = []
    p4 = sub.power(4)
    r = sub.alphabet.render
    out.append(_fact(name, "phi4-of-0", r(p4.images[0]) == "0110100110010110", r(p4.images[0])))
    out.append(_fact(name, "phi4-of-1", r(p4.images[1]) == "1001011001101001", r(p4.images[1])))
    z = parse_seed(sub, "interior a=0 i=5 m=4")
    out.append(_fact(name, "relation-T5-phi4", z.relation() == (4, 5), str(z.relation())))
    out.append(_fact(name, "left-window-v", r(z.materialize(-5, -1).letters) == "01101"))
    out.append(_fact(name, "right-window-w", r(z.materialize(1, 10).letters) == "0110010110"))
    out.append(_fact(name, "verify-radius-10000", z.verify(10**4)))
    kappa = z.kappa()
    out.append(_fact(name, "kappa-minus-one-third", kappa.value == Fraction(-1, 3), str(kappa)))
    digits = desub_digits(z)
    out.append(_fact(name, "digit-cycle-10", (digits.preperiod, digits.cycle) == ((), (1, 0)), str(digits)))
    out.append(_fact(name, "kappa-of-shift", z.shift(1).kappa().value == Fraction(2, 3)))
    ints = [s for s in enumerate_seeds(sub, 4) if s.kind == "interior" and s.a == 0]
    out.append(_fact(name, "interior-offsets", [s.i for s in ints] == [3, 5, 6, 9, 10, 12]))
    auto = build_kernel_automaton(z)
    out.append(_fact(name, "automaton-left-of-origin",
                     "".join(auto.eval_token(n) for n in range(-5, 0)) == "01101"))
    out.append(_fact(name, "minimal-period-4", z.minimal_period() == 4))
    return out


def remark_example() -> list[Fact]:
    name = "remark"
    sub, _ = parse_substitution(REMARK)
    out = []
    letters = {sub.alphabet.tokens[a] for a in letter_language(sub)}
    out.append(_fact(name, "letter-language", letters == {"1", "2"}, str(sorted(letters))))
    pairs = {sub.alphabet.render(p) for p in pair_language(sub)}
    out.append(_fact(name, "pair-language", pairs == {"11", "12", "21", "22"}, str(sorted(pairs))))
    out.append(_fact(name, "zero-not-in-language", not contains(sub, sub.alphabet.word("0"))))
    return out


def fiber_example() -> list[Fact]:
    name = "fiber"
    sub, tau = parse_substitution(FIBER)
    out = []
    report = minimal_subsystems(sub, tau)
    entries = {(e[0], e[1]) for e in report.entries}
    out.append(_fact(name, "minimal-subsystem-23", ("2", ("2", "3")) in entries, str(entries)))
    restriction = next(e[2] for e in report.entries if e[0] == "2")
    out.append(_fact(name, "restriction-primitive", restriction.is_primitive()))
    code = SlidingBlockCode.from_coding(tau)
    q23 = Qfp(QfpSeed(sub, 1, "bridge", 2, b=2))
    handle = push_qfp(sub, code, q23)
    window = handle.window(-50, 50)
    const2 = all(handle.alphabet.tokens[a] == "2" for a in window.letters)
    out.append(_fact(name, "pushed-constant-2", const2))
    two = tau.target.index("2")
    counts = {L: len(fiber_windows(sub, code, Window(0, (two,) * L))) for L in (8, 16)}
    out.append(_fact(name, "fiber-count-exceeds-8", counts[16] > 8, str(counts)))
    out.append(_fact(name, "fiber-grows", counts[16] > counts[8], str(counts)))
    return out


def shift_pair_example() -> list[Fact]:
    name = "desub"
    sub, tau = parse_substitution(SHIFT_PAIR)
    out = []
    x_prime = Qfp(QfpSeed(sub, 2, "bridge", 2, b=1))
    x_second = Qfp(QfpSeed(sub, 2, "bridge", 4, b=3))
    radius = 1000
    steps = desubstitute_window(sub, x_prime.materialize(-4 * radius, 4 * radius))
    out.append(_fact(name, "single-step", len(steps) == 1, "%d steps" % len(steps)))
    step = steps[0]
    out.append(_fact(name, "offset-zero", step.c == 0, "c=%d" % step.c))
    expected = x_second.materialize(-radius, radius)
    got = step.pred.restrict(-radius, radius)
    out.append(_fact(name, "predecessor-is-pair-point", got == expected))
    y = tau.apply_window(x_prime.materialize(-radius, radius))
    out.append(_fact(name, "coded-x-prime-nonperiodic", least_period(y.letters, radius) is None))
    y2 = tau.apply_window(x_second.materialize(-radius, radius))
    out.append(_fact(name, "coded-predecessor-periodic", least_period(y2.letters, 4) == 1))
    return out


def onesided_example() -> list[Fact]:
    name = "onesided"
    sub, tau = parse_substitution(ONESIDED)
    out = []
    w = sub.alphabet.word
    blocks = []
    block = w("2 3")
    prefix = list(w("1 0"))
    while len(prefix) < 2048:
        prefix.extend(block)
        block = sub.apply(block)
    x = tuple(prefix[:2048])
    one = prolong_two_sided(sub, 1, 4, x[:256])
    out.append(_fact(name, "two-sided-parent",
                     one.parent.seed.kind == "interior" and one.prefix(2048) == x,
                     one.parent.describe() + " start=%d" % one.start))
    coded = tuple(tau(a) for a in x[:1001])
    zero = tau.target.index("0")
    one_tok = tau.target.index("1")
    out.append(_fact(name, "coded-x-is-1-then-zeros",
                     coded[0] == one_tok and set(coded[1:]) == {zero}))
    out.append(_fact(name, "coded-x-nonperiodic", least_period(coded, 500) is None))
    coded_shift = tuple(tau(a) for a in x[1:1002])
    out.append(_fact(name, "coded-shift-periodic", least_period(coded_shift, 4) == 1))
    steps = onesided_desub(sub, x[:512])
    has_fixed = any(s.c == 0 for s in steps)
    x_prime = x[1:513]
    steps_prime = onesided_desub(sub, x_prime)
    self_step = any(s.c == 1 and s.pred == x_prime[: len(s.pred)] for s in steps_prime)
    out.append(_fact(name, "desub-trace", has_fixed and self_step,
                     "x steps=%s x' steps=%s" % ([s.c for s in steps], [s.c for s in steps_prime])))
    return out


def _club_pieces():
    base, _ = parse_substitution(CLUB_BASE)
    fixed = Qfp(QfpSeed(base, 2, "bridge", 0, b=0))
    window = fixed.materialize(-1000, 1000)
    if least_period(window.letters, 1000) is not None:
        base, _ = parse_substitution(CLUB_FALLBACK)
        fixed = Qfp(QfpSeed(base, 2, "bridge", 0, b=0))
        window = fixed.materialize(-1000, 1000)
    return base, fixed, window


def club_example() -> list[Fact]:
    name = "club"
    out = []
    base, fixed, window = _club_pieces()
    out.append(_fact(name, "base-primitive", base.is_primitive()))
    out.append(_fact(name, "fixed-point-nonperiodic", least_period(window.letters, 1000) is None))
    pres = block_substitution(base, 2)
    lifted = pres.lift_qfp(fixed)

    # combined system: a marker letter whose image plants one letter of each
    # alphabet, the base substitution, and its 2-block substitution
    tokens = ["♣"] + list(base.alphabet.tokens) + list(pres.alphabet.tokens)
    theta_alpha = Alphabet(tokens)
    idx = theta_alpha.index
    planted = [idx("♣"), idx("♣"), idx(base.alphabet.tokens[0]), idx(pres.alphabet.tokens[0]), idx("♣")]
    images = [tuple(planted)]
    for a in range(len(base.alphabet)):
        images.append(tuple(idx(base.alphabet.tokens[x]) for x in base.images[a]))
    for b in range(len(pres.alphabet)):
        images.append(tuple(idx(pres.alphabet.tokens[x]) for x in pres.sub.images[b]))
    theta = Substitution(theta_alpha, tuple(images))
    out.append(_fact(name, "combined-length-5", theta.constant_length == 5))

    # the fixed point, its shift, and the lifted fixed point, all inside the
    # combined system
    x = Qfp(QfpSeed(theta, 2, "bridge", idx("0"), b=idx("0")))
    x_prime = x.shift(1)
    a2 = pres.alphabet.tokens[lifted.seed.a]
    b2 = pres.alphabet.tokens[lifted.seed.b]
    x_second = Qfp(QfpSeed(theta, 2, "bridge", idx(a2), b=idx(b2)), lifted.t)

    target_tokens = ["♣"] + list(base.alphabet.tokens)
    target = Alphabet(target_tokens)
    table = [target.index("♣")]
    for tok in base.alphabet.tokens:
        table.append(target.index(tok))
    for w in pres.words:
        table.append(target.index(base.alphabet.tokens[w[1]]))
    tau = Coding(theta_alpha, target, tuple(table))

    w1 = tau.apply_window(x_prime.materialize(-1000, 1000))
    w2 = tau.apply_window(x_second.materialize(-1000, 1000))
    out.append(_fact(name, "same-coded-image", w1 == w2))
    d1 = desub_digits(x_prime)
    d2 = desub_digits(x_second)
    out.append(_fact(name, "digits-1-0-0", (d1.preperiod, d1.cycle) == ((1,), (0,)), str(d1)))
    out.append(_fact(name, "digits-0-0-0", (d2.preperiod, d2.cycle) == ((), (0,)), str(d2)))
    out.append(_fact(name, "digit-streams-differ", (d1.preperiod, d1.cycle) != (d2.preperiod, d2.cycle)))
    return out


EXAMPLES = {
    "thue-morse": thue_morse_example,
    "remark": remark_example,
    "fiber": fiber_example,
    "desub": shift_pair_example,
    "onesided": onesided_example,
    "club": club_example,
}


def run_examples(only: str | None = None) -> list[Fact]:
    if only is not None:
        if only not in EXAMPLES:
            raise ValueError("unknown example %r (have: %s)" % (only, ", ".join(EXAMPLES)))
        return EXAMPLES[only]()
    facts: list[Fact] = []
    for fn in EXAMPLES.values():
        facts.extend(fn())
    return facts
