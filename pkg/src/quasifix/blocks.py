"""Higher block presentations, sliding block codes, and factor-map plumbing.

The r-block presentation rewrites a system over the alphabet of its length-r
factors; the induced block substitution keeps constant length and primitivity
and commutes with the presentation map iota_r.  A factor map between
subshifts is specified in local normal form as a radius-n rule on windows of
length 2n+1; pushing a quasi-fixed point through a factor map lifts it to the
block system (same period and offset), shifts by -n, and applies the rule as
an output coding, so the image sequence is evaluated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .desub import Detection, detect_qfp
from .kernel import KernelAutomaton, build_kernel_automaton
from .language import language_table
from .morphisms import Coding, Substitution, ambi_idempotent_exponent
from .qfp import Qfp, agreement_radius, identify
from .words import Alphabet, ParseError, Window, Word


def _block_token(alphabet: Alphabet, word: Word) -> str:
    if all(len(t) == 1 for t in alphabet.tokens):
        return "".join(alphabet.tokens[a] for a in word)
    return "+".join(alphabet.tokens[a] for a in word)


class BlockPresentation:
    """The r-block view of a system: block alphabet, substitution, and iota."""

    def __init__(self, base: Substitution, r: int):
        if r < 1:
            raise ValueError("block length must be >= 1")
        base.require_growing()
        self.base = base
        self.r = r
        table = language_table(base)
        words = sorted(w for w in table.factors(r) if len(w) == r)
        if not words:
            raise ValueError("language has no words of length %d" % r)
        self.words = tuple(words)
        self._index = {w: i for i, w in enumerate(self.words)}
        self.alphabet = Alphabet(_block_token(base.alphabet, w) for w in self.words)
        images = []
        for w in self.words:
            expanded = base.apply(w)
            t = len(base.images[w[0]])
            blocks = []
            for i in range(t):
                piece = expanded[i : i + r]
                if piece not in self._index:
                    raise AssertionError("block image left the language — unreachable")
                blocks.append(self._index[piece])
            images.append(tuple(blocks))
        self.sub = Substitution(self.alphabet, tuple(images))

    def block_id(self, word: Word) -> int:
        try:
            return self._index[tuple(word)]
        except KeyError:
            raise ValueError("word is not in the length-%d language" % self.r) from None

    def base_word(self, block: int) -> Word:
        return self.words[block]

    def iota_word(self, word: Word) -> Word:
        if len(word) < self.r:
            return ()
        return tuple(self.block_id(word[i : i + self.r]) for i in range(len(word) - self.r + 1))

    def iota_window(self, window: Window) -> Window:
        return Window(window.lo, self.iota_word(window.letters))

    def lift_qfp(self, q: Qfp) -> Qfp:
        """The presentation image of q: a quasi-fixed point of the block
        substitution with the same period and offset."""
        m, c = q.relation()
        k = self.base.constant_length
        if k is None:
            raise ValueError("lifting needs constant length")
        w0 = agreement_radius(m, c, k)
        span = w0 + self.r + 2
        hat_window = self.iota_window(q.materialize(-span, span))
        lifted = identify(self.sub, m, c, hat_window.restrict(-w0, w0))
        if lifted is None:
            raise AssertionError("presentation image matched no block seed")
        return lifted


def block_substitution(sub: Substitution, r: int) -> BlockPresentation:
    cache = sub._cache.setdefault("blocks", {})
    if r not in cache:
        cache[r] = BlockPresentation(sub, r)
    return cache[r]


def iota(sub: Substitution, value, r: int):
    pres = block_substitution(sub, r)
    if isinstance(value, Window):
        return pres.iota_window(value)
    return pres.iota_word(tuple(value))


@dataclass(frozen=True)
class BlockLawReport:
    ok: bool
    checks: tuple
    failure: str = ""


def verify_block_laws(sub: Substitution, r: int, n_max: int = 3, max_len: int = 10,
                      samples: int = 100) -> BlockLawReport:
    """Commutation, language equality, and transfer checks for phi-hat.

    Word-level commutation compares phi_hat^n(iota(w)) with the matching
    prefix of iota(phi^n(w)); the presentation languages are compared
    exactly up to max_len; primitivity and constant length must transfer.
    """
    import random

    pres = block_substitution(sub, r)
    table = language_table(sub)
    checks = []
    rng = random.Random(0)
    pool = sorted(w for w in table.factors(max(r + 2, 6)) if len(w) >= r)
    for n in range(0, n_max + 1):
        for _ in range(max(1, samples // (n_max + 1))):
            w = pool[rng.randrange(len(pool))]
            lhs = pres.iota_word(sub.power(n).apply(w))
            rhs = pres.sub.power(n).apply(pres.iota_word(w))
            if rhs != lhs[: len(rhs)]:
                return BlockLawReport(False, tuple(checks),
                                      "commutation failed at n=%d, w=%s" % (n, w))
    checks.append("commutation")
    hat_table = language_table(pres.sub)
    base_factors = table.factors(max_len + r - 1)
    for length in range(1, max_len + 1):
        lifted = {pres.iota_word(w) for w in base_factors if len(w) == length + r - 1}
        hat_words = {w for w in hat_table.factors(length) if len(w) == length}
        if lifted != hat_words:
            return BlockLawReport(False, tuple(checks),
                                  "language mismatch at block length %d" % length)
    checks.append("language")
    if sub.constant_length is not None and pres.sub.constant_length != sub.constant_length:
        return BlockLawReport(False, tuple(checks), "constant length did not transfer")
    if sub.is_primitive() and not pres.sub.is_primitive():
        return BlockLawReport(False, tuple(checks), "primitivity did not transfer")
    checks.append("transfer")
    return BlockLawReport(True, tuple(checks))


class SlidingBlockCode:
    """Local rule of a factor map: radius n, total on the length-(2n+1) language."""

    def __init__(self, source: Alphabet, target: Alphabet, radius: int, rule: dict):
        self.source = source
        self.target = target
        self.radius = radius
        self.r = 2 * radius + 1
        self.rule = {tuple(w): out for w, out in rule.items()}
        for w in self.rule:
            if len(w) != self.r:
                raise ValueError("rule key of length %d; expected %d" % (len(w), self.r))

    @staticmethod
    def from_coding(coding: Coding) -> "SlidingBlockCode":
        rule = {(a,): coding.table[a] for a in range(len(coding.source))}
        return SlidingBlockCode(coding.source, coding.target, 0, rule)

    def output(self, word: Word) -> int:
        try:
            return self.rule[tuple(word)]
        except KeyError:
            raise ValueError("local rule undefined on %r" % (word,)) from None

    def apply_window(self, window: Window) -> Window:
        n = self.radius
        lo, hi = window.lo + n, window.hi - n
        if lo > hi:
            raise ValueError("window too short for radius %d" % n)
        letters = tuple(
            self.output(window.letters[p - n - window.lo : p + n + 1 - window.lo])
            for p in range(lo, hi + 1)
        )
        return Window(lo, letters)

    def coding_on_blocks(self, pres: BlockPresentation) -> Coding:
        table = tuple(self.output(w) for w in pres.words)
        return Coding(pres.alphabet, self.target, table)


def parse_factor_map(text: str, sub: Substitution) -> SlidingBlockCode:
    """Parse a factor-map file: either a coding block or a radius rule.

        coding <tok> -> <tok>            (one line per letter)
        code radius=<n>
        rule <tok> ... <tok> -> <tok>    (2n+1 source letters per rule)

    Rules must cover the length-(2n+1) language; extra rules are allowed.
    """
    radius = None
    rule: dict = {}
    target_tokens: list[str] = []
    coding_table: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "code":
            if len(parts) != 2 or not parts[1].startswith("radius="):
                raise ParseError("expected 'code radius=<n>'", lineno)
            radius = int(parts[1][len("radius="):])
        elif parts[0] == "rule":
            if radius is None:
                raise ParseError("'rule' before 'code radius='", lineno)
            if "->" not in parts:
                raise ParseError("rule line needs '->'", lineno)
            arrow = parts.index("->")
            lhs = parts[1:arrow]
            rhs = parts[arrow + 1:]
            if len(lhs) != 2 * radius + 1 or len(rhs) != 1:
                raise ParseError("rule needs %d source letters and one target" % (2 * radius + 1), lineno)
            try:
                key = tuple(sub.alphabet.index(t) for t in lhs)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if key in rule:
                raise ParseError("duplicate rule", lineno)
            if rhs[0] not in target_tokens:
                target_tokens.append(rhs[0])
            rule[key] = rhs[0]
        elif parts[0] == "coding":
            if len(parts) != 4 or parts[2] != "->":
                raise ParseError("coding line must be 'coding <letter> -> <letter>'", lineno)
            try:
                a = sub.alphabet.index(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if a in coding_table:
                raise ParseError("duplicate coding for %r" % parts[1], lineno)
            if parts[3] not in target_tokens:
                target_tokens.append(parts[3])
            coding_table[a] = parts[3]
        else:
            raise ParseError("unrecognized directive %r" % parts[0], lineno)
    if coding_table and radius is not None:
        raise ParseError("file mixes 'coding' and 'code radius' blocks")
    if coding_table:
        missing = [sub.alphabet.tokens[a] for a in range(len(sub.alphabet)) if a not in coding_table]
        if missing:
            raise ParseError("coding must be total; missing: %s" % ", ".join(missing))
        target = Alphabet(target_tokens)
        table = tuple(target.index(coding_table[a]) for a in range(len(sub.alphabet)))
        return SlidingBlockCode.from_coding(Coding(sub.alphabet, target, table))
    if radius is None:
        raise ParseError("factor-map file needs a 'coding' or 'code radius=' block")
    target = Alphabet(target_tokens)
    mapped = {w: target.index(tok) for w, tok in rule.items()}
    code = SlidingBlockCode(sub.alphabet, target, radius, mapped)
    required = {w for w in language_table(sub).factors(code.r) if len(w) == code.r}
    missing = sorted(required - set(mapped))
    if missing:
        raise ParseError(
            "rule does not cover the language: missing %s"
            % ", ".join(sub.alphabet.render(w) for w in missing[:5])
        )
    return code


class AutomaticHandle:
    """Image of a quasi-fixed point under a factor map, evaluated exactly.

    Wraps the lifted block-level point (already shifted by -radius) and the
    block-to-target coding; windows come from exact materialization and eval
    from the kernel automaton of the pair.
    """

    def __init__(self, source_qfp: Qfp, code: SlidingBlockCode, lifted: Qfp, coding: Coding):
        self.source = source_qfp
        self.code = code
        self.lifted = lifted
        self.coding = coding
        self._automaton: KernelAutomaton | None = None

    @property
    def alphabet(self) -> Alphabet:
        return self.coding.target

    @property
    def automaton(self) -> KernelAutomaton:
        if self._automaton is None:
            self._automaton = build_kernel_automaton(self.lifted, self.coding)
        return self._automaton

    def window(self, lo: int, hi: int) -> Window:
        return self.coding.apply_window(self.lifted.materialize(lo, hi))

    def eval(self, n: int) -> int:
        return self.automaton.eval(n)


def push_qfp(sub: Substitution, code: SlidingBlockCode, q: Qfp) -> AutomaticHandle:
    if code.source != sub.alphabet:
        raise ValueError("code source alphabet mismatch")
    pres = block_substitution(sub, code.r)
    lifted = pres.lift_qfp(q).shift(-code.radius)
    return AutomaticHandle(q, code, lifted, code.coding_on_blocks(pres))


def fiber_windows(sub: Substitution, code: SlidingBlockCode, target: Window) -> list[Window]:
    """All language windows mapping onto the target window under the code.

    Preimage windows span the target extended by the code radius on both
    sides.  Candidates are grown letter by letter; prefixes must stay in the
    language and every completed length-(2n+1) block must match the rule.
    """
    n = code.radius
    lo, hi = target.lo - n, target.hi + n
    length = hi - lo + 1
    table = language_table(sub)
    lang = table.factors(length)
    out: list[Window] = []
    stack: list[tuple] = [()]
    while stack:
        prefix = stack.pop()
        if len(prefix) == length:
            out.append(Window(lo, prefix))
            continue
        for a in range(len(sub.alphabet) - 1, -1, -1):
            cand = prefix + (a,)
            if cand not in lang:
                continue
            if len(cand) >= code.r:
                pos = lo + len(cand) - 1 - n  # target position completed by cand
                if code.output(cand[-code.r :]) != target[pos]:
                    continue
            stack.append(cand)
    out.sort(key=lambda w: w.letters)
    return out


@dataclass(frozen=True)
class FiberCertification:
    branches: tuple  # (preimage window, Detection)

    @property
    def counts(self) -> dict:
        tally: dict[str, int] = {}
        for _, det in self.branches:
            tally[det.status] = tally.get(det.status, 0) + 1
        return tally


def certify_fiber_qfp(sub: Substitution, code: SlidingBlockCode, target: Window,
                      depth: int = 8) -> FiberCertification:
    """Run quasi-fixed detection on every preimage window of the target.

    Inconclusive branches are reported as such, never dropped.
    """
    branches = []
    for pre in fiber_windows(sub, code, target):
        try:
            det = detect_qfp(sub, pre, depth)
        except ValueError as exc:
            det = Detection("ambiguous", detail=str(exc))
        branches.append((pre, det))
    return FiberCertification(tuple(branches))


@dataclass(frozen=True)
class SubsystemReport:
    power: int
    entries: tuple  # (letter token, letter-token tuple, restriction)


def minimal_subsystems(sub: Substitution, coding: Coding | None = None) -> SubsystemReport:
    """Minimal subsystems: letters whose reachable restriction is primitive.

    The substitution is raised to its ambi-idempotent power first (reported);
    entries are deduplicated by reachable letter set.  A coding only relabels
    the subsystem, so it does not change the list.
    """
    n_amb = ambi_idempotent_exponent(sub)
    work = sub.power(n_amb)
    seen: set = set()
    entries = []
    for b in range(len(sub.alphabet)):
        letters = work.reachable_letters(b)
        if letters in seen:
            continue
        restriction = work.restrict(letters)
        if restriction.is_primitive():
            seen.add(letters)
            entries.append(
                (
                    sub.alphabet.tokens[b],
                    tuple(sub.alphabet.tokens[a] for a in sorted(letters)),
                    restriction,
                )
            )
    return SubsystemReport(n_amb, tuple(entries))
