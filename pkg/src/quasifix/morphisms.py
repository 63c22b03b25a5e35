"""Substitutions and codings: parsing, iteration, and structural analysis.

A substitution maps every letter to a non-empty word over the same alphabet
(erasing images are rejected at construction).  All analysis here is exact:
growth is decided by a letter-set orbit argument, primitivity by boolean
matrix powers up to the Wielandt bound, and prolongability through the
first/last-letter maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .words import Alphabet, NotGrowingError, ParseError, Window, Word


class Substitution:
    """Letter-to-word map over a fixed alphabet, extended by concatenation."""

    __slots__ = ("alphabet", "images", "_cache")

    def __init__(self, alphabet: Alphabet, images):
        images = tuple(tuple(w) for w in images)
        if len(images) != len(alphabet):
            raise ValueError("need exactly one image per letter")
        for a, img in enumerate(images):
            if not img:
                raise ValueError("empty image for letter %r" % alphabet.tokens[a])
            for x in img:
                if not 0 <= x < len(alphabet):
                    raise ValueError("image letter id %d out of range" % x)
        self.alphabet = alphabet
        self.images = images
        self._cache: dict = {}

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Substitution)
            and self.alphabet == other.alphabet
            and self.images == other.images
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.images))

    def __repr__(self) -> str:
        rules = ", ".join(
            "%s->%s" % (self.alphabet.tokens[a], self.alphabet.render(img))
            for a, img in enumerate(self.images)
        )
        return "Substitution(%s)" % rules

    # -- basic structure ---------------------------------------------------

    @property
    def constant_length(self) -> int | None:
        """Common image length k, or None when image lengths differ."""
        if "k" not in self._cache:
            lengths = {len(img) for img in self.images}
            self._cache["k"] = lengths.pop() if len(lengths) == 1 else None
        return self._cache["k"]

    def incidence_matrix(self) -> list[list[int]]:
        """M[a][b] = number of occurrences of b in the image of a."""
        n = len(self.alphabet)
        m = [[0] * n for _ in range(n)]
        for a, img in enumerate(self.images):
            for b in img:
                m[a][b] += 1
        return m

    # -- application -------------------------------------------------------

    def apply(self, word: Word) -> Word:
        out: list[int] = []
        for a in word:
            out.extend(self.images[a])
        return tuple(out)

    def apply_window(self, window: Window) -> Window:
        """Image of a window, anchored at the fixed origin.

        The image of the letter at position 0 starts at position 0, so the
        window must reach the origin (lo <= 0 <= hi) unless the substitution
        has constant length, where block positions are position-independent.
        """
        k = self.constant_length
        if k is not None:
            return Window(k * window.lo, self.apply(window.letters))
        if not (window.lo <= 0 <= window.hi):
            raise ValueError("nonconstant-length image needs a window containing 0")
        start = -sum(len(self.images[a]) for a in window.letters[: -window.lo])
        return Window(start, self.apply(window.letters))

    def image_length(self, word: Word) -> int:
        return sum(len(self.images[a]) for a in word)

    def power(self, n: int) -> "Substitution":
        """n-fold self-composition; power(0) is the identity substitution."""
        if n < 0:
            raise ValueError("power wants n >= 0")
        cache = self._cache.setdefault("powers", {})
        if n not in cache:
            if n == 0:
                result = Substitution(self.alphabet, tuple((a,) for a in range(len(self.alphabet))))
            elif n == 1:
                result = self
            else:
                half = self.power(n // 2)
                result = Substitution(self.alphabet, tuple(half.apply(img) for img in half.images))
                if n % 2:
                    result = Substitution(self.alphabet, tuple(self.apply(img) for img in result.images))
            cache[n] = result
        return cache[n]

    # -- first/last letter maps and prolongability --------------------------

    def first_letter_map(self) -> tuple:
        return tuple(img[0] for img in self.images)

    def last_letter_map(self) -> tuple:
        return tuple(img[-1] for img in self.images)

    def right_prolongable(self) -> tuple:
        f = self.first_letter_map()
        return tuple(a for a in range(len(self.alphabet)) if f[a] == a)

    def left_prolongable(self) -> tuple:
        g = self.last_letter_map()
        return tuple(a for a in range(len(self.alphabet)) if g[a] == a)

    # -- growth -------------------------------------------------------------

    def bounded_letters(self) -> frozenset:
        """Letters a whose iterated image lengths |phi^n(a)| stay bounded.

        B is the largest set of letters with a length-1 image staying inside
        B; a letter is bounded exactly when the eventually periodic orbit of
        its letter set S_n = letters(phi^n(a)) has every cycle set inside B.
        """
        if "bounded" in self._cache:
            return self._cache["bounded"]
        n = len(self.alphabet)
        b_set = {a for a in range(n) if len(self.images[a]) == 1}
        changed = True
        while changed:
            changed = False
            for a in list(b_set):
                if self.images[a][0] not in b_set:
                    b_set.discard(a)
                    changed = True
        bounded = set()
        for a in range(n):
            seen: dict[frozenset, int] = {}
            current = frozenset((a,))
            while current not in seen:
                seen[current] = len(seen)
                current = frozenset(x for c in current for x in self.images[c])
            # cycle = every set from the first recurrence of `current` onward
            start = seen[current]
            cycle_ok = all(s <= b_set for s, idx in seen.items() if idx >= start)
            if cycle_ok:
                bounded.add(a)
        result = frozenset(bounded)
        self._cache["bounded"] = result
        return result

    def is_growing(self) -> bool:
        return not self.bounded_letters()

    def require_growing(self) -> None:
        if not self.is_growing():
            bad = sorted(self.alphabet.tokens[a] for a in self.bounded_letters())
            raise NotGrowingError("substitution is not growing (bounded letters: %s)" % ", ".join(bad))

    # -- primitivity ---------------------------------------------------------

    def is_primitive(self) -> bool:
        """Some power of the incidence matrix is positive; Wielandt bound."""
        n = len(self.alphabet)
        full = (1 << n) - 1
        rows = [0] * n
        for a, img in enumerate(self.images):
            for b in img:
                rows[a] |= 1 << b
        target = (n - 1) ** 2 + 1
        power = rows
        steps = 1
        while steps < target:
            power = _bool_mat_mult(power, rows)
            steps += 1
        return all(r == full for r in power)

    # -- reachability ----------------------------------------------------------

    def reachable_letters(self, b: int) -> frozenset:
        """Least letter set containing b and closed under taking image letters."""
        seen = {b}
        stack = [b]
        while stack:
            for x in self.images[stack.pop()]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return frozenset(seen)

    def restrict(self, letters) -> "Substitution":
        """Restriction to a sub-alphabet closed under the substitution."""
        subset = sorted(set(letters))
        for a in subset:
            if any(x not in subset for x in self.images[a]):
                raise ValueError(
                    "letter set {%s} is not closed under the substitution"
                    % ", ".join(self.alphabet.tokens[a] for a in subset)
                )
        sub_alpha = Alphabet(self.alphabet.tokens[a] for a in subset)
        relabel = {a: i for i, a in enumerate(subset)}
        images = tuple(tuple(relabel[x] for x in self.images[a]) for a in subset)
        return Substitution(sub_alpha, images)


def _bool_mat_mult(a: list[int], b: list[int]) -> list[int]:
    n = len(a)
    out = [0] * n
    for i in range(n):
        row = a[i]
        acc = 0
        for j in range(n):
            if row >> j & 1:
                acc |= b[j]
        out[i] = acc
    return out


@dataclass(frozen=True)
class Coding:
    """Total letter-to-letter map between alphabets (a length-1 morphism)."""

    source: Alphabet
    target: Alphabet
    table: tuple  # tuple[int, ...], source id -> target id

    def __post_init__(self):
        if len(self.table) != len(self.source):
            raise ValueError("coding must be total on the source alphabet")
        for x in self.table:
            if not 0 <= x < len(self.target):
                raise ValueError("coding target id %d out of range" % x)

    def __call__(self, a: int) -> int:
        return self.table[a]

    def apply(self, word: Word) -> Word:
        return tuple(self.table[a] for a in word)

    def apply_window(self, window: Window) -> Window:
        return Window(window.lo, self.apply(window.letters))

    @staticmethod
    def identity(alphabet: Alphabet) -> "Coding":
        return Coding(alphabet, alphabet, tuple(range(len(alphabet))))


@dataclass(frozen=True)
class Analysis:
    """Structural report for a substitution."""

    is_growing: bool
    constant_length: int | None
    is_primitive: bool
    right_prolongable: tuple
    left_prolongable: tuple
    n_amb: int
    n_amb_bound: int
    bounded_letters: tuple


def _compose(f: tuple, g: tuple) -> tuple:
    return tuple(f[x] for x in g)


def _func_power(f: tuple, n: int) -> tuple:
    result = tuple(range(len(f)))
    base = f
    while n:
        if n & 1:
            result = _compose(base, result)
        base = _compose(base, base)
        n >>= 1
    return result


def ambi_idempotent_exponent(sub: Substitution) -> int:
    """Least n with F^(2n) = F^n and G^(2n) = G^n for the first/last maps.

    phi^n is then ambi-idempotent; n never exceeds |alphabet|!.
    """
    f = sub.first_letter_map()
    g = sub.last_letter_map()
    bound = factorial(len(sub.alphabet))
    for n in range(1, bound + 1):
        fn = _func_power(f, n)
        gn = _func_power(g, n)
        if _func_power(f, 2 * n) == fn and _func_power(g, 2 * n) == gn:
            return n
    raise AssertionError("no ambi-idempotent exponent within |A|! — unreachable")


def analyze(sub: Substitution) -> Analysis:
    return Analysis(
        is_growing=sub.is_growing(),
        constant_length=sub.constant_length,
        is_primitive=sub.is_primitive(),
        right_prolongable=sub.right_prolongable(),
        left_prolongable=sub.left_prolongable(),
        n_amb=ambi_idempotent_exponent(sub),
        n_amb_bound=factorial(len(sub.alphabet)),
        bounded_letters=tuple(sorted(sub.bounded_letters())),
    )


# -- file format ------------------------------------------------------------
#
#   alphabet: <tok> <tok> ...
#   map <tok> -> <tok> <tok> ...     one line per letter
#   coding <tok> -> <tok>            optional block; target alphabet inferred
#
# '#' starts a comment; blank lines are ignored.


def parse_substitution(text: str) -> tuple[Substitution, Coding | None]:
    alphabet: Alphabet | None = None
    rules: dict[int, Word] = {}
    coding_pairs: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet:"):
            if alphabet is not None:
                raise ParseError("duplicate alphabet declaration", lineno)
            toks = line[len("alphabet:"):].split()
            if not toks:
                raise ParseError("empty alphabet", lineno)
            try:
                alphabet = Alphabet(toks)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            continue
        if alphabet is None:
            raise ParseError("expected 'alphabet:' before %r" % line.split()[0], lineno)
        parts = line.split()
        if parts[0] == "map":
            if "->" not in parts:
                raise ParseError("map line needs '->'", lineno)
            arrow = parts.index("->")
            if arrow != 2:
                raise ParseError("map line must be 'map <letter> -> <letters>'", lineno)
            tok = parts[1]
            if tok not in alphabet:
                raise ParseError("undeclared letter %r" % tok, lineno)
            a = alphabet.index(tok)
            if a in rules:
                raise ParseError("duplicate rule for letter %r" % tok, lineno)
            image_toks = parts[arrow + 1:]
            if not image_toks:
                raise ParseError("empty image for letter %r" % tok, lineno)
            try:
                rules[a] = tuple(alphabet.index(t) for t in image_toks)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif parts[0] == "coding":
            if len(parts) != 4 or parts[2] != "->":
                raise ParseError("coding line must be 'coding <letter> -> <letter>'", lineno)
            tok = parts[1]
            if tok not in alphabet:
                raise ParseError("undeclared letter %r" % tok, lineno)
            a = alphabet.index(tok)
            if any(a == src for src, _ in coding_pairs):
                raise ParseError("duplicate coding for letter %r" % tok, lineno)
            coding_pairs.append((a, parts[3]))
        else:
            raise ParseError("unrecognized directive %r" % parts[0], lineno)
    if alphabet is None:
        raise ParseError("missing alphabet declaration")
    missing = [alphabet.tokens[a] for a in range(len(alphabet)) if a not in rules]
    if missing:
        raise ParseError("missing rule for letter(s): %s" % ", ".join(missing))
    sub = Substitution(alphabet, tuple(rules[a] for a in range(len(alphabet))))
    coding = None
    if coding_pairs:
        if len(coding_pairs) != len(alphabet):
            done = {src for src, _ in coding_pairs}
            missing = [alphabet.tokens[a] for a in range(len(alphabet)) if a not in done]
            raise ParseError("coding must be total; missing: %s" % ", ".join(missing))
        target_toks: list[str] = []
        for _, tok in coding_pairs:
            if tok not in target_toks:
                target_toks.append(tok)
        target = Alphabet(target_toks)
        table = [0] * len(alphabet)
        for src, tok in coding_pairs:
            table[src] = target.index(tok)
        coding = Coding(alphabet, target, tuple(table))
    return sub, coding


def load_substitution(text: str, allow_nongrowing: bool = False) -> tuple[Substitution, Coding | None]:
    sub, coding = parse_substitution(text)
    if not allow_nongrowing:
        sub.require_growing()
    return sub, coding
