"""Alphabets, finite words, and two-sided windows with absolute positions.

Letters are arbitrary whitespace-free tokens.  Internally every letter is a
dense integer id (its index in the alphabet); a word is a tuple of ids.  A
window is a word pinned to an integer interval [lo, hi]; the shift T acts by
(T^c w)_n = w_{n+c}, so shifting moves the interval, never the letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Word = tuple  # tuple[int, ...]; alias kept loose for 3.10 friendliness


class ParseError(ValueError):
    """Input file or expression rejected; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class NotGrowingError(ValueError):
    pass


class UndeterminedError(RuntimeError):
    """A result could not be pinned down within the configured search bounds."""


class Alphabet:
    """Ordered set of distinct letter tokens.

    The ordering is fixed at construction and is used for every canonical
    ordering downstream (seed enumeration, automaton state numbering, ...).
    """

    __slots__ = ("tokens", "_index")

    def __init__(self, tokens: Iterable[str]):
        toks = tuple(tokens)
        if not toks:
            raise ValueError("alphabet must be non-empty")
        index: dict[str, int] = {}
        for tok in toks:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError("bad letter token %r" % (tok,))
            if tok in index:
                raise ValueError("duplicate letter token %r" % (tok,))
            index[tok] = len(index)
        self.tokens = toks
        self._index = index

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.tokens == other.tokens

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __repr__(self) -> str:
        return "Alphabet(%s)" % (" ".join(self.tokens),)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise ValueError("undeclared letter %r" % (token,)) from None

    def word(self, letters: Sequence[str] | str) -> Word:
        """Build a word from a token sequence.

        A plain string is split on whitespace; if that yields a single chunk
        and all alphabet tokens are single characters, the chunk is read
        character by character ("0110" over {0,1}).
        """
        if isinstance(letters, str):
            parts = letters.split()
            if len(parts) == 1 and all(len(t) == 1 for t in self.tokens):
                parts = list(parts[0])
            letters = parts
        return tuple(self.index(tok) for tok in letters)

    def render(self, word: Sequence[int], sep: str | None = None) -> str:
        if sep is None:
            sep = "" if all(len(t) == 1 for t in self.tokens) else " "
        return sep.join(self.tokens[a] for a in word)


@dataclass(frozen=True)
class Window:
    """Letters on the integer interval [lo, lo + len - 1], absolute positions."""

    lo: int
    letters: Word

    @property
    def hi(self) -> int:
        return self.lo + len(self.letters) - 1

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError("position %d outside window [%d, %d]" % (n, self.lo, self.hi))
        return self.letters[n - self.lo]

    def shift(self, c: int) -> "Window":
        """T^c: position n of the result reads position n + c of self."""
        return Window(self.lo - c, self.letters)

    def restrict(self, lo: int, hi: int) -> "Window":
        if lo < self.lo or hi > self.hi:
            raise ValueError("restriction [%d, %d] exceeds [%d, %d]" % (lo, hi, self.lo, self.hi))
        return Window(lo, self.letters[lo - self.lo : hi - self.lo + 1])

    def overlap_interval(self, other: "Window") -> tuple[int, int] | None:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        return (lo, hi) if lo <= hi else None

    def agrees_with(self, other: "Window") -> bool:
        """Letterwise equality on the (possibly empty) overlap."""
        iv = self.overlap_interval(other)
        if iv is None:
            return True
        lo, hi = iv
        return (
            self.letters[lo - self.lo : hi - self.lo + 1]
            == other.letters[lo - other.lo : hi - other.lo + 1]
        )

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi


def least_period(seq: Sequence[int], max_period: int | None = None) -> int | None:
    """Smallest p >= 1 with seq[n] == seq[n+p] for all valid n, else None."""
    n = len(seq)
    limit = n - 1 if max_period is None else min(max_period, n - 1)
    for p in range(1, limit + 1):
        if all(seq[i] == seq[i + p] for i in range(n - p)):
            return p
    return None


def window_nonperiodic(window: Window, max_period: int | None = None) -> bool:
    """True when no period up to max_period (default: half the span) fits."""
    if max_period is None:
        max_period = len(window) // 2
    return least_period(window.letters, max_period) is None
