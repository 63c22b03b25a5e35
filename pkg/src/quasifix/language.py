"""Exact language computation for the two-sided system of a growing substitution.

The language is driven entirely by the set of admissible pairs.  Pairs are
computed in two stages:

* reachable pairs: least fixpoint of P -> factors_2(phi(P)) seeded with the
  pairs inside single images;
* admissible pairs: a pair survives iff, inside the reachable-pair graph
  (edges p -> q whenever p occurs in phi(q)), it reaches a cycle component
  whose occurrences supply left context infinitely often and right context
  infinitely often.  Occurrence margins matter: a pair that only ever sits
  flush against the left edge of its parents' images has no two-sided
  extension and belongs to no biinfinite point.

Longer factors follow from pairs by a worklist closure: the set of language
words of length <= L is the least set containing the admissible pairs (and
their letters) that is closed under w -> short factors of phi(w).
"""

from __future__ import annotations

from .morphisms import Substitution
from .words import Word

Pair = tuple  # (int, int)


def _pairs_of(word: Word) -> set:
    return {(word[i], word[i + 1]) for i in range(len(word) - 1)}


def reachable_pairs(sub: Substitution) -> frozenset:
    """All pairs occurring in some phi^n(a), n >= 1."""
    frontier = set()
    for img in sub.images:
        frontier |= _pairs_of(img)
    seen = set(frontier)
    while frontier:
        new = set()
        for a, b in frontier:
            new |= _pairs_of(sub.images[a] + sub.images[b])
        frontier = new - seen
        seen |= frontier
    return frozenset(seen)


def _occurrence_edges(sub: Substitution, pairs: frozenset):
    """Edges child -> parent with aggregated margin flags.

    For every parent pair q and occurrence of a child pair p inside phi(q),
    record whether the occurrence leaves room on the left (offset > 0) and on
    the right (offset + 2 < |phi(q)|).
    """
    edges: dict[Pair, dict[Pair, list[bool]]] = {p: {} for p in pairs}
    for q in pairs:
        image = sub.images[q[0]] + sub.images[q[1]]
        total = len(image)
        for o in range(total - 1):
            p = (image[o], image[o + 1])
            if p not in edges:
                continue
            flags = edges[p].setdefault(q, [False, False])
            if o > 0:
                flags[0] = True
            if o + 2 < total:
                flags[1] = True
    return edges


def _tarjan_sccs(nodes, successors):
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = [0]

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(successors(succ))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    top = stack.pop()
                    on_stack.discard(top)
                    comp.append(top)
                    if top == node:
                        break
                sccs.append(comp)
    return sccs


def pair_language(sub: Substitution) -> frozenset:
    """The admissible pairs L^2 of the two-sided system."""
    sub.require_growing()
    pairs = reachable_pairs(sub)
    edges = _occurrence_edges(sub, pairs)
    sccs = _tarjan_sccs(sorted(pairs), lambda p: sorted(edges[p].keys()))
    comp_of = {}
    for idx, comp in enumerate(sccs):
        for node in comp:
            comp_of[node] = idx
    good: set[int] = set()
    for idx, comp in enumerate(sccs):
        members = set(comp)
        has_left = has_right = has_internal = False
        for p in comp:
            for q, (lflag, rflag) in edges[p].items():
                if q in members:
                    has_internal = True
                    has_left = has_left or lflag
                    has_right = has_right or rflag
        if has_internal and has_left and has_right:
            good.add(idx)
    # a pair is admissible iff it reaches a good component
    admissible: dict[Pair, bool] = {}

    def reaches_good(p: Pair, trail: set) -> bool:
        if p in admissible:
            return admissible[p]
        if comp_of[p] in good:
            admissible[p] = True
            return True
        trail.add(p)
        ok = False
        for q in edges[p]:
            if q in trail:
                continue
            if reaches_good(q, trail):
                ok = True
                break
        trail.discard(p)
        admissible[p] = ok
        return ok

    return frozenset(p for p in pairs if reaches_good(p, set()))


def letter_language(sub: Substitution) -> frozenset:
    """L^1: letters that actually occur in the two-sided system."""
    return frozenset(a for p in pair_language(sub) for a in p)


def language(sub: Substitution, max_len: int, pairs: frozenset | None = None) -> frozenset:
    """All language words of length in [1, max_len].

    Worklist closure: start from admissible pairs and their letters, and for
    every member w add all factors of phi(w) up to max_len.  A factor of
    length l inside phi(v) touches at most l letters of v, so the closure
    already contains every factor of every phi^n(ab).
    """
    if max_len <= 0:
        return frozenset()
    if pairs is None:
        pairs = pair_language(sub)
    found: set[Word] = set()
    for a, b in pairs:
        found.add((a,))
        found.add((b,))
        if max_len >= 2:
            found.add((a, b))
    frontier = list(found)
    while frontier:
        word = frontier.pop()
        image = sub.apply(word)
        n = len(image)
        for i in range(n):
            top = min(n, i + max_len)
            for j in range(i + 1, top + 1):
                w = image[i:j]
                if w not in found:
                    found.add(w)
                    frontier.append(w)
    return frozenset(found)


def contains(sub: Substitution, word: Word, table: "LanguageTable | None" = None) -> bool:
    if not word:
        return True
    if table is not None:
        return word in table.factors(len(word))
    return word in language(sub, len(word))


class LanguageTable:
    """Memoized language queries for one substitution.

    Results are pure functions of the substitution, so sharing a table across
    threads can at worst recompute a set; it never changes an answer.
    """

    def __init__(self, sub: Substitution):
        self.sub = sub
        self._pairs: frozenset | None = None
        self._factors: dict[int, frozenset] = {}
        self._best: int = 0

    @property
    def pairs(self) -> frozenset:
        if self._pairs is None:
            self._pairs = pair_language(self.sub)
        return self._pairs

    @property
    def letters(self) -> frozenset:
        return frozenset(a for p in self.pairs for a in p)

    def factors(self, max_len: int) -> frozenset:
        if max_len <= self._best:
            key = max(self._factors)
            return frozenset(w for w in self._factors[key] if len(w) <= max_len)
        full = language(self.sub, max_len, pairs=self.pairs)
        self._factors = {max_len: full}
        self._best = max_len
        return full

    def contains(self, word: Word) -> bool:
        if not word:
            return True
        return word in self.factors(len(word))


def language_table(sub: Substitution) -> LanguageTable:
    table = sub._cache.get("language_table")
    if table is None:
        table = LanguageTable(sub)
        sub._cache["language_table"] = table
    return table
