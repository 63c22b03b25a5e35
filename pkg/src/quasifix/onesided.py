"""One-sided quasi-fixed points as suffixes of two-sided ones.

A one-sided sequence x with T^c(phi^m(x)) = x (negative c read as
x = T^{-c}(phi^m(x))) is always the suffix of a two-sided quasi-fixed point,
and all reasoning here routes through that parent: recover the parent, then
read the one-sided point off a suffix.  One-sided desubstitution may branch
even for nonperiodic points, so it always returns the full step set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .desub import disjoint_factorization_count, FactorizationReport
from .morphisms import Substitution, ambi_idempotent_exponent
from .qfp import Qfp, QfpSeed, BRIDGE, enumerate_seeds
from .words import UndeterminedError, Window, Word


@dataclass(frozen=True)
class OneSidedQfp:
    """Suffix view of a two-sided quasi-fixed point, starting at `start`."""

    parent: Qfp
    start: int

    def prefix(self, length: int) -> Word:
        return self.parent.materialize(self.start, self.start + length - 1).letters

    def window(self, length: int) -> Window:
        return Window(0, self.prefix(length))


def prolong_two_sided(sub: Substitution, m: int, c: int, prefix: Word,
                      verify_length: int = 1000) -> OneSidedQfp:
    """Recover the two-sided parent of a one-sided point from prefix evidence.

    The relation witness (m, c) and a prefix of the point are enough: each
    candidate parent is a period-m seed (possibly after raising the period to
    reach prolongable letters), and the suffix start is forced by the
    relation.  The result is checked against the whole prefix and on top of
    that to verify_length letters.
    """
    prefix = tuple(prefix)
    if not prefix:
        raise ValueError("prefix evidence must be non-empty")
    sub.require_growing()
    k = sub.constant_length
    periods = [m]
    raise_to = ambi_idempotent_exponent(sub.power(m))
    if raise_to > 1:
        periods.append(m * raise_to)
    for m_try in periods:
        if m_try == m:
            c_try = c
        else:
            if k is None:
                continue
            ratio = (k ** m_try - 1) // (k**m - 1)
            c_try = c * ratio  # iterate the relation: offsets compound geometrically
        found = _match_suffix(sub, m_try, c_try, prefix, verify_length)
        if found is not None:
            return found
    raise UndeterminedError(
        "no period-%s parent reproduces the prefix (relation c=%d)" % ("/".join(str(p) for p in periods), c)
    )


def _match_suffix(sub: Substitution, m: int, c: int, prefix: Word, verify_length: int):
    k = sub.constant_length
    check_len = max(len(prefix), min(verify_length, 10**6))
    if k is not None:
        big_k = k**m
        for seed in enumerate_seeds(sub, m):
            num = seed.base_offset - c
            if num % (big_k - 1):
                continue
            p = num // (big_k - 1)
            parent = Qfp(seed)
            got = parent.materialize(p, p + check_len - 1).letters
            if got[: len(prefix)] == prefix:
                return OneSidedQfp(parent, p)
        return None
    # nonconstant length: align the prefix inside materialized seed windows
    radius = max(4 * len(prefix), 256)
    probe = prefix[: min(len(prefix), 64)]
    for seed in enumerate_seeds(sub, m):
        parent = Qfp(seed)
        win = parent.materialize(-radius, radius)
        for p in range(-radius, radius - len(probe) + 1):
            if win.letters[p + radius : p + radius + len(probe)] != probe:
                continue
            got = parent.materialize(p, p + check_len - 1).letters
            if got[: len(prefix)] == prefix:
                return OneSidedQfp(parent, p)
    return None


@dataclass(frozen=True)
class OneSidedStep:
    c: int
    pred: Word


def onesided_desub(sub: Substitution, prefix: Word) -> list[OneSidedStep]:
    """All one-sided steps x = T^c(phi(pred)) consistent with the prefix.

    The first image block may be entered mid-way (that is what c records);
    uniqueness is never asserted.  A trailing partially visible block only
    joins the predecessor when the visible part determines its letter.
    """
    prefix = tuple(prefix)
    n = len(prefix)
    max_img = max(len(img) for img in sub.images)
    if n < max_img:
        raise ValueError("prefix shorter than the longest image")
    images = sub.images
    steps: set[OneSidedStep] = set()
    for b0, img0 in enumerate(images):
        for c in range(len(img0)):
            visible = img0[c:]
            if tuple(visible) != prefix[: len(visible)]:
                continue
            # tile the rest greedily over all letter choices
            stack = [(len(visible), (b0,))]
            while stack:
                pos, pred = stack.pop()
                if pos == n:
                    steps.add(OneSidedStep(c, pred))
                    continue
                tail_cands = [
                    b for b, img in enumerate(images)
                    if len(img) > n - pos and img[: n - pos] == prefix[pos:]
                ]
                if tail_cands:
                    done = pred + (tail_cands[0],) if len(tail_cands) == 1 else pred
                    steps.add(OneSidedStep(c, done))
                for b, img in enumerate(images):
                    if pos + len(img) <= n and img == prefix[pos : pos + len(img)]:
                        stack.append((pos + len(img), pred + (b,)))
    return sorted(steps, key=lambda s: (s.c, s.pred))


def interpretation_count(prefix: Word, words) -> FactorizationReport:
    """Pairwise disjoint interpretations of a one-sided prefix.

    An interpretation tiles the sequence with members of `words` after a
    leading proper suffix of one of them; on the finite prefix this is the
    same cut-set computation as for two-sided windows, anchored at 0.
    """
    return disjoint_factorization_count(Window(0, tuple(prefix)), words, one_sided=True)
