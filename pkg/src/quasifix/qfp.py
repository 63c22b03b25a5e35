"""Quasi-fixed points of growing substitutions.

A quasi-fixed point is a biinfinite sequence z with T^c(phi^m(z)) = z for some
period m >= 1 and shift offset c.  Up to shifting, every such point is either

* a bridge: left-infinite prolongation of b glued to a right-infinite
  prolongation of a, both fixed by phi^m (the point is fixed, c = 0), or
* an interior point: built around an occurrence phi^m(a) = v a v' with both
  v and v' non-empty, anchored so the distinguished a sits at position 0
  (then c = |v|).

Seeds are finite descriptors of these points; a Qfp is a seed plus a shift.
Everything here is exact.  The workhorse identity is relation propagation:
two sequences satisfying the same relation z = T^c(phi^m(z)) that agree on a
window of radius (|c| + k^m) / (k^m - 1) + 2 agree everywhere, which turns
window comparisons into equality certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .kadic import KAdicRational
from .language import language_table
from .morphisms import Substitution
from .words import ParseError, UndeterminedError, Window, Word, least_period

BRIDGE = "bridge"
INTERIOR = "interior"


@dataclass(frozen=True)
class QfpSeed:
    sub: Substitution
    m: int
    kind: str
    a: int
    b: int | None = None
    i: int | None = None
    in_system: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("seed period must be >= 1")
        psi = self.sub.power(self.m)
        img = psi.images[self.a]
        if self.kind == INTERIOR:
            if self.i is None or not 1 <= self.i <= len(img) - 2:
                raise ValueError("interior offset must leave both sides non-empty")
            if img[self.i] != self.a:
                raise ValueError(
                    "phi^%d(%s)[%d] is not %s"
                    % (self.m, self.sub.alphabet.tokens[self.a], self.i, self.sub.alphabet.tokens[self.a])
                )
        elif self.kind == BRIDGE:
            if self.b is None:
                raise ValueError("bridge seed needs a left letter b")
            if img[0] != self.a:
                raise ValueError("letter %r is not right-prolongable for phi^%d" % (self.sub.alphabet.tokens[self.a], self.m))
            if psi.images[self.b][-1] != self.b:
                raise ValueError("letter %r is not left-prolongable for phi^%d" % (self.sub.alphabet.tokens[self.b], self.m))
        else:
            raise ValueError("unknown seed kind %r" % self.kind)

    @property
    def base_offset(self) -> int:
        """Offset c of the unshifted point: |v| for interior seeds, 0 for bridges."""
        return self.i if self.kind == INTERIOR else 0

    def describe(self) -> str:
        toks = self.sub.alphabet.tokens
        if self.kind == INTERIOR:
            return "interior a=%s i=%d" % (toks[self.a], self.i)
        return "bridge b=%s a=%s" % (toks[self.b], toks[self.a])


@dataclass(frozen=True)
class Qfp:
    """A quasi-fixed point: T^t applied to the anchored seed point."""

    seed: QfpSeed
    t: int = 0

    @property
    def substitution(self) -> Substitution:
        return self.seed.sub

    # -- defining relation ---------------------------------------------------

    def relation(self) -> tuple[int, int]:
        """(m, c) with z = T^c(phi^m(z)).

        Constant length k gives the closed form c0 + t(1 - k^m).  Otherwise c
        follows from how the shift moves through images: shifting the seed
        point by t multiplies into a shift by the total image length of the
        letters crossed, all of which are materializable, so the offset is
        still exact.
        """
        m = self.seed.m
        c0 = self.seed.base_offset
        t = self.t
        k = self.substitution.constant_length
        if k is not None:
            return m, c0 + t * (1 - k**m)
        if t == 0:
            return m, c0
        psi = self.substitution.power(m)
        if t > 0:
            crossed = _materialize_seed(self.seed, 0, t - 1)
            s = sum(len(psi.images[a]) for a in crossed)
        else:
            crossed = _materialize_seed(self.seed, t, -1)
            s = -sum(len(psi.images[a]) for a in crossed)
        return m, t + c0 - s

    # -- materialization -------------------------------------------------------

    def materialize(self, lo: int, hi: int) -> Window:
        if lo > hi:
            raise ValueError("need lo <= hi")
        return Window(lo, _materialize_seed(self.seed, lo + self.t, hi + self.t))

    def letter_at(self, n: int) -> int:
        return _materialize_seed(self.seed, n + self.t, n + self.t)[0]

    # -- verification ------------------------------------------------------------

    def verify(self, radius: int) -> bool:
        """Check T^c(phi^m(z)) = z letterwise on [-radius, radius]."""
        m, c = self.relation()
        psi = self.substitution.power(m)
        lo, hi = -radius, radius
        while True:
            win = self.materialize(lo, hi)
            image = psi.apply_window(win).shift(c)
            if image.covers(-radius, radius):
                break
            lo -= max(radius // 2, 4)
            hi += max(radius // 2, 4)
        target = self.materialize(-radius, radius)
        return image.restrict(-radius, radius).letters == target.letters

    # -- closure operations ---------------------------------------------------------

    def shift(self, t: int) -> "Qfp":
        return Qfp(self.seed, self.t + t)

    def substitute(self) -> "Qfp":
        """The image point phi(z), re-expressed as a seed plus shift.

        phi(z) has the same period with offset c*k; the matching seed is found
        by the exact identification below.
        """
        sub = self.substitution
        k = sub.constant_length
        if k is None:
            raise UndeterminedError("substitute needs constant length for the exact path")
        m, c = self.relation()
        c_new = c * k
        w0 = agreement_radius(m, c_new, k)
        radius = w0 // k + 2
        image = sub.apply_window(self.materialize(-radius, radius))
        window = image.restrict(-w0, w0)
        q = identify(sub, m, c_new, window)
        if q is None:
            raise AssertionError("image of a quasi-fixed point did not match any seed")
        return q

    def kappa(self) -> KAdicRational:
        from .kadic import kappa

        return kappa(self)

    def digits(self):
        from .desub import desub_digits

        return desub_digits(self)

    def is_periodic(self, p_max: int | None = None) -> int | None:
        """Least shift-period up to p_max (default k^m * |A|^2), or None.

        Candidates are read off a long window; each is certified exactly via
        kernel-automaton equality with the shifted point.
        """
        m, _ = self.relation()
        k = self.substitution.constant_length
        if p_max is None:
            base = k if k is not None else 2
            p_max = base**m * len(self.substitution.alphabet) ** 2
        win = self.materialize(-2 * p_max - 2, 2 * p_max + 2)
        p0 = least_period(win.letters, p_max)
        if p0 is None:
            return None
        p = p0
        while p <= p_max:
            if self.is_equal(self.shift(p)):
                return p
            p += p0
        return None

    def minimal_period(self) -> int:
        """Least period m* among divisors of m; every period is a multiple of it."""
        m, c = self.relation()
        k = self.substitution.constant_length
        if k is None:
            raise UndeterminedError("minimal_period needs constant length for the exact path")
        kappa_val = self.kappa().value
        for d in sorted(_divisors(m)):
            c_d = kappa_val * (1 - k**d)
            if c_d.denominator == 1 and self._satisfies(d, int(c_d)):
                return d
        p = self.is_periodic()
        if p is not None:
            for d in sorted(_divisors(m)):
                span = p * k**d + p + 2
                win = self.materialize(-span, span)
                image_full = self.substitution.power(d).apply_window(win)
                for c_alt in range(p):
                    image = image_full.shift(c_alt)
                    iv = image.overlap_interval(win)
                    if iv and iv[1] - iv[0] + 1 >= p * k**d and image.agrees_with(win):
                        return d
        raise AssertionError("relation period itself failed to certify — unreachable")

    def _satisfies(self, d: int, c_d: int) -> bool:
        """Exact check of z = T^{c_d}(phi^d(z)) by relation propagation."""
        m, c = self.relation()
        k = self.substitution.constant_length
        w0 = agreement_radius(m, c, k)
        psi = self.substitution.power(d)
        radius = w0 + abs(c_d) + 2
        win = self.materialize(-radius, radius)
        image = psi.apply_window(win).shift(c_d)
        if not image.covers(-w0, w0):
            return False
        target = self.materialize(-w0, w0)
        return image.restrict(-w0, w0).letters == target.letters

    def is_equal(self, other: "Qfp", radius: int = 1000) -> bool:
        """Pointwise equality.

        Exact for constant length (kernel-automaton product); for nonconstant
        length this is a window comparison to `radius` and only a heuristic.
        """
        if self.substitution != other.substitution:
            return False
        if self.seed == other.seed and self.t == other.t:
            return True
        if self.substitution.constant_length is None:
            return self.materialize(-radius, radius) == other.materialize(-radius, radius)
        from .kernel import build_kernel_automaton, equal_sequences

        if self.materialize(-8, 8) != other.materialize(-8, 8):
            return False
        return equal_sequences(build_kernel_automaton(self), build_kernel_automaton(other))

    # -- rendering --------------------------------------------------------------

    def describe(self) -> str:
        return "qfp m=%d form=%s shift=%d" % (self.seed.m, self.seed.describe(), self.t)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _materialize_seed(seed: QfpSeed, lo: int, hi: int) -> Word:
    """Letters of the unshifted seed point on [lo, hi]."""
    if lo > hi:
        return ()
    psi = seed.sub.power(seed.m)
    left_needed = max(0, -lo)
    right_needed = max(0, hi)
    if seed.kind == BRIDGE:
        right = (seed.a,)
        while len(right) <= right_needed:
            right = psi.apply(right)
        left = (seed.b,)
        while len(left) < left_needed:
            left = psi.apply(left)
    else:
        img = psi.images[seed.a]
        v, vp = img[: seed.i], img[seed.i + 1 :]
        # right of the anchor: v', psi(v'), psi^2(v'), ...; left mirrors with v
        right = []
        block = vp
        while len(right) < right_needed:
            right.extend(block)
            block = psi.apply(block)
        left_rev = []
        block = v
        while len(left_rev) < left_needed:
            left_rev.extend(reversed(block))
            block = psi.apply(block)
        right = (seed.a,) + tuple(right)  # right[n] = z_n for n >= 0
        out = []
        for n in range(lo, hi + 1):
            out.append(right[n] if n >= 0 else left_rev[-n - 1])
        return tuple(out)
    out = []
    for n in range(lo, hi + 1):
        out.append(right[n] if n >= 0 else left[len(left) + n])
    return tuple(out)


def agreement_radius(m: int, c: int, k: int) -> int:
    """Window radius at which agreement of two (m, c)-related points is global.

    If x and y both satisfy z = T^c(phi^m(z)) and agree on [-r, r], the
    relation rewrites letters at |n| up to about r*k^m - |c| from letters
    inside [-r, r]; once r exceeds (|c| + k^m) / (k^m - 1) the agreed region
    expands without bound.
    """
    big_k = k**m
    return (abs(c) + big_k) // (big_k - 1) + 2


def enumerate_seeds(sub: Substitution, m: int) -> list[QfpSeed]:
    """All period-m seeds: interior occurrences first (by letter, then offset),
    then bridges (by left letter, then right letter), each flagged for system
    membership (bridges need the glue pair in the language)."""
    sub.require_growing()
    if m < 1:
        raise ValueError("period must be >= 1")
    psi = sub.power(m)
    seeds: list[QfpSeed] = []
    for a in range(len(sub.alphabet)):
        img = psi.images[a]
        for i in range(1, len(img) - 1):
            if img[i] == a:
                seeds.append(QfpSeed(sub, m, INTERIOR, a, i=i, in_system=True))
    pairs = language_table(sub).pairs
    for b in psi.left_prolongable():
        for a in psi.right_prolongable():
            seeds.append(QfpSeed(sub, m, BRIDGE, a, b=b, in_system=(b, a) in pairs))
    return seeds


def identify(sub: Substitution, m: int, c: int, window: Window) -> Qfp | None:
    """The quasi-fixed point with relation (m, c) matching the window exactly.

    Constant length only.  Every period-m point is a shifted seed, and the
    relation pins the shift per seed: c = c0 + t(1 - k^m).  A candidate whose
    materialization reproduces the window on a radius past the propagation
    threshold is certified equal to the target, not merely similar.
    """
    k = sub.constant_length
    if k is None:
        raise UndeterminedError("identify needs constant length")
    big_k = k**m
    w0 = agreement_radius(m, c, k)
    if not window.covers(-w0, w0):
        raise ValueError("window radius %d too small; need %d" % (min(-window.lo, window.hi), w0))
    for seed in enumerate_seeds(sub, m):
        num = seed.base_offset - c
        if num % (big_k - 1):
            continue
        q = Qfp(seed, num // (big_k - 1))
        if q.materialize(window.lo, window.hi).letters == window.letters:
            return q
    return None


def dedup(points: list[Qfp]) -> list[Qfp]:
    """Drop points equal (as sequences) to an earlier entry."""
    kept: list[Qfp] = []
    for q in points:
        if not any(q.is_equal(p) for p in kept):
            kept.append(q)
    return kept


# -- spec-style operation aliases -------------------------------------------


def relation_offset(q: Qfp) -> tuple[int, int]:
    return q.relation()


def materialize(q: Qfp, lo: int, hi: int) -> Window:
    return q.materialize(lo, hi)


def verify(q: Qfp, radius: int) -> bool:
    return q.verify(radius)


def shift(q: Qfp, t: int) -> Qfp:
    return q.shift(t)


def substitute(q: Qfp) -> Qfp:
    return q.substitute()


def minimal_period(q: Qfp) -> int:
    return q.minimal_period()


def is_equal(q1: Qfp, q2: Qfp, radius: int = 1000) -> bool:
    return q1.is_equal(q2, radius)


# -- textual seed form --------------------------------------------------------
#
#   qfp m=<m> form=interior a=<tok> i=<i> shift=<t>
#   qfp m=<m> form=bridge b=<tok> a=<tok> shift=<t>
#
# The leading "qfp", the "form=" key, and "shift=" are optional on input; a
# bare "interior" or "bridge" token also selects the form.


def format_seed(q: Qfp) -> str:
    return q.describe()


def parse_seed(sub: Substitution, text: str) -> Qfp:
    kind = None
    fields: dict[str, str] = {}
    for tok in text.split():
        if tok == "qfp":
            continue
        if tok in (INTERIOR, BRIDGE):
            kind = tok
            continue
        if "=" not in tok:
            raise ParseError("bad seed token %r" % tok)
        key, _, value = tok.partition("=")
        if key == "form":
            kind = value
            continue
        if key in fields:
            raise ParseError("duplicate seed field %r" % key)
        fields[key] = value
    if kind not in (INTERIOR, BRIDGE):
        raise ParseError("seed needs form=interior or form=bridge")
    if "m" not in fields:
        raise ParseError("seed needs m=<period>")
    try:
        m = int(fields.pop("m"))
        t = int(fields.pop("shift", "0"))
    except ValueError:
        raise ParseError("m and shift must be integers") from None
    if "a" not in fields:
        raise ParseError("seed needs a=<letter>")
    a = sub.alphabet.index(fields.pop("a"))
    try:
        if kind == INTERIOR:
            i = int(fields.pop("i"))
            seed = QfpSeed(sub, m, INTERIOR, a, i=i)
        else:
            b = sub.alphabet.index(fields.pop("b"))
            seed = QfpSeed(sub, m, BRIDGE, a, b=b)
    except KeyError as exc:
        raise ParseError("seed missing field %s" % exc) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if fields:
        raise ParseError("unknown seed field(s): %s" % ", ".join(sorted(fields)))
    pairs = language_table(sub).pairs
    if seed.kind == BRIDGE:
        seed = replace(seed, in_system=(seed.b, seed.a) in pairs)
    return Qfp(seed, t)
