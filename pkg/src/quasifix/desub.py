"""Window desubstitution, digit streams, and factorization counting.

Desubstituting a window means writing it as T^c(phi(pred)) for a predecessor
window pred, with the cut containing position 0 determining 0 <= c <
|phi(pred_0)|.  For long windows of nonperiodic points the step is unique;
periodic content yields several steps and absence from the language yields
none.  Iterating the step produces the digit stream c_0, c_1, ... whose
partial sums s_n = sum c_i k^i satisfy z = T^{s_n}(phi^n(z^n)); for a
quasi-fixed point the stream is exactly the base-k expansion of its k-adic
address, which is how desub_digits computes it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kadic import DigitExpansion
from .morphisms import Substitution
from .qfp import Qfp, agreement_radius, identify
from .words import UndeterminedError, Window, Word, window_nonperiodic


@dataclass(frozen=True)
class DesubStep:
    c: int
    pred: Window


_MAX_BRANCHES = 256


def desubstitute_window(sub: Substitution, window: Window) -> list[DesubStep]:
    """All (c, pred) with T^c(phi(pred)) matching the window on the overlap.

    The window must reach position 0 and span at least one full image.  The
    predecessor window is the maximal interval of letters the cut grid
    determines: an edge block whose visible part matches several letters is
    dropped rather than guessed.
    """
    if not window.lo <= 0 <= window.hi:
        raise ValueError("desubstitution window must contain position 0")
    max_img = max(len(img) for img in sub.images)
    if len(window) < max_img:
        raise ValueError("window shorter than the longest image")
    letters = window.letters
    n = len(letters)
    images = sub.images

    # grid DP over cut positions: options[p] lists full blocks starting at a
    # cut p, tails[p] the letters whose image is only partially visible there
    by_len: dict[int, list[int]] = {}
    for b, img in enumerate(images):
        by_len.setdefault(len(img), []).append(b)
    options: list[list[tuple]] = [[] for _ in range(n + 1)]
    tails: list[tuple] = [() for _ in range(n + 1)]
    for p in range(n):
        for length, bs in sorted(by_len.items()):
            if p + length <= n:
                cands = tuple(b for b in bs if images[b] == letters[p : p + length])
                if cands:
                    options[p].append((length, cands))
        tails[p] = tuple(
            b for b, img in enumerate(images) if len(img) > n - p and img[: n - p] == letters[p:]
        )
    viable = [False] * (n + 1)
    viable[n] = True
    for p in range(n - 1, -1, -1):
        viable[p] = bool(tails[p]) or any(viable[p + length] for length, _ in options[p])

    def suffix_tilings(start: int):
        """All (blocks, tail) tilings of letters[start:], iteratively."""
        if not viable[start]:
            return []
        done = []
        stack = [(start, ())]
        while stack:
            p, blocks = stack.pop()
            if p == n:
                done.append((blocks, None))
            else:
                if tails[p]:
                    done.append((blocks, (p, n - p, tails[p])))
                for length, cands in options[p]:
                    if viable[p + length]:
                        stack.append((p + length, blocks + ((p, length, cands),)))
            if len(done) > _MAX_BRANCHES:
                raise UndeterminedError("too many tilings; window too ambiguous")
        return done

    solutions = []
    # entry at a cut exactly on the left edge
    for blocks, tail in suffix_tilings(0):
        solutions.append((None, blocks, tail))
    # entry through a partially visible first block, grouped by its geometry
    # (same visible length and same image length share a start position)
    head_groups: dict[tuple, list[int]] = {}
    for b, img in enumerate(images):
        for e in range(1, len(img)):
            visible = len(img) - e
            if visible <= n and img[e:] == letters[:visible]:
                head_groups.setdefault((visible, len(img)), []).append(b)
    for (visible, img_len), bs in sorted(head_groups.items()):
        head = (visible - img_len, visible, tuple(bs))
        for blocks, tail in suffix_tilings(visible):
            solutions.append((head, blocks, tail))

    steps: dict[tuple, DesubStep] = {}
    for head, blocks, tail in solutions:
        entries = []  # (absolute start, candidate letters)
        if head is not None:
            start, _, cands = head
            entries.append((window.lo + start, cands))
        for p, _, cands in blocks:
            entries.append((window.lo + p, cands))
        if tail is not None:
            p, _, cands = tail
            entries.append((window.lo + p, cands))
        # locate the block containing absolute position 0
        zero_idx = None
        for idx, (start, _) in enumerate(entries):
            nxt = entries[idx + 1][0] if idx + 1 < len(entries) else window.hi + 1
            if start <= 0 < max(nxt, start + 1):
                zero_idx = idx
                break
        if zero_idx is None:
            continue
        c = -entries[zero_idx][0]
        # drop undetermined edge blocks, then branch over interior ambiguity
        first, last = 0, len(entries) - 1
        if head is not None and len(entries[0][1]) > 1 and zero_idx != 0:
            first = 1
        if tail is not None and len(entries[-1][1]) > 1 and zero_idx != len(entries) - 1:
            last = len(entries) - 2
        if first > last:
            continue
        chosen = entries[first : last + 1]
        zero_rel = zero_idx - first
        combos = 1
        for _, cands in chosen:
            combos *= len(cands)
            if combos > _MAX_BRANCHES:
                raise UndeterminedError("too many interior letter choices")
        from itertools import product

        for pick in product(*(cands for _, cands in chosen)):
            pred = Window(-zero_rel, tuple(pick))
            steps.setdefault((c, pred.lo, pred.letters), DesubStep(c, pred))
    out = sorted(steps.values(), key=lambda s: (s.c, s.pred.lo, s.pred.letters))
    return out


def desub_digits(q: Qfp) -> DigitExpansion:
    """Digit stream of a quasi-fixed point: the base-k expansion of kappa(q).

    For shift-periodic points the stream returned is the canonical one coming
    from the anchored relation; uniqueness of desubstitution may fail there.
    """
    k = q.substitution.constant_length
    if k is None:
        raise UndeterminedError("digit streams need constant length")
    return q.kappa().expansion()


@dataclass(frozen=True)
class Detection:
    status: str  # found | ambiguous | no-repetition | not-in-language
    qfp: Qfp | None = None
    relation: tuple | None = None
    digits: tuple = ()
    detail: str = ""


def detect_qfp(sub: Substitution, window: Window, depth: int, min_core: int = 2) -> Detection:
    """Decide from a window whether the underlying point is quasi-fixed.

    Desubstitution is iterated up to `depth` levels; a repetition of central
    window content signals a candidate period.  The candidate's relation is
    reconstructed from the digits, matched to a seed, and certified against
    the input window, so a "found" verdict is exact.  Branching at any level
    (periodic content) yields an ambiguity report instead.
    """
    k = sub.constant_length
    if k is None:
        raise UndeterminedError("detect_qfp needs constant length")
    chains = [[(None, window)]]
    branched = False
    for _ in range(depth):
        new_chains = []
        for chain in chains:
            current = chain[-1][1]
            if len(current) < max(len(img) for img in sub.images) or not (
                current.lo < 0 < current.hi
            ):
                new_chains.append(chain)  # window exhausted; keep for reporting
                continue
            try:
                steps = desubstitute_window(sub, current)
            except (ValueError, UndeterminedError):
                new_chains.append(chain)
                continue
            if not steps:
                if len(chain) == 1:
                    return Detection("not-in-language", detail="no desubstitution step exists")
                new_chains.append(chain)
                continue
            if len(steps) > 1:
                branched = True
            for step in steps[:8]:
                new_chains.append(chain + [(step.c, step.pred)])
        chains = new_chains[:64]
        found = _scan_for_cycle(sub, window, chains, k, min_core)
        if found is not None:
            if branched:
                return Detection(
                    "ambiguous",
                    qfp=found.qfp,
                    relation=found.relation,
                    digits=found.digits,
                    detail="desubstitution branches (%d chains); %s" % (len(chains), found.detail),
                )
            return found
    if branched:
        return Detection("ambiguous", detail="%d surviving branches" % len(chains))
    return Detection("no-repetition", detail="no cycle within depth %d" % depth,
                     digits=tuple(c for c, _ in chains[0][1:]) if chains else ())


def _scan_for_cycle(sub, window, chains, k, min_core):
    for chain in chains:
        levels = chain  # (c, window) with c None at level 0
        for p in range(len(levels)):
            for q_idx in range(p + 1, len(levels)):
                wp, wq = levels[p][1], levels[q_idx][1]
                rho = min(-wp.lo, wp.hi, -wq.lo, wq.hi)
                if rho < min_core:
                    continue
                if wp.restrict(-rho, rho) != wq.restrict(-rho, rho):
                    continue
                digits = [c for c, _ in levels[1:]]
                m_hat = q_idx - p
                s_p = sum(digits[i] * k**i for i in range(p))
                c_cycle = sum(digits[p + i] * k**i for i in range(m_hat))
                c_x = s_p * (1 - k**m_hat) + (k**p) * c_cycle
                w0 = agreement_radius(m_hat, c_x, k)
                if not window.covers(-w0, w0):
                    continue
                cand = identify(sub, m_hat, c_x, window)
                if cand is not None:
                    return Detection(
                        "found",
                        qfp=cand,
                        relation=(m_hat, c_x),
                        digits=tuple(digits),
                        detail="cycle at levels %d..%d" % (p, q_idx),
                    )
    return None


# -- factorizations by a finite set of words ----------------------------------


@dataclass(frozen=True)
class FactorizationReport:
    count: int
    total: int
    witnesses: tuple  # cut-position tuples, absolute coordinates
    nonperiodic: bool


_MAX_FACTORIZATIONS = 4096


def _all_cut_sets(letters: Word, words: list[Word]) -> list[tuple]:
    n = len(letters)
    nexts: list[list[int]] = [[] for _ in range(n + 1)]
    tail_ok = [False] * (n + 1)
    for p in range(n):
        for w in words:
            lw = len(w)
            if p + lw <= n:
                if letters[p : p + lw] == w:
                    nexts[p].append(p + lw)
            elif w[: n - p] == letters[p:]:
                tail_ok[p] = True
    viable = [False] * (n + 1)
    viable[n] = True
    for p in range(n - 1, -1, -1):
        viable[p] = tail_ok[p] or any(viable[q] for q in nexts[p])

    def from_cut(start: int):
        if not viable[start]:
            return []
        done = []
        stack = [(start, ())]
        while stack:
            p, cuts = stack.pop()
            if p == n:
                done.append(cuts)
            else:
                if tail_ok[p]:
                    done.append(cuts + (p,))
                for q in nexts[p]:
                    if viable[q]:
                        stack.append((q, cuts + (p,)))
            if len(done) > _MAX_FACTORIZATIONS:
                raise UndeterminedError("too many factorizations")
        return done

    solutions = list(from_cut(0))
    starts = set()
    for w in words:
        for e in range(1, len(w)):
            first = len(w) - e  # first cut after a partially visible first word
            if first <= n and w[e:] == letters[:first] and first not in starts:
                starts.add(first)
                solutions.extend(from_cut(first))
    return _dedup(solutions)


def _dedup(items):
    seen = set()
    out = []
    for it in items:
        if it not in seen:
            seen.add(it)
            out.append(it)
    return out


def disjoint_factorization_count(
    window: Window, words, one_sided: bool = False
) -> FactorizationReport:
    """Maximum number of pairwise disjoint factorizations of the window.

    A factorization tiles the span with members of `words`, allowing a
    partially visible word at each edge (for one-sided input the leading
    partial is the proper-suffix head word).  Factorizations are compared by
    their cut sets; for nonperiodic content the maximum family size is capped
    by len(words), which callers may assert.
    """
    word_list = [tuple(w) for w in words]
    if not word_list or any(not w for w in word_list):
        raise ValueError("word set must be non-empty words")
    cut_sets = _all_cut_sets(window.letters, word_list)
    cut_sets = [tuple(window.lo + c for c in cs) for cs in cut_sets]
    sets = [frozenset(cs) for cs in cut_sets]
    best: list[int] = []

    def extend(idx: int, chosen: list[int]):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if idx == len(sets) or len(chosen) + (len(sets) - idx) <= len(best):
            return
        for j in range(idx, len(sets)):
            if all(not (sets[j] & sets[i]) for i in chosen):
                extend(j + 1, chosen + [j])

    extend(0, [])
    return FactorizationReport(
        count=len(best),
        total=len(sets),
        witnesses=tuple(cut_sets[i] for i in best),
        nonperiodic=window_nonperiodic(window),
    )


def fiber_size_bound(alphabet_size: int) -> int:
    """Reporting default for the fiber-size constant: an upper estimate.

    At most |A| digit streams can share a nonperiodic image (disjoint
    factorization bound) and at most |A|^3 nonperiodic points share a digit
    stream, so |A|^4 bounds the fiber over any nonperiodic point.
    """
    return alphabet_size**4
