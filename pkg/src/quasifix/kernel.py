"""Column maps and exact kernel automata for quasi-fixed points.

For a length-k substitution the column maps send a letter to the letter at a
fixed offset of its image; composing them along the base-k digits of a
position evaluates iterated images pointwise.  A quasi-fixed point z is
determined by its digit stream c_0, c_1, ... and the chain of predecessor
points z^j; the kernel automaton walks digits of a position n (least
significant first) while tracking

    (composed column map f, chain level j, carry s in {0, 1})

so that after consuming the low digits the remaining value N satisfies
z_n = f(z^j_N).  Positions n >= 0 drain to N = 0 and n < 0 to N = -1, which
is why an observation is the pair (f(z^j_{s-1}), f(z^j_s)): the carry shifts
both terminals by one.  The chain level wraps on the period of the chain of
points, not of the digit stream; the two can differ, so the cycle is found
by identifying each chain element exactly and watching for a repeat.

States are finite (column maps x chain slots x carry), every transition is
total, and minimization by partition refinement yields the kernel size: the
number of distinct two-sided subsequences along arithmetic progressions
k^m n + i.
"""

from __future__ import annotations

from fractions import Fraction

from .morphisms import Coding, Substitution
from .qfp import Qfp, agreement_radius, enumerate_seeds
from .words import Alphabet, ParseError, UndeterminedError

ColumnMap = tuple  # tuple[int, ...]: letter id -> letter id


def column_maps(sub: Substitution, m: int) -> frozenset:
    """All compositions of m single-digit column maps (deduplicated)."""
    k = sub.constant_length
    if k is None:
        raise UndeterminedError("column maps need constant length")
    if m < 0:
        raise ValueError("m must be >= 0")
    ident = tuple(range(len(sub.alphabet)))
    if m == 0:
        return frozenset((ident,))
    family = frozenset(_single_columns(sub))
    for _ in range(m - 1):
        family = _column_step(sub, family)
    return family


def _single_columns(sub: Substitution) -> list:
    k = sub.constant_length
    return [tuple(sub.images[a][e] for a in range(len(sub.alphabet))) for e in range(k)]


def _column_step(sub: Substitution, family: frozenset) -> frozenset:
    cols = _single_columns(sub)
    return frozenset(tuple(col[f[a]] for a in range(len(f))) for col in cols for f in family)


def column_constant_power(sub: Substitution) -> int:
    """Least n >= 1 with the column families of phi^n and phi^2n equal.

    Computed on the subset dynamics P -> {col o f}; afterwards phi^n has the
    same column family at every power.
    """
    seq = [column_maps(sub, 1)]
    seen = {seq[0]: 0}
    while True:
        nxt = _column_step(sub, seq[-1])
        if nxt in seen:
            pre = seen[nxt]
            cyc = len(seq) - pre
            break
        seen[nxt] = len(seq)
        seq.append(nxt)

    def family_at(i: int) -> frozenset:  # i >= 0 indexes F_{phi, i+1}
        return seq[i] if i < len(seq) else seq[pre + (i - pre) % cyc]

    n = 1
    while True:
        if family_at(2 * n - 1) == family_at(n - 1):
            return n
        n += 1


def column_constant_post_check(sub: Substitution, n: int) -> bool:
    """Independent re-derivation: build phi^n and compare its own families."""
    power = sub.power(n)
    return column_maps(power, 1) == column_maps(power, 2)


class KernelAutomaton:
    """Digit-driven evaluator of a two-sided automatic sequence.

    `trans[s][d]` is the successor on digit d; `obs[s]` the pair of output
    letters read when the remaining position value is -1 or 0.  States are
    numbered breadth-first from the root, so construction is deterministic.
    """

    __slots__ = ("k", "alphabet", "obs", "trans", "root", "meta")

    def __init__(self, k: int, alphabet: Alphabet, obs, trans, root: int = 0, meta=None):
        self.k = k
        self.alphabet = alphabet
        self.obs = list(obs)
        self.trans = [tuple(t) for t in trans]
        self.root = root
        self.meta = dict(meta or {})
        for t in self.trans:
            if len(t) != k:
                raise ValueError("every state needs %d transitions" % k)

    def __len__(self) -> int:
        return len(self.obs)

    def eval(self, n: int) -> int:
        state = self.root
        while n != 0 and n != -1:
            state = self.trans[state][n % self.k]
            n //= self.k
        pair = self.obs[state]
        return pair[1] if n == 0 else pair[0]

    def eval_token(self, n: int) -> str:
        return self.alphabet.tokens[self.eval(n)]

    def minimize(self) -> "KernelAutomaton":
        n = len(self.obs)
        classes = {}
        cls = [classes.setdefault(o, len(classes)) for o in self.obs]
        while True:
            sigs: dict = {}
            new = [0] * n
            for i in range(n):
                sig = (cls[i],) + tuple(cls[ch] for ch in self.trans[i])
                new[i] = sigs.setdefault(sig, len(sigs))
            if len(sigs) == len(set(cls)):
                break
            cls = new
        # renumber classes breadth-first from the root class
        order: dict[int, int] = {cls[self.root]: 0}
        reps = {cls[self.root]: self.root}
        queue = [self.root]
        while queue:
            state = queue.pop(0)
            for d in range(self.k):
                ch = self.trans[state][d]
                if cls[ch] not in order:
                    order[cls[ch]] = len(order)
                    reps[cls[ch]] = ch
                    queue.append(ch)
        obs = [None] * len(order)
        trans = [None] * len(order)
        for c, idx in order.items():
            rep = reps[c]
            obs[idx] = self.obs[rep]
            trans[idx] = tuple(order[cls[self.trans[rep][d]]] for d in range(self.k))
        meta = dict(self.meta)
        meta["raw_states"] = len(self.obs)
        meta["minimized"] = True
        return KernelAutomaton(self.k, self.alphabet, obs, trans, 0, meta)

    def one_sided_views(self) -> dict:
        """Terminal outputs split by side: n >= 0 reads obs[1], n < 0 obs[0]."""
        return {
            "nonneg": tuple(self.alphabet.tokens[o[1]] for o in self.obs),
            "neg": tuple(self.alphabet.tokens[o[0]] for o in self.obs),
        }


def kernel_size(automaton: KernelAutomaton) -> int:
    return len(automaton.minimize())


def equal_sequences(a: KernelAutomaton, b: KernelAutomaton) -> bool:
    """Product-automaton reachability: equal iff all reachable observations agree."""
    if a.k != b.k:
        raise ValueError("automata evaluate in different bases")
    seen = {(a.root, b.root)}
    queue = [(a.root, b.root)]
    while queue:
        sa, sb = queue.pop()
        oa, ob = a.obs[sa], b.obs[sb]
        if (a.alphabet.tokens[oa[0]], a.alphabet.tokens[oa[1]]) != (
            b.alphabet.tokens[ob[0]],
            b.alphabet.tokens[ob[1]],
        ):
            return False
        for d in range(a.k):
            pair = (a.trans[sa][d], b.trans[sb][d])
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True


def _chain(q: Qfp):
    """Chain elements of q up to the first repeat of (digit phase, point).

    Returns (t, ell, digits, windows): transient and cycle length of the
    chain of points, the digits c_0..c_{t+ell-1}, and a radius-2 window per
    chain element.  Every chain element is identified exactly as a seed plus
    shift via the propagation certificate, so the wrap is sound even when
    distinct chain points share the digit stream.
    """
    sub = q.substitution
    k = sub.constant_length
    m, c = q.relation()
    big_k = k**m
    expansion = q.kappa().expansion()
    pre_len, cyc_len = len(expansion.preperiod), len(expansion.cycle)
    w0 = agreement_radius(m, c, k)
    target = q.materialize(-w0, w0)
    seeds = enumerate_seeds(sub, m)

    reps: list[Qfp] = []
    digits: list[int] = []
    seen: dict[tuple, int] = {}
    kappa_j = q.kappa().value
    s_j = 0
    j = 0
    cap = pre_len + cyc_len * (len(sub.alphabet) ** 3 + 2) + 2
    while True:
        phase = j if j < pre_len else pre_len + (j - pre_len) % cyc_len
        rep = _identify_chain_element(q, sub, m, big_k, k, j, s_j, kappa_j, seeds, w0, target)
        key = (phase, rep.seed, rep.t)
        if key in seen:
            t = seen[key]
            ell = j - t
            return t, ell, digits[: t + ell], reps[: t + ell]
        seen[key] = j
        reps.append(rep)
        d = expansion.digit(j)
        digits.append(d)
        s_j += d * k**j
        kappa_j = (kappa_j - d) / k
        j += 1
        if j > cap:
            raise AssertionError("chain failed to cycle within the pigeonhole bound")


def _identify_chain_element(q, sub, m, big_k, k, j, s_j, kappa_j, seeds, w0, target):
    c_rel_frac = kappa_j * (1 - big_k)
    if c_rel_frac.denominator != 1:
        raise AssertionError("chain element address is not integral")
    c_rel = int(c_rel_frac)
    phi_j = sub.power(j)
    base_r = (w0 + s_j) // (k**j) + 2
    for seed in seeds:
        num = seed.base_offset - c_rel
        if num % (big_k - 1):
            continue
        cand = Qfp(seed, num // (big_k - 1))
        image = phi_j.apply_window(cand.materialize(-base_r, base_r)).shift(s_j)
        if image.covers(-w0, w0) and image.restrict(-w0, w0).letters == target.letters:
            return cand
    raise AssertionError("no seed matches chain element %d" % j)


def build_kernel_automaton(q: Qfp, coding: Coding | None = None) -> KernelAutomaton:
    """Exact automaton for q: eval(n) reproduces the materialized point.

    Transition law from state (f, j, s) on digit d: with e = d + s + c_j,
    compose f with the column map at e mod k and carry e // k; the level
    advances and wraps on the point-chain cycle.  Observations read the
    chain element's letters at s-1 and s, composed with f and the optional
    output coding.
    """
    sub = q.substitution
    k = sub.constant_length
    if k is None:
        raise UndeterminedError("kernel automata need constant length")
    if coding is not None and coding.source != sub.alphabet:
        raise ValueError("coding source alphabet mismatch")
    t, ell, digits, reps = _chain(q)
    windows = [rep.materialize(-2, 2) for rep in reps]
    cols = _single_columns(sub)
    out_table = coding.table if coding is not None else tuple(range(len(sub.alphabet)))
    out_alphabet = coding.target if coding is not None else sub.alphabet
    ident = tuple(range(len(sub.alphabet)))

    def observation(f, j, s):
        w = windows[j]
        return (out_table[f[w[s - 1]]], out_table[f[w[s]]])

    key_to_id = {(ident, 0, 0): 0}
    order = [(ident, 0, 0)]
    trans: list[tuple] = []
    idx = 0
    while idx < len(order):
        f, j, s = order[idx]
        row = []
        for d in range(k):
            e = d + s + digits[j]
            col = cols[e % k]
            # digits grow in significance, so the new column map applies first
            child = (
                tuple(f[col[a]] for a in range(len(f))),
                j + 1 if j + 1 < t + ell else t,
                e // k,
            )
            if child not in key_to_id:
                key_to_id[child] = len(order)
                order.append(child)
            row.append(key_to_id[child])
        trans.append(tuple(row))
        idx += 1
    obs = [observation(*key) for key in order]
    meta = {"t": t, "ell": ell, "digits": tuple(digits), "raw_states": len(order)}
    return KernelAutomaton(k, out_alphabet, obs, trans, 0, meta)


# -- text and dot export -------------------------------------------------------
#
#   k=<k> root=<id>
#   state <id> obs=<tok>,<tok>
#   edge <src> <digit> <dst>


def export_dfao(automaton: KernelAutomaton, fmt: str = "text") -> str:
    toks = automaton.alphabet.tokens
    if any("," in t for t in toks):
        raise ValueError("letter tokens containing ',' cannot be exported")
    if fmt == "text":
        lines = ["k=%d root=%d" % (automaton.k, automaton.root)]
        for i, (om, oz) in enumerate(automaton.obs):
            lines.append("state %d obs=%s,%s" % (i, toks[om], toks[oz]))
        for i, row in enumerate(automaton.trans):
            for d, ch in enumerate(row):
                lines.append("edge %d %d %d" % (i, d, ch))
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["digraph dfao {", "  rankdir=LR;"]
        for i, (om, oz) in enumerate(automaton.obs):
            shape = ' peripheries=2' if i == automaton.root else ""
            lines.append('  n%d [label="%d\\nobs=%s,%s"%s];' % (i, i, toks[om], toks[oz], shape))
        for i, row in enumerate(automaton.trans):
            for d, ch in enumerate(row):
                lines.append('  n%d -> n%d [label="%d"];' % (i, ch, d))
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError("unknown export format %r" % fmt)


def parse_dfao(text: str) -> KernelAutomaton:
    k = root = None
    obs_tokens: dict[int, tuple] = {}
    edges: dict[tuple, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].startswith("k="):
            k = int(parts[0][2:])
            root = int(parts[1][len("root="):])
        elif parts[0] == "state":
            sid = int(parts[1])
            if not parts[2].startswith("obs="):
                raise ParseError("state line needs obs=", lineno)
            pair = parts[2][len("obs="):].split(",")
            if len(pair) != 2:
                raise ParseError("observation must be two letters", lineno)
            obs_tokens[sid] = tuple(pair)
        elif parts[0] == "edge":
            edges[(int(parts[1]), int(parts[2]))] = int(parts[3])
        else:
            raise ParseError("unrecognized line %r" % line, lineno)
    if k is None or root is None:
        raise ParseError("missing header 'k=<k> root=<id>'")
    n = len(obs_tokens)
    if sorted(obs_tokens) != list(range(n)):
        raise ParseError("states must be numbered 0..%d" % (n - 1))
    tokens: list[str] = []
    for sid in range(n):
        for tok in obs_tokens[sid]:
            if tok not in tokens:
                tokens.append(tok)
    alphabet = Alphabet(tokens)
    obs = [(alphabet.index(obs_tokens[s][0]), alphabet.index(obs_tokens[s][1])) for s in range(n)]
    trans = []
    for s in range(n):
        row = []
        for d in range(k):
            if (s, d) not in edges:
                raise ParseError("missing edge for state %d digit %d" % (s, d))
            row.append(edges[(s, d)])
        trans.append(tuple(row))
    return KernelAutomaton(k, alphabet, obs, trans, root)
