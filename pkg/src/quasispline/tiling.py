"""Aperiodic point sets on the line: beta-integers, the Fibonacci model set, word analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .quadfield import GOLDEN, Family, FieldSpec, QuadRat


class TilingError(ValueError):
    pass


class SequenceTooShortError(TilingError):
    pass


class NotABetaIntegerError(TilingError):
    pass


class OutOfWindowError(TilingError):
    pass


class Source(str, Enum):
    BETA_INTEGERS = "beta-integers"
    FIBONACCI_CHAIN = "fibonacci"
    RESCALED = "rescaled"
    LATTICE = "lattice"


@dataclass(frozen=True)
class SubstitutionRule:
    image_of_L: str
    image_of_S: str
    tile_len_L: QuadRat
    tile_len_S: QuadRat
    scale: QuadRat

    def apply(self, word: str) -> str:
        return "".join(self.image_of_L if c == "L" else self.image_of_S for c in word)

    def image_length(self, letter: str) -> QuadRat:
        img = self.image_of_L if letter == "L" else self.image_of_S
        return img.count("L") * self.tile_len_L + img.count("S") * self.tile_len_S

    def is_consistent(self) -> bool:
        """Stone-inflation check: scaled tiles are packed exactly by their images."""
        return (
            self.image_length("L") == self.scale * self.tile_len_L
            and self.image_length("S") == self.scale * self.tile_len_S
        )

    @property
    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (
            (self.image_of_L.count("L"), self.image_of_L.count("S")),
            (self.image_of_S.count("L"), self.image_of_S.count("S")),
        )


def beta_substitution(fld: FieldSpec) -> SubstitutionRule:
    """Substitution whose fixed point gives the nonnegative beta-integers."""
    a = fld.a
    beta = fld.beta
    one = fld.one()
    if fld.family is Family.MINUS:
        return SubstitutionRule("L" * a + "S", "L", one, beta.inv(), beta)
    return SubstitutionRule("L" * (a - 1) + "S", "L" * (a - 2) + "S", one, one - beta.inv(), beta)


def fibonacci_substitution() -> SubstitutionRule:
    """L -> LLS, S -> LS with tiles 1 and 1/tau (the rescaled chain), inflation tau^2."""
    tau = GOLDEN.beta
    return SubstitutionRule("LLS", "LS", GOLDEN.one(), tau.inv(), tau * tau)


def model_set_substitution(fld: FieldSpec) -> SubstitutionRule:
    """Stone-inflation substitution of F_beta for beta in the minus family (tiles beta+1, beta)."""
    if fld.family is not Family.MINUS:
        raise TilingError("only defined for the minus family")
    a = fld.a
    block = "S" * (a - 1) + "L"
    beta = fld.beta
    return SubstitutionRule(
        "L" + block * a + "S" * a,
        "L" + block * (a - 1) + "S" * a,
        beta + 1,
        beta,
        beta * beta,
    )


@dataclass(frozen=True)
class ModelSetSpec:
    window_lo: QuadRat
    window_hi: QuadRat
    closed_lo: bool = True
    open_hi: bool = True

    def __post_init__(self):
        if (self.window_hi - self.window_lo).sign() != 1:
            raise TilingError("window must have nonempty interior")

    def contains(self, y: QuadRat) -> bool:
        lo = (y - self.window_lo).sign()
        hi = (self.window_hi - y).sign()
        ok_lo = lo > 0 or (lo == 0 and self.closed_lo)
        ok_hi = hi > 0 or (hi == 0 and not self.open_hi)
        return ok_lo and ok_hi


def default_window() -> ModelSetSpec:
    tau = GOLDEN.beta
    return ModelSetSpec(GOLDEN.zero(), tau * tau)


@dataclass(frozen=True, eq=False)
class NodeSequence:
    """Finite slice lambda_{i_min} < ... < lambda_{i_max} of a Delaunay set.

    ``letters[k - i_min]`` labels the gap [lambda_k, lambda_{k+1}].
    """

    nodes: tuple[QuadRat, ...]
    i_min: int
    letters: str
    source: Source
    tile_len: dict = dc_field(default_factory=dict)
    window: ModelSetSpec | None = None
    factor: QuadRat | None = None  # nodes = factor * (model set with `window`)

    def __post_init__(self):
        if len(self.letters) != max(len(self.nodes) - 1, 0):
            raise TilingError("need one letter per gap")

    @property
    def field(self) -> FieldSpec:
        return self.nodes[0].field

    @property
    def i_max(self) -> int:
        return self.i_min + len(self.nodes) - 1

    def __len__(self):
        return len(self.nodes)

    def indices(self) -> range:
        return range(self.i_min, self.i_max + 1)

    def node(self, k: int) -> QuadRat:
        if not self.i_min <= k <= self.i_max:
            raise IndexError(f"index {k} outside [{self.i_min}, {self.i_max}]")
        return self.nodes[k - self.i_min]

    def letter(self, k: int) -> str:
        if not self.i_min <= k < self.i_max:
            raise IndexError(f"no gap at index {k}")
        return self.letters[k - self.i_min]

    def word(self, k: int, n: int) -> str:
        if k < self.i_min or k + n > self.i_max:
            raise IndexError(f"word [{k}, {k + n}] outside sequence")
        return self.letters[k - self.i_min : k - self.i_min + n]

    @cached_property
    def _index(self) -> dict:
        return {x: k for k, x in zip(self.indices(), self.nodes)}

    def index_of(self, x: QuadRat) -> int | None:
        return self._index.get(x)

    def contains(self, x: QuadRat) -> bool:
        """Exact membership test; model sets use the conjugate-window criterion."""
        if self.window is not None:
            y = x / self.factor if self.factor is not None else x
            return y.is_integral() and self.window.contains(y.conjugate())
        if not (self.nodes[0] <= x <= self.nodes[-1]):
            raise TilingError("membership undecidable outside the generated range")
        return x in self._index

    def contains_scaled(self, x: QuadRat, theta: QuadRat) -> bool:
        """x in theta * Lambda."""
        return self.contains(x / theta)

    def integer_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer arrays (A, B) with lambda_k = A_k + B_k*beta; nodes must lie in Z[beta]."""
        if not all(x.is_integral() for x in self.nodes):
            raise TilingError("nodes are not in Z[beta]")
        return (
            np.array([x.x for x in self.nodes], dtype=np.int64),
            np.array([x.y for x in self.nodes], dtype=np.int64),
        )

    def slice(self, lo: int, hi: int) -> NodeSequence:
        if lo < self.i_min or hi > self.i_max or lo > hi:
            raise SequenceTooShortError(f"[{lo}, {hi}] not inside [{self.i_min}, {self.i_max}]")
        return NodeSequence(
            self.nodes[lo - self.i_min : hi - self.i_min + 1],
            lo,
            self.letters[lo - self.i_min : hi - self.i_min],
            self.source,
            self.tile_len,
            self.window,
            self.factor,
        )


def _sequence_from_word(word: str, lens: dict, origin: QuadRat, i_min: int, source: Source, **kw) -> NodeSequence:
    nodes = [origin]
    for c in word:
        nodes.append(nodes[-1] + lens[c])
    return NodeSequence(tuple(nodes), i_min, word, source, dict(lens), **kw)


def _iterate_prefix(rule: SubstitutionRule, seed: str, n: int) -> str:
    w = seed
    while len(w) < n:
        nxt = rule.apply(w)
        if len(nxt) <= len(w):
            raise TilingError("substitution does not grow")
        w = nxt
    return w[:n]


def _iterate_suffix(rule: SubstitutionRule, seed: str, n: int) -> str:
    w = seed
    while len(w) < n:
        w = rule.apply(w)
    return w[len(w) - n :]


def generate_beta_integers(fld: FieldSpec, word_length: int, symmetric: bool = False) -> NodeSequence:
    """Nodes of Z_beta^+ from the fixed point of the beta-substitution seeded with L at 0.

    With ``symmetric`` the mirror image -Z_beta^+ is prepended (index 0 stays at 0).
    """
    if word_length < 1:
        raise TilingError("word_length must be >= 1")
    rule = beta_substitution(fld)
    lens = {"L": rule.tile_len_L, "S": rule.tile_len_S}
    word = _iterate_prefix(rule, "L", word_length)
    pos = _sequence_from_word(word, lens, fld.zero(), 0, Source.BETA_INTEGERS)
    if not symmetric:
        return pos
    neg = tuple(-x for x in reversed(pos.nodes[1:]))
    return NodeSequence(neg + pos.nodes, -len(neg), word[::-1] + word, Source.BETA_INTEGERS, dict(lens))


def beta_power(fld: FieldSpec, j: int) -> QuadRat:
    return fld.beta ** j


def greedy_beta_digits(x: QuadRat, fld: FieldSpec | None = None, frac_digits: int = 0) -> str:
    """Greedy beta-expansion of x >= 0, most significant digit first.

    With ``frac_digits == 0`` the expansion must terminate at beta^0, otherwise
    ``NotABetaIntegerError`` is raised. With ``frac_digits > 0`` up to that many
    digits after a radix point are produced (error if still not exhausted).
    """
    fld = fld or x.field
    if x.field != fld:
        raise TilingError("field mismatch")
    if x.sign() < 0:
        raise NotABetaIntegerError("negative input")
    if x.is_zero():
        return "0"
    beta = fld.beta
    j = 0
    p = fld.one()
    while p * beta <= x:
        p = p * beta
        j += 1
    while p > x:
        p = p / beta
        j -= 1
    top = max(j, 0)
    p = beta ** top
    digits = []
    rest = x
    k = top
    while k >= -frac_digits:
        d = math.floor(rest / p)
        digits.append(d)
        rest = rest - d * p
        if rest.is_zero() and k <= 0:
            break
        p = p / beta
        k -= 1
    if not rest.is_zero():
        raise NotABetaIntegerError(f"{x} has no expansion with {frac_digits} fractional digits")
    int_part = "".join(str(d) for d in digits[: top + 1])
    frac = "".join(str(d) for d in digits[top + 1 :])
    return int_part + ("." + frac if frac else "")


def is_beta_integer(x: QuadRat) -> bool:
    try:
        greedy_beta_digits(abs(x))
    except NotABetaIntegerError:
        return False
    return True


def fibonacci_node(k: int) -> QuadRat:
    """lambda_k = (ceil(k/tau) + k*tau)/tau^2."""
    tau = GOLDEN.beta
    c = math.ceil(k * tau.inv())
    return (c + k * tau) / (tau * tau)


def _letters_from_gaps(nodes: Sequence[QuadRat]) -> tuple[str, dict]:
    gaps = [b - a for a, b in zip(nodes, nodes[1:])]
    distinct = sorted(set(gaps), key=float)
    if len(distinct) > 2:
        raise TilingError(f"more than two tile lengths: {distinct}")
    if len(distinct) == 0:
        return "", {}
    long_ = distinct[-1]
    lens = {"L": long_}
    if len(distinct) == 2:
        lens["S"] = distinct[0]
    return "".join("L" if g == long_ else "S" for g in gaps), lens


def cut_and_project(window: ModelSetSpec, x_lo: QuadRat, x_hi: QuadRat, fld: FieldSpec = GOLDEN) -> list[QuadRat]:
    """All y in Z[beta] with x_lo <= y <= x_hi and y' in the window, sorted."""
    root_d = math.sqrt(fld.disc)
    wlo, whi = float(window.window_lo), float(window.window_hi)
    # y - y' = n*sqrt(D) for y = m + n*beta
    n_lo = math.floor((float(x_lo) - whi) / root_d) - 1
    n_hi = math.ceil((float(x_hi) - wlo) / root_d) + 1
    bconj = fld.beta_conj
    out = []
    for n in range(n_lo, n_hi + 1):
        m_lo = math.floor(window.window_lo - n * bconj) - 1
        m_hi = math.ceil(window.window_hi - n * bconj) + 1
        for m in range(m_lo, m_hi + 1):
            y = QuadRat(m, n, 1, fld)
            if window.contains(y.conjugate()) and x_lo <= y <= x_hi:
                out.append(y)
    out.sort(key=lambda v: (float(v), v.x))
    # float sort is only a hint; fix any adjacent inversions exactly
    for i in range(1, len(out)):
        j = i
        while j > 0 and out[j] < out[j - 1]:
            out[j], out[j - 1] = out[j - 1], out[j]
            j -= 1
    return out


def generate_fibonacci_chain(index_range: tuple[int, int], window: ModelSetSpec | None = None) -> NodeSequence:
    """The model set Sigma^window around 0, indexed so that lambda_0 = 0 (or the first point >= 0)."""
    lo, hi = index_range
    if window is None:
        window = default_window()
        if hi < lo:
            return NodeSequence((GOLDEN.zero(),), 0, "", Source.FIBONACCI_CHAIN,
                                {"L": GOLDEN.one(), "S": GOLDEN.beta.inv()}, window)
        nodes = [fibonacci_node(k) for k in range(lo, hi + 1)]
        letters, _ = _letters_from_gaps(nodes)
        tau = GOLDEN.beta
        lens = {"L": GOLDEN.one(), "S": tau.inv()}
        letters = "".join("L" if b - a == lens["L"] else "S" for a, b in zip(nodes, nodes[1:]))
        return NodeSequence(tuple(nodes), lo, letters, Source.FIBONACCI_CHAIN, lens, window)
    # general interval window: enumerate, then anchor index 0 at the first point >= 0
    span = float(window.window_hi - window.window_lo)
    density = span / math.sqrt(GOLDEN.disc)
    reach = max(abs(lo), abs(hi)) / density + 4
    pts = cut_and_project(window, GOLDEN(-math.ceil(reach)), GOLDEN(math.ceil(reach)))
    zero_pos = next(i for i, p in enumerate(pts) if p.sign() >= 0)
    if zero_pos + lo < 0 or zero_pos + hi >= len(pts):
        raise TilingError("enumeration range too small")
    sel = pts[zero_pos + lo : zero_pos + hi + 1]
    letters, lens = _letters_from_gaps(sel)
    return NodeSequence(tuple(sel), lo, letters, Source.FIBONACCI_CHAIN, lens, window)


def fibonacci_by_substitution(left_letters: int, right_letters: int) -> NodeSequence:
    """Fibonacci chain grown as sigma^inf(S) | sigma^inf(L) around the origin."""
    rule = fibonacci_substitution()
    lens = {"L": rule.tile_len_L, "S": rule.tile_len_S}
    right = _iterate_prefix(rule, "L", right_letters)
    left = _iterate_suffix(rule, "S", left_letters) if left_letters else ""
    origin = GOLDEN.zero()
    for c in left:
        origin = origin - lens[c]
    return _sequence_from_word(left + right, lens, origin, -len(left), Source.FIBONACCI_CHAIN,
                               window=default_window())


def model_set_by_substitution(fld: FieldSpec, left_letters: int, right_letters: int) -> list[QuadRat]:
    """F_beta (minus family) as nodes of the stone-inflation tiling grown from S|L at 0."""
    rule = model_set_substitution(fld)
    lens = {"L": rule.tile_len_L, "S": rule.tile_len_S}
    right = _iterate_prefix(rule, "L", right_letters)
    left = _iterate_suffix(rule, "S", left_letters)
    nodes = [fld.zero()]
    for c in right:
        nodes.append(nodes[-1] + lens[c])
    x = fld.zero()
    neg = []
    for c in reversed(left):
        x = x - lens[c]
        neg.append(x)
    return list(reversed(neg)) + nodes


def model_set_by_sieving(fld: FieldSpec, bound: QuadRat, beta_letters: int) -> list[QuadRat]:
    """F_beta = {x in Z_beta : x' in [0, 1)}, restricted to [-bound, bound]."""
    zb = generate_beta_integers(fld, beta_letters, symmetric=True)
    if zb.nodes[-1] < bound:
        raise SequenceTooShortError("beta-integers do not cover the bound")
    win = ModelSetSpec(fld.zero(), fld.one())
    return [x for x in zb.nodes if -bound <= x <= bound and win.contains(x.conjugate())]


def neighbor_map(x_conj: QuadRat, direction: str = "right") -> QuadRat:
    """Conjugate of the nearest right (left) neighbour in the Fibonacci chain Sigma^[0, tau^2)."""
    tau = GOLDEN.beta
    if not default_window().contains(x_conj):
        raise OutOfWindowError(f"{x_conj} not in [0, tau^2)")
    if direction == "right":
        return x_conj + 1 if x_conj < tau else x_conj - tau
    if direction == "left":
        # images of the L branch fill [1, tau^2), of the S branch [0, 1)
        return x_conj - 1 if x_conj >= 1 else x_conj + tau
    raise ValueError("direction must be 'right' or 'left'")


@dataclass(frozen=True)
class WordClass:
    word: str
    indices: tuple[int, ...]
    window: tuple[QuadRat, QuadRat] | None  # conjugate window [w1, w2) for model sets


def _word_table(seq: NodeSequence, n: int) -> dict[str, list[int]]:
    table: dict[str, list[int]] = {}
    for k in range(seq.i_min, seq.i_max - n + 1):
        table.setdefault(seq.word(k, n), []).append(k)
    return table


def _lex_key(word: str) -> str:
    # L > S; sort descending by mapping L->'1', S->'0'
    return word.replace("L", "1").replace("S", "0")


def classify_words(seq: NodeSequence, n: int) -> list[WordClass]:
    """Partition of indices by the n-letter word starting there, largest word first (L > S)."""
    if n < 1:
        raise TilingError("n must be >= 1")
    if len(seq) <= n:
        raise SequenceTooShortError("sequence shorter than n")
    table = _word_table(seq, n)
    words = sorted(table, key=_lex_key, reverse=True)
    windows: dict[str, tuple[QuadRat, QuadRat]] = {}
    if seq.window is not None and seq.factor is None and seq.i_min <= -n and seq.i_max >= n:
        ends = sorted(((seq.node(k).conjugate(), seq.word(k, n)) for k in range(-n, 1)), key=lambda t: float(t[0]))
        bounds = [c for c, _ in ends] + [seq.window.window_hi]
        for i, (c, w) in enumerate(ends):
            windows[w] = (c, bounds[i + 1])
    return [WordClass(w, tuple(table[w]), windows.get(w)) for w in words]


def left_ends_of_all_words(seq: NodeSequence, n: int) -> list[int]:
    """Indices -n..0, checked to start pairwise distinct words covering every class."""
    if seq.i_min > -n or seq.i_max < n:
        raise SequenceTooShortError(f"need indices {-n}..{n}")
    all_words = set(_word_table(seq, n))
    idx = list(range(-n, 1))
    hit = [seq.word(k, n) for k in idx]
    if len(set(hit)) != n + 1 or set(hit) != all_words:
        raise TilingError(f"left ends {idx} do not hit all {len(all_words)} words exactly once")
    return idx


def word_letter_counts(seq: NodeSequence, start: int, n: int) -> tuple[int, int]:
    """(#L, #S) in the n-letter word at ``start``, counted directly and via tau^2(lambda_{k+n} - lambda_k - n/tau)."""
    w = seq.word(start, n)
    direct = (w.count("L"), w.count("S"))
    tau = GOLDEN.beta
    formula = (tau * tau) * (seq.node(start + n) - seq.node(start) - n * tau.inv())
    if not formula.is_rational() or formula.p.denominator != 1:
        raise TilingError(f"letter-count formula not an integer: {formula}")
    if int(formula.p) != direct[0]:
        raise TilingError(f"direct count {direct[0]} != formula {formula}")
    allowed = {
        (math.ceil(n * tau.inv()), math.floor(n * tau.inv() ** 2)),
        (math.floor(n * tau.inv()), math.ceil(n * tau.inv() ** 2)),
    }
    if direct not in allowed:
        raise TilingError(f"counts {direct} not in {allowed}")
    return direct


def rescale(seq: NodeSequence, factor: QuadRat) -> NodeSequence:
    if factor.sign() != 1:
        raise TilingError("factor must be positive")
    base = seq.factor if seq.factor is not None else seq.field.one()
    return NodeSequence(
        tuple(x * factor for x in seq.nodes),
        seq.i_min,
        seq.letters,
        Source.RESCALED,
        {k: v * factor for k, v in seq.tile_len.items()},
        seq.window,
        base * factor if seq.window is not None else None,
    )


def lattice(fld: FieldSpec, index_range: tuple[int, int]) -> NodeSequence:
    """The integer lattice as a (one-letter) node sequence, for dyadic sanity checks."""
    lo, hi = index_range
    nodes = tuple(QuadRat(k, 0, 1, fld) for k in range(lo, hi + 1))
    return NodeSequence(nodes, lo, "L" * (hi - lo), Source.LATTICE, {"L": fld.one()})


def chain_rows(seq: NodeSequence, lo: int, hi: int, theta: QuadRat | None = None,
               symbol: str = "tau") -> list[dict]:
    """One record per point: letter, index, tau-expansion, a+b*tau, in theta*Lambda."""
    theta = theta if theta is not None else GOLDEN.beta ** 2
    rows = []
    for k in range(lo, hi + 1):
        x = seq.node(k)
        sign = "-" if x.sign() < 0 else ""
        rows.append({
            "letter": seq.letter(k) if k < seq.i_max else None,
            "index": k,
            "expansion": sign + greedy_beta_digits(abs(x), frac_digits=64),
            "value": x.format(symbol),
            "float": float(x),
            "in_theta_lambda": seq.contains_scaled(x, theta),
        })
    return rows
