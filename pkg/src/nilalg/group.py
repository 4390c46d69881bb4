"""Exact group law on a nilpotent algebra via the Dynkin commutator series.

The product table is precomputed once per nilpotency class: every 0/1 word of
length up to the class is mapped to its rational coefficient, words whose two
innermost letters agree are dropped (their bracket vanishes identically), and
evaluation shares suffix brackets across words. Coordinates may be rational,
Gaussian rational, or intervals; a call runs in a single arithmetic domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from gmpy2 import mpq

from .algebra import FBasis
from .errors import StructuralError
from .intervals import IV0, Iv, round_iv
from .scalars import Q0, Scalar, rat, rat_str
from .intervals import decimal_str


@lru_cache(maxsize=None)
def dynkin_table_full(k: int) -> tuple[tuple[bytes, mpq], ...]:
    """Word -> coefficient for log(exp X exp Y) truncated past bracket depth k.

    Words are bytes over {0, 1} (0 for the left factor), read left to right as
    the right-nested bracket [z_0, [z_1, ... [z_{d-2}, z_{d-1}]]]. Every word
    with a nonzero net coefficient is kept, including those whose bracket
    vanishes for a plain pair of elements; they still carry weight when a
    factor is split into graded components.
    """
    if k < 1:
        raise StructuralError("bracket depth must be >= 1")
    acc: dict[bytes, mpq] = {}

    def rec(word: bytes, n: int, fact: int) -> None:
        d = len(word)
        if d:
            c = mpq(1 if n % 2 else -1, n * d * fact)
            prev = acc.get(word)
            acc[word] = c if prev is None else prev + c
        if d >= k:
            return
        rem = k - d
        for r in range(rem + 1):
            for s in range(rem - r + 1):
                if r == 0 and s == 0:
                    continue
                rec(
                    word + b"\x00" * r + b"\x01" * s,
                    n + 1,
                    fact * factorial(r) * factorial(s),
                )

    rec(b"", 0, 1)
    out = [(w, c) for w, c in acc.items() if c]
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return tuple(out)


@lru_cache(maxsize=None)
def dynkin_table(k: int) -> tuple[tuple[bytes, mpq], ...]:
    """The evaluation table: dynkin_table_full minus words whose innermost
    pair repeats a letter, since [z, z] = 0 kills them for any pair."""
    return tuple(
        (w, c)
        for w, c in dynkin_table_full(k)
        if not (len(w) >= 2 and w[-1] == w[-2])
    )


def _bracket_sparse(pairs, a: dict, b: dict) -> dict:
    out: dict[int, object] = {}
    for i, j, terms in pairs:
        ai = a.get(i)
        bj = b.get(j)
        aj = a.get(j)
        bi = b.get(i)
        if ai is not None and bj is not None:
            d = ai * bj
            if aj is not None and bi is not None:
                d = d - aj * bi
        elif aj is not None and bi is not None:
            d = -(aj * bi)
        else:
            continue
        if not d:
            continue
        for kk, c in terms:
            v = d * c
            cur = out.get(kk)
            out[kk] = v if cur is None else cur + v
    return out


def _bch_eval(pairs, table, xv: dict, yv: dict) -> dict:
    memo: dict[bytes, dict] = {b"\x00": xv, b"\x01": yv}

    def suffix(w: bytes) -> dict:
        got = memo.get(w)
        if got is None:
            got = _bracket_sparse(pairs, memo[w[:1]], suffix(w[1:]))
            memo[w] = got
        return got

    acc: dict[int, object] = {}
    for w, c in table:
        for idx, val in suffix(w).items():
            t = val * c
            cur = acc.get(idx)
            acc[idx] = t if cur is None else cur + t
    return acc


def _pairs_iv(fb: FBasis):
    got = fb.__dict__.get("_pairs_iv_cache")
    if got is None:
        got = tuple(
            (i, j, tuple((k, Iv(c.re)) for k, c in terms))
            for i, j, terms in fb.pairs
        )
        fb.__dict__["_pairs_iv_cache"] = got
    return got


def bch(fb: FBasis, x, y):
    """Coordinates of log(exp x exp y) in the adapted basis, exact.

    Entries may be rationals, Scalars, or Iv intervals (not mixed with complex
    structure constants). The result tuple matches the richest input kind.
    """
    m = fb.dim
    if len(x) != m or len(y) != m:
        raise StructuralError(f"coordinate length must be {m}")
    table = dynkin_table(fb.depth)
    vals = (*x, *y)
    if any(isinstance(v, Iv) for v in vals):
        if not fb.is_real:
            raise StructuralError("interval coordinates require a real structure table")
        xv = {i: _as_iv(v) for i, v in enumerate(x) if v}
        yv = {i: _as_iv(v) for i, v in enumerate(y) if v}
        acc = _bch_eval(_pairs_iv(fb), table, xv, yv)
        return tuple(acc.get(i, IV0) for i in range(m))
    want_scalar = any(isinstance(v, Scalar) for v in vals)
    all_real = fb.is_real and all(
        v.is_real if isinstance(v, Scalar) else True for v in vals
    )
    if all_real:
        xv = {i: _as_q(v) for i, v in enumerate(x) if v}
        yv = {i: _as_q(v) for i, v in enumerate(y) if v}
        acc = _bch_eval(fb.pairs_q, table, xv, yv)
        if want_scalar:
            return tuple(Scalar(acc.get(i, Q0)) for i in range(m))
        return tuple(acc.get(i, Q0) for i in range(m))
    xv = {i: _as_scalar(v) for i, v in enumerate(x) if v}
    yv = {i: _as_scalar(v) for i, v in enumerate(y) if v}
    acc = _bch_eval(fb.pairs, table, xv, yv)
    return tuple(acc.get(i, Scalar(0)) for i in range(m))


def _as_iv(v) -> Iv:
    if isinstance(v, Iv):
        return v
    if isinstance(v, Scalar):
        if not v.is_real:
            raise StructuralError("cannot mix complex coordinates with intervals")
        return Iv(v.re)
    return Iv(rat(v))


def _as_q(v) -> mpq:
    return v.re if isinstance(v, Scalar) else rat(v)


def _as_scalar(v) -> Scalar:
    return v if isinstance(v, Scalar) else Scalar(rat(v))


def bch_naive(fb: FBasis, x, y):
    """Reference group law: the commutator series summed term by term with no
    table, no shared subterms, and no vanishing-word filter. Slow; kept as an
    independent cross-check."""
    m = fb.dim
    k = fb.depth
    xd = tuple(_as_scalar(v) for v in x)
    yd = tuple(_as_scalar(v) for v in y)
    letters = (xd, yd)
    acc = [Scalar(0)] * m

    def word_value(word: tuple[int, ...]):
        v = letters[word[-1]]
        for ch in reversed(word[:-1]):
            v = fb.bracket_adapted(letters[ch], v)
        return v

    def rec(word: tuple[int, ...], n: int, fact: int) -> None:
        d = len(word)
        if d:
            c = mpq(1 if n % 2 else -1, n * d * fact)
            val = word_value(word)
            for i in range(m):
                if val[i]:
                    acc[i] = acc[i] + val[i] * c
        if d >= k:
            return
        rem = k - d
        for r in range(rem + 1):
            for s in range(rem - r + 1):
                if r == 0 and s == 0:
                    continue
                rec(
                    word + (0,) * r + (1,) * s,
                    n + 1,
                    fact * factorial(r) * factorial(s),
                )

    rec((), 0, 1)
    return tuple(acc)


# -- group elements -------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """A group point in exponential coordinates on an adapted basis."""

    fb: FBasis
    coords: tuple

    @classmethod
    def identity(cls, fb: FBasis) -> "GroupElement":
        return cls(fb, tuple(Q0 for _ in range(fb.dim)))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.fb is not self.fb:
            raise StructuralError("group elements live on different bases")
        return GroupElement(self.fb, bch(self.fb, self.coords, other.coords))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.fb, group_inv(self.coords))


def group_mul(fb: FBasis, s, t):
    return bch(fb, s, t)


def group_inv(t):
    """exp(x)^{-1} = exp(-x)."""
    return tuple(-c for c in t)


def _unit(m: int, i: int, value):
    return tuple(value if j == i else 0 for j in range(m))


def first_to_second(fb: FBasis, t):
    """Split exp(sum t_i e_i) as an ordered product prod_i exp(tbar_i e_i).

    Peels factors off the left; each residual bracket lands strictly deeper in
    the filtration, so the i-th coordinate is final when read."""
    m = fb.dim
    if len(t) != m:
        raise StructuralError(f"coordinate length must be {m}")
    cur = tuple(t)
    out = []
    for i in range(m):
        ti = cur[i]
        out.append(ti)
        if ti:
            cur = bch(fb, _unit(m, i, -ti), cur)
    return tuple(out)


def second_to_first(fb: FBasis, tbar):
    """Fold an ordered product prod_i exp(tbar_i e_i) into one exponential."""
    m = fb.dim
    if len(tbar) != m:
        raise StructuralError(f"coordinate length must be {m}")
    cur = None
    for i in range(m - 1, -1, -1):
        if not tbar[i]:
            continue
        vec = _unit(m, i, tbar[i])
        cur = vec if cur is None else bch(fb, vec, cur)
    if cur is None:
        return _zero_like(tbar, m)
    return tuple(cur)


def _zero_like(vals, m: int):
    if any(isinstance(v, Iv) for v in vals):
        return tuple(IV0 for _ in range(m))
    if any(isinstance(v, Scalar) for v in vals):
        return tuple(Scalar(0) for _ in range(m))
    return tuple(Q0 for _ in range(m))


# -- words in the generators ----------------------------------------------

Letter = tuple[int, object]
Word = list


def word_from_json(doc) -> list[Letter]:
    """Parse [[i, "s"], ...] with 1-based basis indices and rational strings."""
    if not isinstance(doc, list):
        raise StructuralError("a word must be a JSON array of [index, scalar] pairs")
    word: list[Letter] = []
    for entry in doc:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise StructuralError(f"bad word letter {entry!r}")
        i = int(entry[0])
        word.append((i - 1, rat(entry[1])))
    return word


def word_to_json(word, digits: int = 30) -> list:
    out = []
    for i, s in word:
        if isinstance(s, Iv):
            val = rat_str(s.lo) if s.is_point() else decimal_str(s.mid, digits)
        else:
            val = rat_str(rat(s))
        out.append([i + 1, val])
    return out


def merge_letters(word):
    """Fuse adjacent letters on the same generator; exact since they commute."""
    merged: list[Letter] = []
    for i, s in word:
        if merged and merged[-1][0] == i:
            s2 = merged[-1][1] + s
            if s2:
                merged[-1] = (i, s2)
            else:
                merged.pop()
        elif s:
            merged.append((i, s))
    return merged


def exp_of_word(fb: FBasis, word, precision: int = 128):
    """Evaluate the ordered product of exp(s e_i) over the word's letters.

    Returns (coords, radius). Rational letters give exact coordinates and
    radius 0; interval letters give interval coordinates rounded to the given
    precision after each step, with radius the largest final half-width.
    """
    if precision < 64:
        raise StructuralError("precision must be at least 64 bits")
    m = fb.dim
    for i, _ in word:
        if not (0 <= i < m):
            raise StructuralError(f"letter index {i} out of range for dim {m}")
    merged = merge_letters(word)
    interval = any(isinstance(s, Iv) for _, s in merged)
    cur = None
    for i, s in merged:
        vec = _unit(m, i, s)
        cur = vec if cur is None else bch(fb, cur, vec)
        if interval:
            cur = tuple(
                round_iv(c, precision) if isinstance(c, Iv) else c for c in cur
            )
    if cur is None:
        cur = tuple(IV0 if interval else Q0 for _ in range(m))
    if interval:
        cur = tuple(c if isinstance(c, Iv) else Iv(rat(c)) for c in cur)
        radius = max(c.rad for c in cur)
        return tuple(cur), radius
    return tuple(cur), Q0
