"""The enveloping algebra on the ordered-monomial basis, with the weighted
prenorm family, entireness certification, and the power-decay profile.

Elements are finitely supported coefficient maps over multi-indices. All
products straighten exactly; norms stay rational whenever the inputs are,
and move to certified intervals otherwise.
"""

import weakref
from dataclasses import dataclass
from math import factorial

from gmpy2 import mpq, mpz

from .algebra import FBasis, ValidationReport, weight_of
from .errors import StructuralError
from .geometry import sigma
from .intervals import (
    Iv,
    decimal_str,
    iv_max,
    nth_root,
    pow_int,
    round_iv,
    sqrt_iv,
)
from .sampling import rand_q, substream
from .scalars import ONE, Q0, Q1, Scalar, parse_scalar, rat, rat_str, scalar_str

SUB_UPROBE = 6

MultiIndex = tuple[int, ...]


# -- elements and straightening --------------------------------------------


def _coerce_coeff(c) -> Scalar:
    if isinstance(c, Scalar):
        return c
    return Scalar(rat(c))


class UElement:
    """Finitely supported element sum c_alpha e^alpha over the ordered
    monomial basis. Zero coefficients never appear in the map."""

    __slots__ = ("fb", "coeffs")

    def __init__(self, fb: FBasis, coeffs: dict):
        clean = {}
        for alpha, c in coeffs.items():
            if len(alpha) != fb.dim or any(
                (not isinstance(a, int)) or a < 0 for a in alpha
            ):
                raise StructuralError(f"bad multi-index {alpha!r}")
            cs = _coerce_coeff(c)
            if cs:
                clean[tuple(alpha)] = cs
        self.fb = fb
        self.coeffs = clean

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, UElement)
            and self.fb is other.fb
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.fb), tuple(sorted(self.coeffs.items()))))

    def __add__(self, other: "UElement") -> "UElement":
        self._check(other)
        out = dict(self.coeffs)
        for alpha, c in other.coeffs.items():
            out[alpha] = out[alpha] + c if alpha in out else c
        return UElement(self.fb, out)

    def __neg__(self) -> "UElement":
        return UElement(self.fb, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "UElement") -> "UElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, UElement):
            return pbw_mul(self, other)
        c = _coerce_coeff(other)
        return UElement(self.fb, {a: v * c for a, v in self.coeffs.items()})

    def __rmul__(self, other):
        return self.__mul__(other)

    def _check(self, other: "UElement"):
        if not isinstance(other, UElement) or other.fb is not self.fb:
            raise StructuralError("elements live over the same adapted basis")

    def __repr__(self):
        if not self.coeffs:
            return "UElement(0)"
        bits = []
        for alpha, c in sorted(self.coeffs.items()):
            mono = "".join(
                f"e{i + 1}" + (f"^{a}" if a > 1 else "")
                for i, a in enumerate(alpha)
                if a
            )
            bits.append(f"({scalar_str(c)}){mono or '1'}")
        return "UElement(" + " + ".join(bits) + ")"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"alpha": list(alpha), "c": scalar_str(c)}
                for alpha, c in sorted(self.coeffs.items())
            ]
        }


def u_zero(fb: FBasis) -> UElement:
    return UElement(fb, {})


def u_one(fb: FBasis) -> UElement:
    return UElement(fb, {(0,) * fb.dim: ONE})


def u_monomial(fb: FBasis, alpha, c=1) -> UElement:
    return UElement(fb, {tuple(alpha): c})


def u_gen(fb: FBasis, i: int) -> UElement:
    if not 0 <= i < fb.dim:
        raise StructuralError(f"generator index {i} out of range")
    alpha = tuple(1 if t == i else 0 for t in range(fb.dim))
    return UElement(fb, {alpha: ONE})


def uelement_from_json(fb: FBasis, doc: dict) -> UElement:
    if not isinstance(doc, dict) or "terms" not in doc:
        raise StructuralError('element JSON needs a "terms" list')
    coeffs: dict = {}
    for entry in doc["terms"]:
        alpha = entry.get("alpha")
        if not isinstance(alpha, list) or len(alpha) != fb.dim:
            raise StructuralError(f"multi-index must have length {fb.dim}")
        key = tuple(alpha)
        c = parse_scalar(entry.get("c", "1"))
        coeffs[key] = coeffs[key] + c if key in coeffs else c
    return UElement(fb, coeffs)


_straighten_memos: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _alpha_of_word(word: bytes, m: int) -> MultiIndex:
    alpha = [0] * m
    for i in word:
        alpha[i] += 1
    return tuple(alpha)


def _word_of_alpha(alpha: MultiIndex) -> bytes:
    return bytes(i for i, a in enumerate(alpha) for _ in range(a))


def _straighten(fb: FBasis, word: bytes) -> dict:
    """Normal form of a generator word: rewrite the leftmost out-of-order
    adjacent pair e_j e_i (j > i) as e_i e_j + [e_j, e_i] until sorted.
    Each swap lowers the inversion count at fixed length and the bracket
    correction shortens the word, so this terminates. Memoized per basis."""
    memo = _straighten_memos.get(fb)
    if memo is None:
        memo = _straighten_memos.setdefault(fb, {})
    hit = memo.get(word)
    if hit is not None:
        return hit
    pos = -1
    for p in range(len(word) - 1):
        if word[p] > word[p + 1]:
            pos = p
            break
    if pos < 0:
        out = {_alpha_of_word(word, fb.dim): ONE}
        memo[word] = out
        return out
    j, i = word[pos], word[pos + 1]
    swapped = word[:pos] + bytes((i, j)) + word[pos + 2 :]
    out = dict(_straighten(fb, swapped))
    br = fb.bracket_adapted(fb.basis_coords(j), fb.basis_coords(i))
    for k, c in enumerate(br):
        if not c:
            continue
        shorter = word[:pos] + bytes((k,)) + word[pos + 2 :]
        for alpha, cc in _straighten(fb, shorter).items():
            add = c * cc
            out[alpha] = out[alpha] + add if alpha in out else add
    out = {a: c for a, c in out.items() if c}
    memo[word] = out
    return out


def pbw_mul(x: UElement, y: UElement) -> UElement:
    """Exact product in the enveloping algebra."""
    x._check(y)
    fb = x.fb
    out: dict = {}
    for alpha, ca in x.coeffs.items():
        wa = _word_of_alpha(alpha)
        for beta, cb in y.coeffs.items():
            c = ca * cb
            for gamma, cg in _straighten(fb, wa + _word_of_alpha(beta)).items():
                add = c * cg
                out[gamma] = out[gamma] + add if gamma in out else add
    return UElement(fb, out)


def u_power(fb: FBasis, i: int, n: int) -> UElement:
    """e_i^n; a single ordered monomial, no straightening needed."""
    if n < 0:
        raise StructuralError("power must be nonnegative")
    alpha = tuple(n if t == i else 0 for t in range(fb.dim))
    return UElement(fb, {alpha: ONE})


# -- weight sequences and prenorms -----------------------------------------


@dataclass(frozen=True)
class WeightSequence:
    """Per-weight positive values M_w with M_0 = 1.

    kind "standard" is w^-w; kind "table" reads explicit rational values
    with a fill value for weights past the table."""

    kind: str
    table: tuple[tuple[int, mpq], ...] = ()
    fill: mpq = Q1

    @classmethod
    def standard(cls) -> "WeightSequence":
        return cls("standard")

    @classmethod
    def from_table(cls, values: dict, fill=1) -> "WeightSequence":
        rows = []
        for w, v in sorted(values.items()):
            wi = int(w)
            q = rat(v)
            if wi < 0 or q <= 0:
                raise StructuralError("table rows need weight >= 0 and value > 0")
            rows.append((wi, q))
        f = rat(fill)
        if f <= 0:
            raise StructuralError("fill value must be positive")
        return cls("table", tuple(rows), f)

    def at(self, w: int) -> mpq:
        if w < 0:
            raise StructuralError("weights are nonnegative")
        if w == 0:
            return Q1
        if self.kind == "standard":
            return mpq(1, mpz(w) ** w)
        for wi, v in self.table:
            if wi == w:
                return v
        return self.fill

    @property
    def is_standard(self) -> bool:
        return self.kind == "standard"

    def to_json(self) -> dict:
        if self.is_standard:
            return {"kind": "standard"}
        return {
            "kind": "table",
            "table": {str(w): rat_str(v) for w, v in self.table},
            "fill": rat_str(self.fill),
        }


@dataclass(frozen=True)
class PrenormParams:
    r: mpq
    M: WeightSequence
    precision: int = 128

    def __post_init__(self):
        object.__setattr__(self, "r", rat(self.r))
        if self.r <= 0:
            raise StructuralError("norm radius r must be positive")
        if self.precision < 64:
            raise StructuralError("precision must be at least 64 bits")


def _alpha_factorial(alpha: MultiIndex) -> mpz:
    out = mpz(1)
    for a in alpha:
        if a > 1:
            out *= factorial(a)
    return out


def prenorm(x: UElement, p: PrenormParams) -> Iv:
    """sum over support of |c_alpha| alpha! M_w(alpha) r^w(alpha).

    Exact (point interval) for real coefficients; complex moduli bring in a
    certified square root at the working precision."""
    fb = x.fb
    exact = Q0
    ivpart = None
    for alpha, c in x.coeffs.items():
        w = weight_of(fb, alpha)
        base = _alpha_factorial(alpha) * p.M.at(w) * p.r**w
        if c.is_real:
            exact += abs(c.re) * base
        else:
            term = sqrt_iv(c.abs_sq(), p.precision) * base
            ivpart = term if ivpart is None else ivpart + term
    out = Iv(exact)
    if ivpart is not None:
        out = out + ivpart
    return out


def power_norm_closed_form(fb: FBasis, i: int, n: int, r) -> mpq:
    """n! (r / (n w_i))^(n w_i), the exact prenorm of e_i^n."""
    if not 0 <= i < fb.dim:
        raise StructuralError(f"generator index {i} out of range")
    if n < 1:
        raise StructuralError("power must be at least 1")
    rq = rat(r)
    if rq <= 0:
        raise StructuralError("norm radius r must be positive")
    nw = n * fb.weights[i]
    return factorial(n) * (rq / nw) ** nw


# -- decay profile ---------------------------------------------------------


@dataclass(frozen=True)
class DecayProfile:
    generator: int  # 0-based
    r: mpq
    rows: tuple  # (n, norm mpq, normalized Iv)
    head_max: Iv
    bounded: bool

    def to_json(self) -> dict:
        return {
            "generator": self.generator + 1,
            "r": rat_str(self.r),
            "bounded": self.bounded,
            "head_max": decimal_str(self.head_max),
            "rows": [
                {
                    "n": n,
                    "norm": rat_str(norm),
                    "normalized": decimal_str(nv),
                }
                for n, norm, nv in self.rows
            ],
        }


def decay_profile(
    fb: FBasis, i: int, r, n_max: int, precision: int = 128
) -> DecayProfile:
    """Normalized power-norm sequence norm(e_i^n)^(1/n) * n^(w_i - 1).

    The bounded flag certifies that every entry past n = 10 stays at or
    under the head maximum over n <= 10; comparisons are pessimistic on
    the interval ends."""
    if n_max < 10:
        raise StructuralError("n_max must be at least 10")
    w = fb.weights[i] if 0 <= i < fb.dim else None
    if w is None:
        raise StructuralError(f"generator index {i} out of range")
    rq = rat(r)
    rows = []
    head = []
    bounded = True
    head_max = None
    for n in range(1, n_max + 1):
        norm = power_norm_closed_form(fb, i, n, rq)
        scaled = nth_root(norm, n, precision) * mpq(n) ** (w - 1)
        rows.append((n, norm, scaled))
        if n <= 10:
            head.append(scaled)
            if n == 10:
                head_max = iv_max(*head)
        elif scaled.hi > head_max.lo:
            bounded = False
    return DecayProfile(i, rq, tuple(rows), head_max, bounded)


# -- the weight axiom ------------------------------------------------------


def weight_axiom_check(
    M: WeightSequence, fb: FBasis, w_bound: int
) -> ValidationReport:
    """M_c <= M_a M_b for all weight values a + b <= c <= w_bound.

    For the standard sequence this is the exact big-integer comparison
    a^a b^b <= c^c; table sequences compare the stored rationals directly.
    """
    if not 1 <= w_bound <= 60:
        raise StructuralError("w_bound must lie in 1..60")
    violations = []
    for c in range(2, w_bound + 1):
        for a in range(1, c):
            for b in range(1, c - a + 1):
                if M.is_standard:
                    ok = mpz(a) ** a * mpz(b) ** b <= mpz(c) ** c
                else:
                    ok = M.at(c) <= M.at(a) * M.at(b)
                if not ok:
                    violations.append(
                        {
                            "kind": "weight_axiom",
                            "a": a,
                            "b": b,
                            "c": c,
                            "detail": "M_c > M_a * M_b",
                        }
                    )
    return ValidationReport(dim=fb.dim, violations=violations)


# -- entireness ------------------------------------------------------------


def dp_counts(weights, w_max: int) -> list:
    """Number of multi-indices of each total weight 0..w_max."""
    ways = [0] * (w_max + 1)
    ways[0] = 1
    for wi in weights:
        for w in range(wi, w_max + 1):
            ways[w] += ways[w - wi]
    return ways


def _count_bound(m: int, w: int) -> mpz:
    # every entry of a weight-w multi-index is at most w
    return mpz(w + 1) ** m


def _tail_budget(m: int, r: mpq, W: int) -> mpq:
    """Upper bound on the series tail past weight W, valid once W is at
    least max(4r, 2m): term(w) <= (w+1)^m (r/w)^w and the ratio of that
    bound between consecutive weights is under one half from there on."""
    return 2 * _count_bound(m, W + 1) * (r / (W + 1)) ** (W + 1)


def _series_cutoff(m: int, r: mpq) -> int:
    four_r = int(-((-4 * r.numerator) // r.denominator))
    return max(four_r, 2 * m, 1)


@dataclass(frozen=True)
class EntiretyReport:
    w_bound: int
    condition1: tuple
    condition2: tuple

    @property
    def all_certified(self) -> bool:
        return all(e["status"] == "certified" for e in self.condition1)

    def to_json(self) -> dict:
        return {
            "w_bound": self.w_bound,
            "condition1": list(self.condition1),
            "condition2": list(self.condition2),
        }


def entire_check(
    M: WeightSequence,
    fb: FBasis,
    r_list,
    A_list,
    w_bound: int,
    precision: int = 128,
) -> EntiretyReport:
    """Probe the two entireness conditions.

    Condition 1 per r: sum the series grouped by weight with exact counts.
    For the standard sequence the tail past max(4r, 2 dim) is certified
    geometric; if that cutoff exceeds w_bound, or the sequence is
    table-backed, no certificate is claimed. Observably growing terms are
    flagged uncertifiable.

    Condition 2 per A: the supremum of A^(a/b) M_b^(1/b) / M_a^(1/a) over
    the probed weight grid, with a coarse trend marker. Evidence only; the
    condition quantifies over all weights.
    """
    if w_bound < 2:
        raise StructuralError("w_bound must be at least 2")
    m = fb.dim
    counts = dp_counts(fb.weights, w_bound)
    cond1 = []
    for r in r_list:
        rq = rat(r)
        if rq <= 0:
            raise StructuralError("series radius must be positive")
        cutoff = _series_cutoff(m, rq) if M.is_standard else None
        if M.is_standard and cutoff <= w_bound:
            total = Iv(Q1)  # weight-0 term
            for w in range(1, cutoff + 1):
                term = counts[w] * M.at(w) * rq**w
                total = round_iv(total + Iv(term), precision + 64)
            tail = _tail_budget(m, rq, cutoff)
            value = Iv(total.lo, total.hi + tail)
            cond1.append(
                {
                    "r": rat_str(rq),
                    "status": "certified",
                    "cutoff": cutoff,
                    "value": _dec(value),
                    "tail_bound": _dec(tail),
                }
            )
            continue
        terms = [counts[w] * M.at(w) * rq**w for w in range(1, w_bound + 1)]
        partial = Q1 + sum(terms, Q0)
        # growing terms condemn a table-backed sequence (past the table the
        # fill value drives them); for the standard rule a growing prefix is
        # a transient and the only honest verdict short of the certified
        # cutoff is inconclusive
        growing = (
            not M.is_standard
            and len(terms) >= 2
            and terms[-1] > terms[max(0, len(terms) - 6)]
            and terms[-1] > terms[0]
        )
        cond1.append(
            {
                "r": rat_str(rq),
                "status": "uncertifiable" if growing else "inconclusive",
                "cutoff": None,
                "value": _dec(partial),
                "tail_bound": None,
            }
        )
    cond2 = []
    half = max(2, w_bound // 2)
    mroot = [None] + [nth_root(M.at(w), w, precision) for w in range(1, w_bound + 1)]
    for A in A_list:
        aq = rat(A)
        if aq <= 0:
            raise StructuralError("sup-condition scale must be positive")
        aroot = [None] + [nth_root(aq, b, precision) for b in range(1, w_bound + 1)]
        sup = None
        sup_half = None
        for a in range(1, w_bound + 1):
            for b in range(1, w_bound + 1):
                v = pow_int(aroot[b], a) * mroot[b] / mroot[a]
                if sup is None or v.hi > sup.hi:
                    sup = v
                if a <= half and (sup_half is None or v.hi > sup_half.hi):
                    sup_half = v
        trend = "increasing" if sup.hi > sup_half.hi * (1 + mpq(1, 16)) else "stable"
        cond2.append({"A": rat_str(aq), "sup": _dec(sup), "trend": trend})
    return EntiretyReport(w_bound, tuple(cond1), tuple(cond2))


def _dec(x) -> str:
    return decimal_str(x)


# -- growth function -------------------------------------------------------


def growth_function(fb: FBasis, g, tol, precision: int = 128) -> Iv:
    """Certified value of the weight-grouped series sum_w count(w) M1_w s^w
    at s = sigma(g), truncated once the tail budget drops below tol."""
    tq = rat(tol)
    if tq <= 0:
        raise StructuralError("tolerance must be positive")
    s = sigma(fb, g, precision)
    if not s:
        return Iv(Q1)
    m = fb.dim
    s_hi = s.hi
    W = _series_cutoff(m, s_hi)
    while _tail_budget(m, s_hi, W) >= tq:
        W += 1
    counts = dp_counts(fb.weights, W)
    total = Iv(Q1)
    M = WeightSequence.standard()
    for w in range(1, W + 1):
        term = pow_int(s, w) * (counts[w] * M.at(w))
        total = round_iv(total + term, precision + 64)
    tail = _tail_budget(m, s_hi, W)
    return Iv(total.lo, total.hi + tail)


# -- multiplication continuity probe ---------------------------------------


def mul_continuity_probe(
    fb: FBasis,
    M: WeightSequence,
    r,
    n_samples: int = 20,
    seed: int = 0,
    precision: int = 128,
) -> dict:
    """Observed max of norm(x y, r) / (norm(x, 2r) norm(y, 2r)) on random
    small elements. Reported as evidence; nothing is asserted."""
    rq = rat(r)
    pr = PrenormParams(rq, M, precision)
    pr2 = PrenormParams(2 * rq, M, precision)
    gen = substream(seed, SUB_UPROBE)

    def draw() -> UElement:
        coeffs: dict = {}
        for _ in range(2):
            alpha = [0] * fb.dim
            for _ in range(2):
                alpha[int(gen.integers(0, fb.dim))] += int(gen.integers(0, 2))
            key = tuple(alpha)
            c = Scalar(rand_q(gen))
            coeffs[key] = coeffs[key] + c if key in coeffs else c
        x = UElement(fb, coeffs)
        return x if x else u_one(fb)

    worst = None
    for _ in range(n_samples):
        x, y = draw(), draw()
        num = prenorm(pbw_mul(x, y), pr)
        den = prenorm(x, pr2) * prenorm(y, pr2)
        if den.lo <= 0:
            continue
        ratio = num / den
        if worst is None or ratio.hi > worst.hi:
            worst = ratio
    return {
        "r": rat_str(rq),
        "r_prime": rat_str(2 * rq),
        "samples": n_samples,
        "max_ratio": _dec(worst if worst is not None else Iv(Q0)),
    }
