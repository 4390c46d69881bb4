"""Homogeneous norms, dilations, and word-length geometry on the group side.

Everything here works in adapted coordinates. Exact inputs stay exact as long
as the arithmetic allows (argmax comparisons, commutator schemes, envelope
fits); roots and exponentials move to certified intervals.
"""

from dataclasses import dataclass
from itertools import product
from math import lcm

from gmpy2 import mpq, mpz

from .algebra import FBasis, ValidationReport
from .errors import (
    InfeasibleSchemeError,
    PrecisionExhaustedError,
    SearchExhaustedError,
    StructuralError,
)
from .group import (
    GroupElement,
    bch,
    dynkin_table_full,
    exp_of_word,
    first_to_second,
    group_inv,
    merge_letters,
)
from .intervals import (
    Iv,
    decimal_str,
    e_iv,
    exp_iv,
    iv_max,
    nth_root,
    pow_int,
    root_of_pow,
    sqrt_iv,
)
from .linalg import solve_combination, vec_is_zero
from .sampling import (
    count_violations,
    fit_envelope,
    sample_box_coords,
    sample_l1_letter,
    substream,
)
from .scalars import ONE, Q0, Q1, Scalar, parse_scalar, rat, rat_str

# substream indices, one per consumer so seeds never collide across checks
SUB_TRAIN = 1
SUB_TEST = 2
SUB_BALL = 3
SUB_MAXSEARCH = 4
SUB_TARGETS = 5


# -- homogeneous norms -----------------------------------------------------


def _mod_sq(v) -> mpq:
    if isinstance(v, Scalar):
        return v.abs_sq()
    q = rat(v)
    return q * q


def _mod_iv(v, precision: int) -> Iv:
    if isinstance(v, Iv):
        return abs(v)
    if isinstance(v, Scalar):
        if v.is_real:
            return Iv(abs(v.re))
        return sqrt_iv(v.abs_sq(), precision)
    return Iv(abs(rat(v)))


def _sigma_of_coords(fb: FBasis, coords, precision: int) -> Iv:
    if len(coords) != fb.dim:
        raise StructuralError(f"expected {fb.dim} coordinates, got {len(coords)}")
    if any(isinstance(c, Iv) for c in coords):
        parts = []
        for c, w in zip(coords, fb.weights):
            m = _mod_iv(c, precision)
            if not m:
                continue
            parts.append(nth_root(m, w, precision) if w > 1 else m)
        return iv_max(*parts) if parts else Iv(Q0)
    # exact path: pick the winning coordinate by cross-powering pairs of
    # squared moduli, then take a single certified root
    best = -1
    best_q = None
    for i, w in enumerate(fb.weights):
        q = _mod_sq(coords[i])
        if not q:
            continue
        if best_q is None:
            best, best_q = i, q
            continue
        wb = fb.weights[best]
        common = lcm(2 * w, 2 * wb)
        if q ** (common // (2 * w)) > best_q ** (common // (2 * wb)):
            best, best_q = i, q
    if best_q is None:
        return Iv(Q0)
    return root_of_pow(best_q, 1, 2 * fb.weights[best], precision)


def sigma(fb: FBasis, t, precision: int = 128) -> Iv:
    """max_i |t_i|^(1/w_i) over first-kind coordinates, as a certified
    enclosure (a point interval when the winning root is exact)."""
    coords = t.coords if isinstance(t, GroupElement) else t
    return _sigma_of_coords(fb, coords, precision)


def sigma_bar(fb: FBasis, t, precision: int = 128) -> Iv:
    """Same maximum taken over second-kind coordinates."""
    coords = t.coords if isinstance(t, GroupElement) else t
    return _sigma_of_coords(fb, first_to_second(fb, coords), precision)


# -- dilations -------------------------------------------------------------


def _pow_z(z, n: int):
    if isinstance(z, Iv):
        return pow_int(z, n)
    if isinstance(z, Scalar):
        out = ONE
        for _ in range(n):
            out = out * z
        return out
    return rat(z) ** n


@dataclass(frozen=True)
class Dilation:
    """The grading automorphism t_i -> z^(w_i) t_i."""

    fb: FBasis
    z: object

    def apply(self, t):
        coords = t.coords if isinstance(t, GroupElement) else t
        if len(coords) != self.fb.dim:
            raise StructuralError("coordinate length mismatch")
        return tuple(
            c * _pow_z(self.z, w) for c, w in zip(coords, self.fb.weights)
        )

    def compose(self, other: "Dilation") -> "Dilation":
        if other.fb is not self.fb:
            raise StructuralError("dilations live over the same basis")
        return Dilation(self.fb, self.z * other.z)


def dilate(fb: FBasis, t, z):
    return Dilation(fb, z).apply(t)


# -- sub-polynomial product estimate ---------------------------------------


@dataclass(frozen=True)
class EquivalenceReport:
    """Fitted domination line y <= C x + D for one comparison, with the
    holdout violation count that decides acceptance."""

    comparison: str
    C: mpq
    D: mpq
    train_n: int
    test_n: int
    violations: int
    seed: int

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "comparison": self.comparison,
            "C": rat_str(self.C),
            "D": rat_str(self.D),
            "train_n": self.train_n,
            "test_n": self.test_n,
            "violations": self.violations,
            "seed": self.seed,
        }


def subpoly_estimate(
    fb: FBasis,
    n_train: int = 10_000,
    n_test: int = 10_000,
    sigma_max=100,
    seed: int = 0,
    precision: int = 128,
) -> EquivalenceReport:
    """Fit (C, D) with sigma(g h) <= C max(sigma(g), sigma(h)) + D on random
    pairs, then count violations on a fresh holdout stream."""
    smax = rat(sigma_max)

    def points(gen, n):
        pts = []
        for _ in range(n):
            t1 = sample_box_coords(fb, gen, smax)
            t2 = sample_box_coords(fb, gen, smax)
            x = iv_max(sigma(fb, t1, precision), sigma(fb, t2, precision))
            y = sigma(fb, bch(fb, t1, t2), precision)
            pts.append((x, y))
        return pts

    C, D = fit_envelope(points(substream(seed, SUB_TRAIN), n_train))
    bad = count_violations(points(substream(seed, SUB_TEST), n_test), C, D)
    return EquivalenceReport("product-vs-factor-max", C, D, n_train, n_test, bad, seed)


# -- commutator schemes and word factorization -----------------------------


def _nested_bracket(fb: FBasis, idxs):
    """Right-nested bracket of basis vectors, [e_a, [e_b, ... ]]."""
    vec = fb.basis_coords(idxs[-1])
    for g in reversed(idxs[:-1]):
        vec = fb.bracket_adapted(fb.basis_coords(g), vec)
    return vec


def signed_commutator_word(word, s, sign: int = 1):
    """Letters of the iterated group commutator whose product is
    exp(sign * s^len(word) * E_word) up to strictly higher-weight error.

    Only the outermost generator carries the sign, which flips the whole
    bracket by bilinearity."""
    g = word[0]
    if len(word) == 1:
        return [(g, sign * s)]
    inner = signed_commutator_word(word[1:], s, 1)
    out = [(g, sign * s)]
    out.extend(inner)
    out.append((g, (-sign) * s))
    out.extend((i, -v) for i, v in reversed(inner))
    return out


@dataclass(frozen=True)
class SchemeTerm:
    word: tuple[int, ...]  # weight-one generator indices, outermost first
    mu: mpq
    pattern: tuple[tuple[int, int], ...]  # commutator letters at unit parameter

    def to_json(self) -> dict:
        return {
            "word": [i + 1 for i in self.word],
            "mu": rat_str(self.mu),
            "pattern": [[i + 1, s] for i, s in self.pattern],
        }


@dataclass(frozen=True)
class CommutatorScheme:
    """Per higher-weight generator: an exact combination of right-nested
    brackets of weight-one basis vectors, plus the group-word pattern that
    realizes each bracket."""

    fb: FBasis
    terms: dict[int, tuple[SchemeTerm, ...]]

    def to_json(self) -> dict:
        return {
            str(p + 1): [t.to_json() for t in tt]
            for p, tt in sorted(self.terms.items())
        }


def build_commutator_scheme(fb: FBasis) -> CommutatorScheme:
    """Solve, for every generator of weight j >= 2, an exact representation
    through brackets of weight-one generators of lengths j..depth.

    Works over any adapted basis; a filtration whose weight-one layer fails
    to bracket-generate the rest raises InfeasibleSchemeError."""
    gens = fb.weight_one_indices()
    k = fb.depth
    terms: dict[int, tuple[SchemeTerm, ...]] = {}
    if k == 1:
        return CommutatorScheme(fb, terms)
    cols_by_len: dict[int, list] = {}
    for length in range(2, k + 1):
        got = []
        for word in product(gens, repeat=length):
            vec = _nested_bracket(fb, word)
            if not vec_is_zero(vec):
                got.append((word, vec))
        cols_by_len[length] = got
    for p, w in enumerate(fb.weights):
        if w == 1:
            continue
        cand = []
        for length in range(w, k + 1):
            cand.extend(cols_by_len[length])
        sol = solve_combination([vec for _, vec in cand], fb.basis_coords(p))
        if sol is None:
            raise InfeasibleSchemeError(
                f"generator {p + 1} (weight {w}) is outside the span of "
                f"weight-one bracket words of lengths {w}..{k}"
            )
        found = []
        for (word, _), mu in zip(cand, sol):
            if not mu:
                continue
            if isinstance(mu, Scalar):
                if not mu.is_real:
                    raise StructuralError(
                        "scheme coefficients must be real for word expansion"
                    )
                mu = mu.re
            found.append(
                SchemeTerm(word, mu, tuple(signed_commutator_word(word, 1, 1)))
            )
        terms[p] = tuple(found)
    return CommutatorScheme(fb, terms)


def scheme_base_length(scheme: CommutatorScheme) -> int:
    """Upper bound on the factorized word length when no letter splits
    (every parameter magnitude at most one): one letter per weight-one
    coordinate plus each template's full letter pattern. Merging only
    shortens words, so the no-split plateau never exceeds this."""
    total = len(scheme.fb.weight_one_indices())
    for tt in scheme.terms.values():
        total += sum(len(t.pattern) for t in tt)
    return total


def _require_rat(v) -> mpq:
    if isinstance(v, Scalar):
        if not v.is_real:
            raise StructuralError("factorization targets must have real coordinates")
        return v.re
    return rat(v)


def _negligible(v, threshold: mpq) -> bool:
    if isinstance(v, Iv):
        m = abs(v)
        return m.hi < threshold
    return not v


def _sign_abs(v):
    if isinstance(v, Iv):
        return (1 if v.mid >= 0 else -1), abs(v)
    return (1 if v > 0 else -1), abs(v)


def _root_param(mag, length: int, precision: int):
    if length == 1:
        return mag
    r = nth_root(mag, length, precision)
    if r.is_point():
        return r.lo
    return r


def _level_letters(scheme: CommutatorScheme, remaining, j: int, precision: int):
    fb = scheme.fb
    threshold = mpq(1, mpz(1) << (precision // 2))
    seg = []
    for p in fb.indices_by_weight.get(j, ()):
        c = remaining[p]
        if _negligible(c, threshold):
            continue
        if j == 1:
            seg.append((p, c))
            continue
        for term in scheme.terms[p]:
            target = c * term.mu
            if _negligible(target, threshold):
                continue
            sign, mag = _sign_abs(target)
            s = _root_param(mag, len(term.word), precision)
            seg.extend(signed_commutator_word(term.word, s, sign))
    return seg


def _ceil_of(v) -> int:
    if isinstance(v, Iv):
        q = v.hi
    else:
        q = v
    return int(-((-q.numerator) // q.denominator))


def _split_letters(word):
    out = []
    for i, s in word:
        m = abs(s)
        hi = m.hi if isinstance(m, Iv) else m
        if hi <= 1:
            out.append((i, s))
            continue
        n = _ceil_of(m)
        piece = s / n
        out.extend((i, piece) for _ in range(n))
    return out


def _coords_radius(coords) -> mpq:
    worst = Q0
    for c in coords:
        if isinstance(c, Iv):
            m = max(abs(c.lo), abs(c.hi))
        elif isinstance(c, Scalar):
            m = abs(c.re) + abs(c.im)
        else:
            m = abs(rat(c))
        if m > worst:
            worst = m
    return worst


def word_factorize(g, scheme: CommutatorScheme, precision: int = 256, tol=None):
    """Write g as a product of one-generator letters with |parameter| <= 1.

    Peels the target level by level: weight-one coordinates become letters
    directly, higher generators expand through the scheme with parameter
    magnitude |coefficient|^(1/length), and the exact value of each level's
    segment is divided back out so its higher-weight error is consumed by
    the next level. Oversized letters split into unit-bounded pieces at the
    end; splitting commutes, so the product is unchanged.

    Returns (word, certificate); the certificate re-evaluates the final word
    against the target. Rational-root paths come out exact. If tol is given
    and the certified residual exceeds it, raises with a suggested retry
    precision.
    """
    fb = scheme.fb
    coords = g.coords if isinstance(g, GroupElement) else tuple(g)
    if len(coords) != fb.dim:
        raise StructuralError("coordinate length mismatch")
    target = tuple(_require_rat(c) for c in coords)
    remaining = target
    word = []
    for j in range(1, fb.depth + 1):
        seg = _level_letters(scheme, remaining, j, precision)
        if not seg:
            continue
        val, _ = exp_of_word(fb, seg, precision)
        remaining = bch(fb, group_inv(val), remaining)
        word.extend(seg)
    word = _split_letters(merge_letters(word))
    val, _ = exp_of_word(fb, word, precision)
    residual = bch(fb, group_inv(val), target)
    radius = _coords_radius(residual)
    certificate = {
        "length": len(word),
        "residual_radius": decimal_str(radius),
        "precision_bits": precision,
    }
    if tol is not None and radius > rat(tol):
        raise PrecisionExhaustedError(
            f"residual radius {decimal_str(radius, 8)} exceeds tolerance",
            suggested_bits=2 * precision,
        )
    return word, certificate


# -- the adapted norm and the ball bound -----------------------------------


def corcbh_c_target(fb: FBasis) -> mpq:
    """Budget constant for absorbing one letter into a graded product.

    Splitting exp(X) off leaves a bch series over bracket words mixing X
    with the product's layer components; each table word contributes its
    coefficient once per choice of layer in every non-X slot. The reciprocal
    of that weighted sum is the largest bracket constant the norm search may
    certify while keeping the absorbed total under control. Words without X
    cancel among themselves and words ending in [X, X] vanish outright, so
    both are excluded. Bracket depth 1 has no such words; the budget is 1.
    """
    k = fb.depth
    total = Q0
    for w, c in dynkin_table_full(k):
        if len(w) < 2 or 0 not in w:
            continue
        if w[-1] == 0 and w[-2] == 0:
            continue
        ones = sum(1 for b in w if b)
        total += abs(c) * mpq(k) ** ones
    if not total:
        return Q1
    return Q1 / total


def _mod1(v) -> mpq:
    # exact modulus surrogate: |re| + |im| on complex scalars keeps every
    # comparison rational while staying a genuine norm
    if isinstance(v, Scalar):
        return abs(v.re) + abs(v.im)
    if isinstance(v, Iv):
        raise StructuralError("exact coordinates required here")
    return abs(rat(v))


@dataclass(frozen=True)
class NormSpec:
    """Layer-weighted l1 norm on the algebra: sum_s c_s * l1(layer s).

    Property (1), that each layer component is bounded by the whole, is
    automatic for such sums. Property (2), the bracket bound with constant C,
    is certified exactly on basis instances and extends by multilinearity.
    """

    fb: FBasis
    scalings: tuple[tuple[int, mpq], ...]
    C: mpq
    achieved: mpq

    def scaling(self, s: int) -> mpq:
        for w, c in self.scalings:
            if w == s:
                return c
        raise StructuralError(f"no layer of weight {s}")

    def layer_value(self, coords, s: int) -> mpq:
        c = self.scaling(s)
        return c * sum(
            (_mod1(coords[i]) for i in self.fb.indices_by_weight.get(s, ())), Q0
        )

    def value(self, coords) -> mpq:
        return sum((self.layer_value(coords, s) for s, _ in self.scalings), Q0)

    def to_json(self) -> dict:
        return {
            "scalings": {str(s): rat_str(c) for s, c in self.scalings},
            "C": rat_str(self.C),
            "achieved": rat_str(self.achieved),
        }


def _bracket_instances(fb: FBasis):
    """All (layer composition, per-level l1 of the bracket) pairs over basis
    tuples. Compositions with at least two parts and total weight <= depth;
    everything deeper vanishes."""
    k = fb.depth
    by_w = fb.indices_by_weight
    out = []
    for p in range(2, k + 1):
        for u in product(range(1, k), repeat=p):
            if sum(u) > k:
                continue
            layers = [by_w.get(s, ()) for s in u]
            if any(not lay for lay in layers):
                continue
            for tup in product(*layers):
                vec = _nested_bracket(fb, tup)
                lhs = {}
                for s, idxs in by_w.items():
                    v = sum((_mod1(vec[i]) for i in idxs), Q0)
                    if v:
                        lhs[s] = v
                if lhs:
                    out.append((u, lhs))
    return out


def adapted_norm(fb: FBasis, c_target=None, q_max: int = 64) -> NormSpec:
    """Search layer scalings making every nested bracket of unit basis
    vectors C-bounded by the product of its argument norms.

    The weight-one scaling is 1. Going up, each level's scaling is the
    largest power of two meeting its share of the budget: a bracket of
    composition weight W gets allowance C * prod(scalings) * 2^-(j - W + 1)
    at level j, and the shares telescope to at most the full budget. All
    comparisons are exact; the certified worst ratio is re-verified at the
    end and returned as the achieved constant.
    """
    C = rat(c_target) if c_target is not None else corcbh_c_target(fb)
    if C <= 0:
        raise StructuralError("bracket budget must be positive")
    k = fb.depth
    insts = _bracket_instances(fb)
    scal = {1: Q1}
    for j in range(2, k + 1):
        checks = []
        for u, lhs in insts:
            W = sum(u)
            if W > j or j not in lhs:
                continue
            rhs = C * mpq(1, mpz(1) << (j - W + 1))
            for s in u:
                rhs = rhs * scal[s]
            checks.append((lhs[j], rhs))
        c = Q1
        q = 0
        while any(c * lv > rv for lv, rv in checks):
            q += 1
            if q > q_max:
                best = max(c * lv / rv for lv, rv in checks)
                raise SearchExhaustedError(
                    f"no power-of-two scaling for layer {j} within 2^-{q_max}",
                    best=best * C,
                )
            c = mpq(1, mpz(1) << q)
        scal[j] = c
    achieved = Q0
    for u, lhs in insts:
        full = sum((scal[s] * v for s, v in lhs.items()), Q0)
        denom = Q1
        for s in u:
            denom = denom * scal[s]
        ratio = full / denom
        if ratio > achieved:
            achieved = ratio
    if achieved > C:
        raise SearchExhaustedError(
            "telescoped shares failed to certify the budget", best=achieved
        )
    return NormSpec(fb, tuple(sorted(scal.items())), C, achieved)


def ball_bound_check(
    spec: NormSpec, n_words: int = 500, max_len: int = 40, seed: int = 0
) -> ValidationReport:
    """Random products of norm-bounded weight-one letters: a product of n
    letters must keep layer j within n^j under the given NormSpec, exactly."""
    fb = spec.fb
    gen = substream(seed, SUB_BALL)
    c1 = spec.scaling(1)
    violations = []
    for idx in range(n_words):
        n = (idx % max_len) + 1
        prod_coords = None
        for _ in range(n):
            letter = sample_l1_letter(fb, gen)
            if c1 > 1:
                letter = tuple(v / c1 for v in letter)
            prod_coords = (
                letter if prod_coords is None else bch(fb, letter, prod_coords)
            )
        for s, _ in spec.scalings:
            lv = spec.layer_value(prod_coords, s)
            bound = mpq(n) ** s
            if lv > bound:
                violations.append(
                    {
                        "kind": "ball_bound",
                        "word_index": idx,
                        "length": n,
                        "layer": s,
                        "norm": rat_str(lv),
                        "bound": rat_str(bound),
                    }
                )
    return ValidationReport(dim=fb.dim, violations=violations)


# -- exponential-type function norms ---------------------------------------


def poly_from_json(doc: dict, dim: int) -> dict:
    """{"terms": [{"d": [...], "c": "coeff"}]} -> exponent map."""
    if not isinstance(doc, dict) or "terms" not in doc:
        raise StructuralError('polynomial JSON needs a "terms" list')
    out: dict = {}
    for entry in doc["terms"]:
        d = entry.get("d")
        if not isinstance(d, list) or len(d) != dim:
            raise StructuralError(f"exponent list must have length {dim}")
        if any((not isinstance(x, int)) or x < 0 for x in d):
            raise StructuralError("exponents must be nonnegative integers")
        key = tuple(d)
        c = parse_scalar(entry.get("c", "1"))
        out[key] = out[key] + c if key in out else c
    return {d: c for d, c in out.items() if c}


def _poly_value(terms: dict, t) -> Scalar:
    acc = None
    for d, c in sorted(terms.items()):
        mono = Q1
        for ti, di in zip(t, d):
            for _ in range(di):
                mono = mono * ti
        contrib = c * mono
        acc = contrib if acc is None else acc + contrib
    if acc is None:
        return Scalar(Q0)
    return acc if isinstance(acc, Scalar) else Scalar(acc)


def exp_type_norm(
    fb: FBasis,
    terms: dict,
    r,
    precision: int = 128,
    search_budget: int = 200,
    seed: int = 0,
):
    """Two-sided bracket for sup_t |f(t)| exp(-r sigma(t)).

    Upper: each monomial obeys |t^d| <= sigma^N with N its weighted degree,
    and sup_u u^N e^(-r u) = (N/(r e))^N, summed over terms. Lower: certified
    evaluation at the per-term peak points sigma = N/r, random box samples,
    and a coordinate-wise refine loop under the evaluation budget.
    """
    rq = rat(r)
    if rq <= 0:
        raise StructuralError("exponential rate must be positive")
    clean: dict = {}
    for d, c in terms.items():
        if len(d) != fb.dim:
            raise StructuralError(f"exponent list must have length {fb.dim}")
        if any((not isinstance(x, int)) or x < 0 for x in d):
            raise StructuralError("exponents must be nonnegative integers")
        cs = c if isinstance(c, Scalar) else Scalar(rat(c))
        if cs:
            clean[tuple(d)] = cs
    upper = Iv(Q0)
    weighted_degs = []
    for d, c in sorted(clean.items()):
        n = sum(di * wi for di, wi in zip(d, fb.weights))
        weighted_degs.append((d, n))
        mod = _mod_iv(c, precision)
        if n == 0:
            upper = upper + mod
        else:
            exact = mpq(n) ** n / rq**n
            upper = upper + mod * (exact / pow_int(e_iv(precision), n))

    def evaluate(t) -> Iv:
        val = _poly_value(clean, t)
        mod = _mod_iv(val, precision)
        if not mod:
            return Iv(Q0)
        s = _sigma_of_coords(fb, t, precision)
        return mod * exp_iv(s * (-rq), precision)

    budget = max(int(search_budget), 1)
    zero = tuple(Q0 for _ in range(fb.dim))
    candidates = [zero]
    for d, n in weighted_degs:
        if n == 0:
            continue
        peak = n / rq
        candidates.append(
            tuple(
                peak**w if di else Q0
                for di, w in zip(d, fb.weights)
            )
        )
    best = Iv(Q0)
    best_t = zero
    for t in candidates:
        if budget <= 0:
            break
        budget -= 1
        f = evaluate(t)
        if f.lo > best.lo:
            best, best_t = f, t
    gen = substream(seed, SUB_MAXSEARCH)
    peak_scale = Q1 + 2 * max((n for _, n in weighted_degs), default=0) / rq
    for _ in range(min(32, budget // 4) if budget >= 4 else 0):
        t = sample_box_coords(fb, gen, peak_scale)
        budget -= 1
        f = evaluate(t)
        if f.lo > best.lo:
            best, best_t = f, t
    improved = True
    while improved and budget > 0:
        improved = False
        for i in range(fb.dim):
            base = best_t[i]
            moves = (Q1, -Q1) if not base else (2 * base, base / 2, -base)
            for nv in moves:
                if budget <= 0:
                    break
                t = best_t[:i] + (nv,) + best_t[i + 1 :]
                budget -= 1
                f = evaluate(t)
                if f.lo > best.lo:
                    best, best_t = f, t
                    improved = True
    return best, upper
