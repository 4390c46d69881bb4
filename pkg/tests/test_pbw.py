"""Ordered-monomial arithmetic and the prenorm family.

The straightening oracle here reduces free words by always rewriting the
rightmost out-of-order pair; the library rewrites the leftmost. Both must
land on the same normal form, so agreement checks correctness and
confluence at once."""

import itertools

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from nilalg import (
    Iv,
    PrenormParams,
    Scalar,
    StructuralError,
    WeightSequence,
    decay_profile,
    dp_counts,
    entire_check,
    growth_function,
    mul_continuity_probe,
    pbw_mul,
    power_norm_closed_form,
    prenorm,
    rat,
    u_gen,
    u_monomial,
    u_one,
    u_power,
    u_zero,
    uelement_from_json,
    weight_axiom_check,
)
from nilalg.enveloping import UElement
from nilalg.sampling import rand_q, substream

M1 = WeightSequence.standard()


def mp_of(q) -> mpmath.mpf:
    return mpmath.mpf(int(q.numerator)) / mpmath.mpf(int(q.denominator))


# -- independent straightening oracle --------------------------------------


def _alpha_of_word(dim, word):
    alpha = [0] * dim
    for i in word:
        alpha[i] += 1
    return tuple(alpha)


def straighten_rightmost(fb, word, coeff):
    """Normal form of a free word as {alpha: Scalar}, rewriting the
    rightmost descent e_i e_j -> e_j e_i + [e_i, e_j] until sorted."""
    out = {}
    stack = [(tuple(word), coeff)]
    while stack:
        w, c = stack.pop()
        pos = -1
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                pos = k
        if pos < 0:
            alpha = _alpha_of_word(fb.dim, w)
            out[alpha] = out.get(alpha, Scalar(mpq(0))) + c
            continue
        i, j = w[pos], w[pos + 1]
        stack.append((w[:pos] + (j, i) + w[pos + 2 :], c))
        br = fb.bracket_adapted(fb.basis_coords(i), fb.basis_coords(j))
        for k2, ck in enumerate(br):
            if ck:
                stack.append((w[:pos] + (k2,) + w[pos + 2 :], c * ck))
    return {a: c for a, c in out.items() if c}


def _word_of_alpha(alpha):
    out = []
    for i, a in enumerate(alpha):
        out.extend([i] * a)
    return tuple(out)


def _rand_alpha(fb, gen, max_deg):
    deg = int(gen.integers(1, max_deg + 1))
    alpha = [0] * fb.dim
    for _ in range(deg):
        alpha[int(gen.integers(0, fb.dim))] += 1
    return tuple(alpha)


def test_monomial_products_match_oracle(all_bases):
    gen = substream(23, 0)
    for name, fb in all_bases.items():
        n_pairs = 40 if fb.dim == 3 else 20
        for _ in range(n_pairs):
            a = _rand_alpha(fb, gen, 4)
            b = _rand_alpha(fb, gen, 4)
            got = pbw_mul(u_monomial(fb, a), u_monomial(fb, b)).coeffs
            want = straighten_rightmost(
                fb, _word_of_alpha(a) + _word_of_alpha(b), Scalar(mpq(1))
            )
            assert got == want, (name, a, b)


def test_heisenberg_reordering_anchor(fb_h):
    # e2 e1 = e1 e2 - e3
    got = pbw_mul(u_gen(fb_h, 1), u_gen(fb_h, 0))
    assert got.coeffs == {
        (1, 1, 0): Scalar(mpq(1)),
        (0, 0, 1): Scalar(mpq(-1)),
    }


def test_commutator_identity_all_pairs(fb_f7):
    fb = fb_f7
    for i in range(fb.dim):
        for j in range(fb.dim):
            lhs = pbw_mul(u_gen(fb, i), u_gen(fb, j)) - pbw_mul(
                u_gen(fb, j), u_gen(fb, i)
            )
            br = fb.bracket_adapted(fb.basis_coords(i), fb.basis_coords(j))
            want = u_zero(fb)
            for k, c in enumerate(br):
                if c:
                    want = want + u_gen(fb, k) * c
            assert lhs == want


def test_associativity_on_random_elements(fb_f7):
    gen = substream(24, 0)

    def draw():
        x = u_zero(fb_f7)
        for _ in range(3):
            x = x + u_monomial(fb_f7, _rand_alpha(fb_f7, gen, 3), rand_q(gen))
        return x

    for _ in range(12):
        x, y, z = draw(), draw(), draw()
        assert pbw_mul(pbw_mul(x, y), z) == pbw_mul(x, pbw_mul(y, z))


def test_identity_and_zero(fb_f7):
    x = u_monomial(fb_f7, (1, 0, 2, 0, 0, 0, 0), rat("5/3"))
    assert pbw_mul(u_one(fb_f7), x) == x
    assert pbw_mul(x, u_one(fb_f7)) == x
    assert not pbw_mul(u_zero(fb_f7), x)


def test_support_weight_superadditive(fb_f7):
    from nilalg import weight_of

    gen = substream(25, 0)
    for _ in range(60):
        a = _rand_alpha(fb_f7, gen, 4)
        b = _rand_alpha(fb_f7, gen, 4)
        wa = weight_of(fb_f7, a)
        wb = weight_of(fb_f7, b)
        prod = pbw_mul(u_monomial(fb_f7, a), u_monomial(fb_f7, b))
        for gamma in prod.coeffs:
            assert weight_of(fb_f7, gamma) >= wa + wb


small_q = st.fractions(min_value=-2, max_value=2, max_denominator=8).map(
    lambda f: mpq(f.numerator, f.denominator)
)


@given(small_q, small_q)
@settings(max_examples=40)
def test_product_is_bilinear(c1, c2):
    from nilalg import f_basis, load_algebra

    fb = f_basis(load_algebra("heisenberg3"))
    x = u_monomial(fb, (1, 1, 0), c1) if c1 else u_zero(fb)
    y = u_monomial(fb, (0, 1, 1), c2) if c2 else u_zero(fb)
    z = u_gen(fb, 0)
    assert pbw_mul(x + y, z) == pbw_mul(x, z) + pbw_mul(y, z)
    assert pbw_mul(z, x + y) == pbw_mul(z, x) + pbw_mul(z, y)


def test_uelement_json_round_trip(fb_h):
    x = u_monomial(fb_h, (2, 0, 1), rat("-7/3")) + u_one(fb_h)
    doc = x.to_json()
    assert uelement_from_json(fb_h, doc) == x
    # duplicate alpha entries accumulate
    doc2 = {"terms": [
        {"alpha": [1, 0, 0], "c": "1/2"},
        {"alpha": [1, 0, 0], "c": "1/2"},
    ]}
    assert uelement_from_json(fb_h, doc2) == u_gen(fb_h, 0)


def test_bad_multi_index_rejected(fb_h):
    with pytest.raises(StructuralError):
        u_monomial(fb_h, (1, 0), 1)
    with pytest.raises(StructuralError):
        UElement(fb_h, {(-1, 0, 0): Scalar(mpq(1))})


# -- prenorms --------------------------------------------------------------


def test_prenorm_closed_form_on_powers(all_bases):
    for fb in all_bases.values():
        for r in (mpq(1), mpq(10), mpq(1, 3)):
            p = PrenormParams(r, M1)
            for i in range(fb.dim):
                for n in (1, 2, 5, 11):
                    got = prenorm(u_power(fb, i, n), p)
                    assert got.is_point()
                    assert got.lo == power_norm_closed_form(fb, i, n, r)


def test_closed_form_values_spot(fb_h):
    # weight-2 generator: 1! (r/2)^2 at n=1
    assert power_norm_closed_form(fb_h, 2, 1, mpq(1)) == mpq(1, 4)
    assert power_norm_closed_form(fb_h, 0, 3, mpq(1)) == mpq(6) * mpq(1, 27)
    with mpmath.workdps(40):
        ref = mpmath.factorial(50) * (mpmath.mpf(10) / 100) ** 100
        got = mp_of(power_norm_closed_form(fb_h, 2, 50, mpq(10)))
        assert abs(got - ref) / ref < mpmath.mpf("1e-30")


def test_prenorm_triangle_and_homogeneity(fb_f7):
    gen = substream(26, 0)
    p = PrenormParams(mpq(2), M1)
    for _ in range(25):
        x = u_monomial(fb_f7, _rand_alpha(fb_f7, gen, 3), rand_q(gen))
        y = u_monomial(fb_f7, _rand_alpha(fb_f7, gen, 3), rand_q(gen))
        c = rand_q(gen, -3, 3)
        assert prenorm(x + y, p).hi <= (prenorm(x, p) + prenorm(y, p)).hi
        assert prenorm(x * c, p) == prenorm(x, p) * abs(c)


def test_prenorm_complex_coefficient_enclosure(fb_h):
    # |3+4i| = 5 exactly, so the root collapses to a point
    x = u_monomial(fb_h, (1, 0, 0), Scalar(mpq(3), mpq(4)))
    got = prenorm(x, PrenormParams(mpq(1), M1))
    assert got.contains(mpq(5))
    assert got.width < mpq(1, 2**100)


def test_prenorm_zero_is_zero(fb_h):
    assert prenorm(u_zero(fb_h), PrenormParams(mpq(1), M1)) == Iv(mpq(0))


def test_mul_continuity_probe_reports(fb_h):
    out = mul_continuity_probe(fb_h, M1, mpq(1), n_samples=8, seed=5)
    assert set(out) == {"r", "r_prime", "samples", "max_ratio"}
    assert out["samples"] == 8


# -- decay profile ---------------------------------------------------------


def test_decay_first_row_anchor(fb_h):
    prof = decay_profile(fb_h, 2, mpq(1), 10)
    n, norm, scaled = prof.rows[0]
    assert (n, norm) == (1, mpq(1, 4))
    assert scaled == Iv(mpq(1, 4))


def test_decay_rows_match_mpmath(all_bases):
    with mpmath.workdps(60):
        for fb in all_bases.values():
            for i in (0, fb.dim - 1):
                w = fb.weights[i]
                prof = decay_profile(fb, i, mpq(10), 300)
                for n in (5, 50, 137, 300):
                    _, norm, scaled = prof.rows[n - 1]
                    ref = (
                        mpmath.factorial(n) * (mpmath.mpf(10) / (n * w)) ** (n * w)
                    ) ** (mpmath.mpf(1) / n) * mpmath.mpf(n) ** (w - 1)
                    ref_norm = mpmath.factorial(n) * (
                        mpmath.mpf(10) / (n * w)
                    ) ** (n * w)
                    assert abs(mp_of(norm) - ref_norm) <= abs(ref_norm) * mpmath.mpf(
                        "1e-45"
                    )
                    assert mp_of(scaled.lo) - mpmath.mpf("1e-35") <= ref
                    assert ref <= mp_of(scaled.hi) + mpmath.mpf("1e-35")


def test_decay_is_bounded_past_the_head(all_bases):
    for fb in all_bases.values():
        for i in range(fb.dim):
            for r in (mpq(1), mpq(10)):
                assert decay_profile(fb, i, r, 120).bounded


def test_decay_argument_validation(fb_h):
    with pytest.raises(StructuralError):
        decay_profile(fb_h, 9, mpq(1), 100)
    with pytest.raises(StructuralError):
        decay_profile(fb_h, 0, mpq(1), 5)


# -- weight sequences ------------------------------------------------------


def test_weight_axiom_standard_matches_integer_arithmetic(fb_h):
    rep = weight_axiom_check(M1, fb_h, 25)
    assert rep.ok
    # same statement in plain integers
    for a in range(1, 25):
        for b in range(1, 25 - a + 1):
            assert a**a * b**b <= (a + b) ** (a + b)


def test_weight_axiom_flags_bad_table(fb_h):
    bad = WeightSequence.from_table({1: mpq(1), 2: mpq(10)}, fill=mpq(1))
    rep = weight_axiom_check(bad, fb_h, 10)
    assert not rep.ok


def test_weight_sequence_lookup():
    assert M1.at(0) == mpq(1)
    assert M1.at(3) == mpq(1, 27)
    t = WeightSequence.from_table({2: mpq(5)}, fill=mpq(1, 2))
    assert t.at(2) == mpq(5)
    assert t.at(7) == mpq(1, 2)
    assert not t.is_standard


def test_dp_counts_matches_enumeration(fb_f7):
    w_max = 12
    counts = dp_counts(fb_f7.weights, w_max)
    ranges = [range(0, w_max // w + 1) for w in fb_f7.weights]
    brute = [0] * (w_max + 1)
    for alpha in itertools.product(*ranges):
        w = sum(a * wi for a, wi in zip(alpha, fb_f7.weights))
        if w <= w_max:
            brute[w] += 1
    assert counts == brute


# -- entireness probes -----------------------------------------------------


def test_entire_certified_at_small_radius(all_bases):
    for fb in all_bases.values():
        rep = entire_check(M1, fb, [mpq(1), mpq(10)], [], 60)
        assert rep.all_certified
        for entry in rep.condition1:
            assert entry["status"] == "certified"
            assert entry["tail_bound"] is not None


def test_entire_inconclusive_below_cutoff(fb_h):
    # radius 100 needs the series through weight 400 for a certificate
    rep = entire_check(M1, fb_h, [mpq(100)], [], 30)
    assert rep.condition1[0]["status"] == "inconclusive"
    assert not rep.all_certified


def test_entire_flags_growing_table(fb_h):
    flat = WeightSequence.from_table({}, fill=mpq(1))
    rep = entire_check(flat, fb_h, [mpq(2)], [], 30)
    assert rep.condition1[0]["status"] == "uncertifiable"


def test_entire_sup_probe_trends(fb_h):
    inv_e = rat("0.367879441171442321595523770161")
    rep = entire_check(M1, fb_h, [], [inv_e, mpq(2)], 40)
    stable, rising = rep.condition2
    assert stable["trend"] == "stable"
    # sup of (1/e)^(a/b) a/b sits at a = b with value 1/e
    assert stable["sup"].startswith("0.3678794")
    assert rising["trend"] == "increasing"


# -- growth function -------------------------------------------------------


def test_growth_function_at_zero(fb_h):
    z = tuple(mpq(0) for _ in range(3))
    assert growth_function(fb_h, z, rat("1e-20")) == Iv(mpq(1))


def test_growth_function_matches_enumeration(fb_h):
    w_cap = 40
    oracle = mpq(1)
    for alpha in itertools.product(
        range(w_cap + 1), range(w_cap + 1), range(w_cap // 2 + 1)
    ):
        w = alpha[0] + alpha[1] + 2 * alpha[2]
        if 0 < w <= w_cap:
            oracle += mpq(1, w**w)  # sigma = 1 here
    phi = growth_function(fb_h, (mpq(1), mpq(0), mpq(0)), rat("1e-25"))
    pad = mpq(1, 10**24)
    assert phi.lo - pad <= oracle <= phi.hi + pad


def _count_by_weight(weights, w_max):
    """Independent multi-index count: branch on the first generator."""
    if not weights:
        return [1] + [0] * w_max
    rest = _count_by_weight(weights[1:], w_max)
    out = [0] * (w_max + 1)
    for w in range(w_max + 1):
        k = 0
        while k * weights[0] <= w:
            out[w] += rest[w - k * weights[0]]
            k += 1
    return out


def test_growth_function_on_favre7(fb_f7):
    s = mpq(1, 2)
    w_cap = 30
    counts = _count_by_weight(list(fb_f7.weights), w_cap)
    oracle = mpq(1)
    for w in range(1, w_cap + 1):
        oracle += counts[w] * s**w * mpq(1, w**w)
    g = (s,) + tuple(mpq(0) for _ in range(6))
    phi = growth_function(fb_f7, g, rat("1e-30"))
    pad = mpq(1, 10**25)
    assert phi.lo - pad <= oracle <= phi.hi + pad
