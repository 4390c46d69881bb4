"""Homogeneous gauge, dilations, commutator schemes, word factorization,
adapted norms, and the exponential-type function norms. Frozen numeric
anchors were derived by hand from the closed forms and cross-checked with
mpmath at higher precision."""

import itertools

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from nilalg import (
    Dilation,
    Filtration,
    InfeasibleSchemeError,
    Iv,
    NormSpec,
    PrecisionExhaustedError,
    Scalar,
    StructuralError,
    adapted_norm,
    ball_bound_check,
    bch,
    build_commutator_scheme,
    corcbh_c_target,
    dilate,
    exp_of_word,
    exp_type_norm,
    f_basis,
    heisenberg,
    load_algebra,
    poly_from_json,
    rat,
    scheme_base_length,
    second_to_first,
    sigma,
    sigma_bar,
    subpoly_estimate,
    word_factorize,
)
from nilalg.sampling import (
    as_point,
    count_violations,
    fit_envelope,
    rand_q,
    sample_box_coords,
    substream,
)


def mp_of(q) -> mpmath.mpf:
    return mpmath.mpf(int(q.numerator)) / mpmath.mpf(int(q.denominator))


# -- gauge and dilations ---------------------------------------------------


def test_sigma_exact_anchors(fb_h, fb_f7):
    t = tuple(rat(v) for v in (3, -4, 9, 0, 0, 0, 0))
    assert sigma(fb_f7, t) == Iv(mpq(4))
    assert sigma(fb_h, (rat(0), rat(0), rat(4))) == Iv(mpq(2))
    zero = tuple(rat(0) for _ in range(3))
    assert sigma(fb_h, zero) == Iv(mpq(0))


def test_sigma_of_complex_coordinate(fb_h):
    t = (Scalar(mpq(3), mpq(4)), Scalar(mpq(0)), Scalar(mpq(0)))
    assert sigma(fb_h, t) == Iv(mpq(5))


def test_sigma_bar_applies_gauge_directly(fb_h):
    tbar = (rat(1), rat(1), rat(1))
    assert sigma_bar(fb_h, tbar) == Iv(mpq(1))
    assert sigma_bar(fb_h, (rat(0), rat(0), rat(9))) == Iv(mpq(3))


def test_dilate_scales_by_weight(fb_f7):
    t = tuple(rat(k + 1) for k in range(7))
    z = mpq(3)
    got = dilate(fb_f7, t, z)
    for i, w in enumerate(fb_f7.weights):
        assert got[i] == t[i] * z**w


def test_dilation_compose(fb_h):
    d2 = Dilation(fb_h, mpq(2))
    d3 = Dilation(fb_h, mpq(3))
    t = (rat(1), rat(2), rat(3))
    assert d2.compose(d3).apply(t) == d2.apply(d3.apply(t))
    assert d2.compose(d3).z == mpq(6)


def test_gauge_homogeneity_on_exact_points(fb_h):
    # coordinates chosen so every root is an exact rational
    for t, z in [((0, 0, 4), 3), ((9, 0, 0), 5), ((0, 2, 1), 2)]:
        tq = tuple(rat(v) for v in t)
        s = sigma(fb_h, tq)
        sz = sigma(fb_h, dilate(fb_h, tq, mpq(z)))
        assert sz == Iv(s.lo * z)


def test_dilations_are_automorphisms_when_graded(fb_h):
    # Heisenberg weights are a true grading, so dilation respects the
    # product. Favre's algebra is only filtered ([e2,e5] lands two layers
    # down), so the same identity fails there by design.
    gen = substream(31, 0)
    for _ in range(20):
        x = tuple(rand_q(gen) for _ in range(3))
        y = tuple(rand_q(gen) for _ in range(3))
        z = mpq(int(gen.integers(1, 5)))
        left = dilate(fb_h, bch(fb_h, x, y), z)
        right = bch(fb_h, dilate(fb_h, x, z), dilate(fb_h, y, z))
        assert left == right


def test_gauge_scaling_on_filtered_algebra(fb_f7):
    t = tuple(rat(v) for v in (1, 1, 4, 8, 16, 32, 64))
    assert sigma(fb_f7, t) == Iv(mpq(2))
    assert sigma(fb_f7, dilate(fb_f7, t, mpq(2))) == Iv(mpq(4))


# -- commutator schemes ----------------------------------------------------


def _nested(fb, word):
    acc = fb.basis_coords(word[-1])
    for g in reversed(word[:-1]):
        acc = fb.bracket_adapted(fb.basis_coords(g), acc)
    return acc


def test_scheme_solves_every_higher_generator(fb_f7):
    scheme = build_commutator_scheme(fb_f7)
    for p, w in enumerate(fb_f7.weights):
        if w == 1:
            assert p not in scheme.terms
            continue
        acc = [mpq(0)] * 7
        for term in scheme.terms[p]:
            vec = _nested(fb_f7, term.word)
            for k in range(7):
                v = vec[k]
                acc[k] += term.mu * (v.re if isinstance(v, Scalar) else v)
        assert acc == [mpq(1) if k == p else mpq(0) for k in range(7)]


def test_scheme_patterns_realize_brackets(fb_f7):
    # the group word equals exp(s^len * bracket) up to higher weight only
    scheme = build_commutator_scheme(fb_f7)
    s = mpq(1, 2)
    for p, tt in scheme.terms.items():
        for term in tt:
            length = len(term.word)
            word = [(i, v * s) for i, v in term.pattern]
            coords, radius = exp_of_word(fb_f7, word)
            assert radius == 0
            expect = tuple(c * s**length for c in _nested(fb_f7, term.word))
            for k, wk in enumerate(fb_f7.weights):
                if wk <= length:
                    assert coords[k] == expect[k]


def test_scheme_base_length_counts_template(fb_f7, fb_ab):
    scheme = build_commutator_scheme(fb_f7)
    total = 2
    for tt in scheme.terms.values():
        total += sum(len(t.pattern) for t in tt)
    assert scheme_base_length(scheme) == total
    assert scheme_base_length(build_commutator_scheme(fb_ab)) == 4


def test_starved_weight_one_layer_is_infeasible():
    H = heisenberg()
    one, zero = rat(1), rat(0)
    F = Filtration(H, [
        [(one, zero, zero), (zero, one, zero), (zero, zero, one)],
        [(zero, one, zero), (zero, zero, one)],
        [(zero, zero, one)],
    ])
    with pytest.raises(InfeasibleSchemeError):
        build_commutator_scheme(f_basis(H, F))


# -- word factorization ----------------------------------------------------


def test_factorize_central_heisenberg_point(fb_h):
    scheme = build_commutator_scheme(fb_h)
    target = (rat(0), rat(0), rat(4))
    word, cert = word_factorize(target, scheme)
    assert cert["length"] == 8
    assert cert["residual_radius"] == "0"
    assert len(word) == 8
    coords, radius = exp_of_word(fb_h, word)
    assert radius == 0
    assert coords == target


def test_factorize_reconstructs_random_targets(fb_f7):
    scheme = build_commutator_scheme(fb_f7)
    gen = substream(32, 0)
    from nilalg import group_inv

    for _ in range(12):
        tbar = sample_box_coords(fb_f7, gen, 6)
        target = second_to_first(fb_f7, tbar)
        word, cert = word_factorize(target, scheme)
        assert cert["length"] == len(word)
        for _, v in word:
            mag = abs(v)
            hi = mag.hi if isinstance(mag, Iv) else mag
            assert hi <= 1
        resid = rat(cert["residual_radius"]) if cert["residual_radius"] != "0" else mpq(0)
        assert resid < rat("1e-40")
        # the certificate bounds the group difference between the word
        # product and the target, coordinate by coordinate
        coords, _ = exp_of_word(fb_f7, word, precision=256)
        gap = bch(fb_f7, group_inv(coords), target)
        slack = rat("1e-29")  # certificate radius is printed to 30 digits
        for c in gap:
            if isinstance(c, Iv):
                assert abs(c.lo) <= resid + slack and abs(c.hi) <= resid + slack
            else:
                assert abs(c) <= resid + slack


def test_factorize_abelian_grid_lengths(fb_ab):
    # no brackets, so each coordinate costs exactly ceil(|t_i|) letters
    scheme = build_commutator_scheme(fb_ab)
    for t in itertools.product((-2, -1, 0, 1, 2), repeat=4):
        tq = tuple(rat(v) for v in t)
        if not any(tq):
            continue
        word, cert = word_factorize(tq, scheme)
        assert cert["residual_radius"] == "0"
        expect = sum(abs(v) for v in t)
        assert cert["length"] == expect
        smax = max(abs(v) for v in t)
        assert cert["length"] <= 4 * smax


def test_factorize_precision_exhaustion_reports_retry_hint(fb_h):
    scheme = build_commutator_scheme(fb_h)
    target = (rat(0), rat(0), rat("1/3"))
    with pytest.raises(PrecisionExhaustedError) as info:
        word_factorize(target, scheme, precision=128, tol=rat("1e-300"))
    assert info.value.suggested_bits > 128


# -- adapted norms and ball bounds -----------------------------------------


def test_corcbh_targets(fb_h, fb_ab, fb_f7):
    assert corcbh_c_target(fb_ab) == mpq(1)
    assert corcbh_c_target(fb_h) == mpq(1)
    assert corcbh_c_target(fb_f7) == mpq(80, 2113)


def test_adapted_norm_heisenberg(fb_h):
    spec = adapted_norm(fb_h)
    assert spec.scaling(1) == mpq(1)
    assert spec.scaling(2) == mpq(1, 2)
    assert spec.achieved == mpq(1, 2)
    # the dyadic search certifies from below, never past the target
    assert spec.achieved <= spec.C == corcbh_c_target(fb_h)


def test_adapted_norm_favre7(fb_f7):
    spec = adapted_norm(fb_f7)
    assert spec.achieved == mpq(1, 64)
    assert spec.achieved <= corcbh_c_target(fb_f7)
    assert spec.scaling(2) == mpq(1, 64)
    assert spec.scaling(6) == mpq(1, 2**30)


def test_adapted_norm_abelian_has_nothing_to_certify(fb_ab):
    spec = adapted_norm(fb_ab)
    assert spec.scalings == ((1, mpq(1)),)
    assert spec.achieved == mpq(0)


def test_ball_bound_holds_on_random_words(fb_h):
    spec = adapted_norm(fb_h)
    rep = ball_bound_check(spec, n_words=120, max_len=20, seed=3)
    assert rep.ok, rep.violations[:2]


def test_ball_bound_flags_inflated_scalings(fb_h):
    bad = NormSpec(fb_h, ((1, mpq(1)), (2, mpq(4000))), mpq(1), mpq(1, 2))
    rep = ball_bound_check(bad, n_words=60, max_len=12, seed=3)
    assert not rep.ok


# -- length-versus-gauge fits ----------------------------------------------


def test_fit_envelope_covers_training_points():
    pts = [
        (Iv(mpq(k)), Iv(mpq(2 * k + 1) + mpq(k % 3, 7))) for k in range(1, 30)
    ]
    C, D = fit_envelope(pts)
    assert count_violations(pts, C, D) == 0
    assert C >= mpq(2)


def test_fit_envelope_respects_floor():
    pts = [(Iv(mpq(k)), Iv(mpq(k))) for k in range(1, 10)]
    _, d_small = fit_envelope(pts)
    _, d_floored = fit_envelope(pts, d_floor=mpq(50))
    assert d_floored >= mpq(50)
    assert d_floored > d_small


def test_count_violations_detects_excursion():
    pts = [(Iv(mpq(1)), Iv(mpq(100)))]
    assert count_violations(pts, mpq(1), mpq(1)) == 1
    assert as_point(mpq(3)) == Iv(mpq(3))


def test_subpoly_estimate_small_run(fb_h):
    rep = subpoly_estimate(fb_h, 400, 400, 20, seed=9, precision=128)
    assert rep.ok
    assert rep.violations == 0
    assert rep.train_n == 400 and rep.test_n == 400
    again = subpoly_estimate(fb_h, 400, 400, 20, seed=9, precision=128)
    assert rep.to_json() == again.to_json()


# -- exponential-type norms ------------------------------------------------


def test_exp_type_constant_is_one(fb_h):
    lo, hi = exp_type_norm(fb_h, {(0, 0, 0): Scalar(mpq(1))}, mpq(1))
    assert lo == Iv(mpq(1)) and hi == Iv(mpq(1))


def test_exp_type_weight_one_coordinate(fb_h):
    # sup of x e^(-x) over x >= 0 is 1/e at x = 1
    lo, hi = exp_type_norm(fb_h, {(1, 0, 0): Scalar(mpq(1))}, mpq(1))
    with mpmath.workdps(40):
        ref = mpmath.exp(-1)
        assert mp_of(lo.lo) <= ref + mpmath.mpf("1e-25")
        assert mp_of(hi.hi) >= ref - mpmath.mpf("1e-25")
    assert hi.hi - lo.lo < mpq(1, 10**9)


def test_exp_type_central_heisenberg(fb_h):
    # f = t3, gauge sqrt(|t3|): sup s^2 e^(-2s) = e^(-2)
    lo, hi = exp_type_norm(fb_h, {(0, 0, 1): Scalar(mpq(1))}, mpq(2))
    with mpmath.workdps(40):
        ref = mpmath.exp(-2)
        assert mp_of(lo.lo) <= ref + mpmath.mpf("1e-25")
        assert mp_of(hi.hi) >= ref - mpmath.mpf("1e-25")
    assert hi.hi - lo.lo < mpq(1, 10**6)


def test_exp_type_two_coordinates_bracket_true_value(fb_h):
    # optimum splits evenly: sup (a+b) e^(-max(a,b)) = 2/e
    terms = {(1, 0, 0): Scalar(mpq(1)), (0, 1, 0): Scalar(mpq(1))}
    lo, hi = exp_type_norm(fb_h, terms, mpq(1))
    with mpmath.workdps(40):
        ref = 2 * mpmath.exp(-1)
        assert mp_of(lo.lo) <= ref
        assert ref <= mp_of(hi.hi)
    assert lo.lo > mpq(7, 10)


def test_poly_from_json_validation():
    dim = 3
    doc = {"terms": [{"d": [1, 0, 0], "c": "1/2"}, {"d": [1, 0, 0], "c": "1/2"}]}
    assert poly_from_json(doc, dim) == {(1, 0, 0): Scalar(mpq(1))}
    with pytest.raises(StructuralError):
        poly_from_json({"terms": [{"d": [1, 0], "c": "1"}]}, dim)
    with pytest.raises(StructuralError):
        poly_from_json({"terms": [{"d": [-1, 0, 0], "c": "1"}]}, dim)
    with pytest.raises(StructuralError):
        poly_from_json({}, dim)


square = st.integers(min_value=0, max_value=9).map(lambda k: mpq(k * k))


@given(square, st.integers(min_value=1, max_value=6))
@settings(max_examples=40)
def test_gauge_homogeneity_property(c, z):
    fb = f_basis(load_algebra("heisenberg3"))
    t = (rat(0), rat(0), c)
    zz = mpq(z * z)
    s = sigma(fb, t)
    assert sigma(fb, dilate(fb, t, zz)) == Iv(s.lo * zz)
