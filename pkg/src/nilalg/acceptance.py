"""Desk-scale verification suite. Each criterion is a self-contained check
with its own runtime budget; the runner reports one record per criterion
and an overall verdict. All sampling flows from the recorded seed through
fixed substream indices, so reruns reproduce every draw."""

import time
from dataclasses import dataclass

from gmpy2 import mpq, mpz

from .algebra import (
    algebra_from_json,
    algebra_to_json,
    f_basis,
    load_algebra,
    lower_central_series,
    validate,
    weight_of,
)
from .enveloping import (
    UElement,
    WeightSequence,
    PrenormParams,
    decay_profile,
    entire_check,
    growth_function,
    pbw_mul,
    power_norm_closed_form,
    prenorm,
    u_gen,
    u_monomial,
    u_power,
    u_zero,
    weight_axiom_check,
)
from .errors import NilalgError
from .geometry import (
    adapted_norm,
    ball_bound_check,
    build_commutator_scheme,
    dilate,
    scheme_base_length,
    sigma,
    subpoly_estimate,
    word_factorize,
)
from .group import (
    bch,
    bch_naive,
    first_to_second,
    group_inv,
    second_to_first,
)
from .sampling import (
    as_point,
    count_violations,
    fit_envelope,
    rand_q,
    rand_sign,
    sample_box_coords,
    substream,
)
from .scalars import Q0, Q1, Scalar, rat, rat_str

BUNDLED = ("heisenberg3", "abelian_4", "favre7")

# substream indices 1..6 belong to the library samplers; the suite draws
# its own streams at 100 + criterion number
_SUB_BASE = 100


@dataclass(frozen=True)
class Context:
    bases: dict
    seed: int
    precision: int


def make_context(seed: int = 0, precision: int = 128) -> Context:
    bases = {name: f_basis(load_algebra(name)) for name in BUNDLED}
    return Context(bases, seed, precision)


def _stream(ctx: Context, number: int):
    return substream(ctx.seed, _SUB_BASE + number)


def _rand_coords(fb, gen):
    return tuple(rand_q(gen) for _ in range(fb.dim))


# -- criteria --------------------------------------------------------------


def _c1_structural(ctx: Context):
    fails = []
    for name, fb in ctx.bases.items():
        rep = validate(fb.algebra)
        if not rep.ok:
            fails.append(f"{name}: validate reported {rep.violations[:1]}")
    h = ctx.bases["heisenberg3"]
    series = lower_central_series(h.algebra)
    if series.dims != (3, 1):
        fails.append(f"heisenberg3 series dims {series.dims} != (3, 1)")
    f7 = ctx.bases["favre7"]
    if f7.depth != 6:
        fails.append(f"favre7 depth {f7.depth} != 6")
    if tuple(f7.weights) != (1, 1, 2, 3, 4, 5, 6):
        fails.append(f"favre7 weights {f7.weights}")
    doc = algebra_to_json(h.algebra)
    doc["brackets"].append({"i": 1, "j": 3, "coeffs": {"2": "1"}})
    rep = validate(algebra_from_json(doc))
    if rep.ok:
        fails.append("perturbed table was not rejected")
    return fails, {
        "algebras": list(BUNDLED),
        "heisenberg_series_dims": list(series.dims),
        "favre7_weights": list(f7.weights),
        "perturbed_rejected": True,
    }


def _c2_bch(ctx: Context):
    fails = []
    gen = _stream(ctx, 2)
    triples = oracle_pairs = 0
    for name, fb in ctx.bases.items():
        zero = tuple(Q0 for _ in range(fb.dim))
        for _ in range(200):
            x, y, z = (_rand_coords(fb, gen) for _ in range(3))
            if bch(fb, bch(fb, x, y), z) != bch(fb, x, bch(fb, y, z)):
                fails.append(f"{name}: associativity broke")
                break
            if bch(fb, x, group_inv(x)) != zero:
                fails.append(f"{name}: inverse identity broke")
                break
            triples += 1
        for _ in range(50):
            x, y = _rand_coords(fb, gen), _rand_coords(fb, gen)
            if bch(fb, x, y) != bch_naive(fb, x, y):
                fails.append(f"{name}: engine disagrees with naive series")
                break
            oracle_pairs += 1
    return fails, {"triples": triples, "oracle_pairs": oracle_pairs}


def _c3_coords(ctx: Context):
    fails = []
    gen = _stream(ctx, 3)
    points = 0
    for name, fb in ctx.bases.items():
        for _ in range(200):
            t = _rand_coords(fb, gen)
            tbar = first_to_second(fb, t)
            if second_to_first(fb, tbar) != t:
                fails.append(f"{name}: first->second->first not identity")
                break
            u = _rand_coords(fb, gen)
            if first_to_second(fb, second_to_first(fb, u)) != u:
                fails.append(f"{name}: second->first->second not identity")
                break
            if name == "heisenberg3" and tbar[2] != t[2] - t[0] * t[1] / 2:
                fails.append("heisenberg3: closed form for the third split "
                             "coordinate broke")
                break
            points += 1
    return fails, {"points": points}


def _rand_u_elem(fb, gen, n_terms=3, max_deg=4) -> UElement:
    coeffs = {}
    for _ in range(n_terms):
        deg = int(gen.integers(0, max_deg + 1))
        alpha = [0] * fb.dim
        for _ in range(deg):
            alpha[int(gen.integers(0, fb.dim))] += 1
        key = tuple(alpha)
        c = Scalar(rand_q(gen))
        coeffs[key] = coeffs[key] + c if key in coeffs else c
    return UElement(fb, coeffs)


def _rand_monomial_weighted(fb, gen, w_cap=8):
    while True:
        alpha = tuple(
            int(gen.integers(0, w_cap // w + 1)) for w in fb.weights
        )
        if weight_of(fb, alpha) <= w_cap:
            return alpha


def _c4_pbw(ctx: Context):
    fails = []
    assoc = products = 0
    gen = _stream(ctx, 4)
    for name, fb in ctx.bases.items():
        for i in range(fb.dim):
            for j in range(fb.dim):
                lhs = pbw_mul(u_gen(fb, i), u_gen(fb, j)) - pbw_mul(
                    u_gen(fb, j), u_gen(fb, i)
                )
                rhs = u_zero(fb)
                br = fb.bracket_adapted(fb.basis_coords(i), fb.basis_coords(j))
                for k, c in enumerate(br):
                    if c:
                        rhs = rhs + c * u_gen(fb, k)
                if lhs != rhs:
                    fails.append(f"{name}: commutator identity broke at "
                                 f"({i + 1}, {j + 1})")
        for _ in range(25):
            x, y, z = (_rand_u_elem(fb, gen) for _ in range(3))
            if pbw_mul(pbw_mul(x, y), z) != pbw_mul(x, pbw_mul(y, z)):
                fails.append(f"{name}: associativity broke")
                break
            assoc += 1
        for _ in range(300):
            alpha = _rand_monomial_weighted(fb, gen)
            beta = _rand_monomial_weighted(fb, gen)
            floor = weight_of(fb, alpha) + weight_of(fb, beta)
            p = pbw_mul(u_monomial(fb, alpha), u_monomial(fb, beta))
            for gamma in p.coeffs:
                if weight_of(fb, gamma) < floor:
                    fails.append(f"{name}: support weight dropped under "
                                 f"{alpha} * {beta}")
                    break
            products += 1
    return fails, {"assoc_triples": assoc, "monomial_products": products}


def _c5_norm_formula(ctx: Context):
    fails = []
    checked = 0
    M1 = WeightSequence.standard()
    for name, fb in ctx.bases.items():
        for r in (Q1, mpq(10)):
            params = PrenormParams(r, M1, ctx.precision)
            for i in range(fb.dim):
                for n in range(1, 51):
                    got = prenorm(u_power(fb, i, n), params)
                    want = power_norm_closed_form(fb, i, n, r)
                    if not (got.is_point() and got.lo == want):
                        fails.append(f"{name}: prenorm(e_{i + 1}^{n}, r={r}) "
                                     "missed the closed form")
                        break
                    checked += 1
    return fails, {"checked": checked, "radius": "0"}


def _c6_decay(ctx: Context):
    fails = []
    profiles = 0
    for name, fb in ctx.bases.items():
        for i in range(fb.dim):
            for r in (1, 10):
                prof = decay_profile(fb, i, r, 300, ctx.precision)
                if not prof.bounded:
                    fails.append(f"{name}: normalized decay exceeded its "
                                 f"head maximum at i={i + 1}, r={r}")
                profiles += 1
    return fails, {"profiles": profiles, "n_max": 300}


def _c7_weight_axiom(ctx: Context):
    M1 = WeightSequence.standard()
    rep = weight_axiom_check(M1, ctx.bases["heisenberg3"], 30)
    fails = [] if rep.ok else [f"violations: {rep.violations[:3]}"]
    return fails, {"w_bound": 30, "violations": len(rep.violations)}


def _phi_enumerated(fb, w_cap: int) -> mpq:
    """Independent route: enumerate multi-indices directly (no weight
    grouping) and sum w(alpha)^-w(alpha) at sigma = 1."""
    weights = fb.weights
    total = [Q0]

    def rec(i, acc):
        if i == len(weights):
            total[0] += Q1 if acc == 0 else mpq(1, mpz(acc) ** acc)
            return
        w = weights[i]
        a = acc
        while a <= w_cap:
            rec(i + 1, a)
            a += w

    rec(0, 0)
    return total[0]


def _c8_entire(ctx: Context):
    fails = []
    M1 = WeightSequence.standard()
    tol = mpq(1, mpz(10) ** 20)
    details = {}
    for name, fb in ctx.bases.items():
        rep = entire_check(M1, fb, [1, 10, 100], [], 420, ctx.precision)
        if not rep.all_certified:
            statuses = [e["status"] for e in rep.condition1]
            fails.append(f"{name}: series statuses {statuses}")
        unit = tuple(Q1 if i == 0 else Q0 for i in range(fb.dim))
        phi = growth_function(fb, unit, tol / 100, ctx.precision)
        oracle = _phi_enumerated(fb, 60)
        err = abs(phi.mid - oracle)
        if err >= tol:
            fails.append(f"{name}: growth value off the enumeration by "
                         f"{float(err):g}")
        details[name] = {"certified_r": ["1", "10", "100"]}
    return fails, details


def _c9_subpoly(ctx: Context):
    fails = []
    details = {}
    for name, fb in ctx.bases.items():
        rep = subpoly_estimate(
            fb, 10_000, 10_000, 100, ctx.seed, ctx.precision
        )
        if not rep.ok:
            fails.append(f"{name}: {rep.violations} holdout violations")
        details[name] = {"C": rat_str(rep.C), "D": rat_str(rep.D)}
    return fails, details


def _factor_targets(fb, gen, n_random=80, n_compatible=20):
    """Second-kind coordinate targets with sigma-bar <= 10. The compatible
    tail is weight-one supported (plus exact-square top coordinates on the
    3-dim table), so every root in the pipeline stays rational."""
    targets = []
    for _ in range(n_random):
        targets.append((sample_box_coords(fb, gen, 10), False))
    ones = fb.weight_one_indices()
    for t in range(n_compatible):
        tbar = [Q0] * fb.dim
        for i in ones:
            tbar[i] = rand_q(gen)
        if fb.dim == 3 and fb.depth == 2 and t % 2:
            q = rand_q(gen)
            tbar = [Q0, Q0, rand_sign(gen) * q * q]
        targets.append((tuple(tbar), True))
    return targets


def _c10_factorize(ctx: Context):
    fails = []
    gen = _stream(ctx, 10)
    tol = mpq(1, mpz(10) ** 40)
    details = {}
    for name, fb in ctx.bases.items():
        scheme = build_commutator_scheme(fb)
        pairs = []
        exact_zero = 0
        for tbar, compatible in _factor_targets(fb, gen):
            g = second_to_first(fb, tbar)
            sbar = sigma(fb, tbar, ctx.precision)
            try:
                _, cert = word_factorize(g, scheme, 256, tol)
            except NilalgError as exc:
                fails.append(f"{name}: factorization failed: {exc}")
                continue
            if compatible:
                if cert["residual_radius"] != "0":
                    fails.append(f"{name}: compatible target left residual "
                                 f"{cert['residual_radius']}")
                else:
                    exact_zero += 1
            pairs.append((sbar, as_point(cert["length"])))
        if len(pairs) < 100:
            fails.append(f"{name}: only {len(pairs)} certificates")
            continue
        # lengths plateau at the scheme's no-split cost as sigma-bar -> 0,
        # so the envelope intercept is floored there
        C, D = fit_envelope(pairs[:50], scheme_base_length(scheme))
        bad = count_violations(pairs[50:], C, D)
        if bad:
            fails.append(f"{name}: {bad} length-envelope holdout violations")
        details[name] = {
            "targets": len(pairs),
            "exact_zero": exact_zero,
            "length_C": rat_str(C),
            "length_D": rat_str(D),
        }
    return fails, details


def _c11_ball_bound(ctx: Context):
    fails = []
    details = {}
    for name, fb in ctx.bases.items():
        spec = adapted_norm(fb)
        rep = ball_bound_check(spec, 500, 40, ctx.seed)
        if not rep.ok:
            fails.append(f"{name}: {len(rep.violations)} ball violations")
        details[name] = {"words": 500, "max_len": 40}
    return fails, details


def _c12_dilation(ctx: Context):
    fails = []
    gen = _stream(ctx, 12)
    tol = mpq(1, mpz(10) ** 30)
    samples = 0
    quota = {"heisenberg3": 34, "abelian_4": 33, "favre7": 33}
    for name, fb in ctx.bases.items():
        for _ in range(quota[name]):
            t = sample_box_coords(fb, gen, 5)
            s = sigma(fb, t, ctx.precision)
            for z in (2, 10):
                d = sigma(fb, dilate(fb, t, z), ctx.precision)
                diff = d - s * z
                if diff.lo < -tol or diff.hi > tol:
                    fails.append(f"{name}: homogeneity off by "
                                 f"[{float(diff.lo):g}, {float(diff.hi):g}]")
            samples += 1
    return fails, {"samples": samples, "z": [2, 10]}


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    limit_s: float
    fn: object


CRITERIA = (
    Criterion(1, "structural", 1.0, _c1_structural),
    Criterion(2, "bch", 30.0, _c2_bch),
    Criterion(3, "coords", 10.0, _c3_coords),
    Criterion(4, "pbw", 60.0, _c4_pbw),
    Criterion(5, "norm-formula", 30.0, _c5_norm_formula),
    Criterion(6, "decay", 60.0, _c6_decay),
    Criterion(7, "weight-axiom", 5.0, _c7_weight_axiom),
    Criterion(8, "entire", 60.0, _c8_entire),
    Criterion(9, "subpoly", 120.0, _c9_subpoly),
    Criterion(10, "factorize", 600.0, _c10_factorize),
    Criterion(11, "ball-bound", 300.0, _c11_ball_bound),
    Criterion(12, "dilation", 5.0, _c12_dilation),
)


def run_criterion(crit: Criterion, ctx: Context) -> dict:
    t0 = time.perf_counter()
    try:
        fails, details = crit.fn(ctx)
    except NilalgError as exc:
        fails, details = [f"error: {exc}"], {}
    elapsed = time.perf_counter() - t0
    within = elapsed < crit.limit_s
    return {
        "id": crit.number,
        "name": crit.name,
        "passed": not fails and within,
        "checks_ok": not fails,
        "within_budget": within,
        "elapsed_s": round(elapsed, 3),
        "limit_s": crit.limit_s,
        "failures": fails[:8],
        "details": details,
    }


def run_all(seed: int = 0, precision: int = 128, numbers=None) -> dict:
    ctx = make_context(seed, precision)
    wanted = set(numbers) if numbers else None
    records = [
        run_criterion(c, ctx)
        for c in CRITERIA
        if wanted is None or c.number in wanted
    ]
    return {
        "seed": seed,
        "precision": precision,
        "criteria": records,
        "passed": all(r["passed"] for r in records),
    }
