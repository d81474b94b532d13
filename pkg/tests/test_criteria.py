"""Spectral criteria: verdicts, gap sandwiches, ac tests, and the report."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antitree import (AlternatingSpheres, AntitreeSpec, ConstantLength,
                      CustomLength, ExplicitLengths, ExplicitSpheres,
                      ExponentialSpheres, PolynomialSpheres, PowerLength,
                      SeriesStatus, Verdict, build_profile)
from antitree.criteria import (ac_sphere_ratio_sum, ac_string_deviation,
                               ac_window_sum, classify, discreteness_witness,
                               essential_gap_constant, gap_constant,
                               gap_discrete_sums, gap_phi_at, gap_profile_sup,
                               isoperimetric_constant, self_adjointness,
                               singular_flags, trace_class, volume_growth,
                               window_term)
from antitree.tails import Asym

PI = math.pi


def exp2_const():
    return AntitreeSpec(ExponentialSpheres(2), ConstantLength(1.0))


def poly_power(q, s):
    return AntitreeSpec(PolynomialSpheres(q), PowerLength(float(s)))


# ---------------------------------------------------------------------------
# self-adjointness / discreteness / trace


def test_self_adjointness_goldens():
    assert self_adjointness(exp2_const()).verdict is Verdict.HOLDS
    sa = self_adjointness(poly_power(1, 4))
    assert sa.verdict is Verdict.FAILS and sa.deficiency_index == 1
    # boundary case s = 2q + 1 stays essentially self-adjoint
    sa = self_adjointness(poly_power(1, 3))
    assert sa.verdict is Verdict.HOLDS and sa.deficiency_index == 0
    spec = AntitreeSpec(ExplicitSpheres((1, 2, 3)), ExplicitLengths((1.0, 1.0)))
    assert self_adjointness(spec).verdict is Verdict.INCONCLUSIVE


def test_discreteness_goldens():
    p = build_profile(poly_power(1, 2), 20)
    _, v = discreteness_witness(p, poly_power(1, 2))
    assert v is Verdict.HOLDS
    p = build_profile(poly_power(1, 0.5), 20)
    _, v = discreteness_witness(p, poly_power(1, 0.5))
    assert v is Verdict.FAILS
    p = build_profile(exp2_const(), 20)
    _, v = discreteness_witness(p, exp2_const())
    assert v is Verdict.FAILS            # lengths do not vanish
    p = build_profile(poly_power(1, 4), 20)
    _, v = discreteness_witness(p, poly_power(1, 4))
    assert v is Verdict.NOT_APPLICABLE   # finite volume branch


def test_discreteness_witness_brackets_shrink():
    spec = poly_power(1, 2)
    p = build_profile(spec, 40)
    pairs, _ = discreteness_witness(p, spec)
    assert all(lo <= hi for lo, hi in pairs)
    # the witness tends to zero along the realized window
    assert pairs[-1][1] < pairs[5][1]
    assert pairs[-1][1] < 0.2


def test_trace_class_goldens():
    for s, expected in ((2.0, Verdict.HOLDS), (3.0, Verdict.HOLDS),
                        (1.25, Verdict.FAILS)):
        spec = poly_power(1, s)
        assert trace_class(spec, build_profile(spec, 20)) is expected
    # exponential spheres with power lengths: discrete but huge cells
    spec = AntitreeSpec(ExponentialSpheres(2), PowerLength(2.0))
    p = build_profile(spec, 20)
    _, disc = discreteness_witness(p, spec)
    assert disc is Verdict.HOLDS
    assert trace_class(spec, p) is Verdict.FAILS
    # off the discrete branch the test does not apply
    assert trace_class(exp2_const(), build_profile(exp2_const(), 10)) \
        is Verdict.NOT_APPLICABLE


# ---------------------------------------------------------------------------
# gap machinery


def test_gap_constant_exponential_exact():
    spec = exp2_const()
    est = gap_constant(build_profile(spec, 30), spec)
    assert est.status == "certified"
    assert est.c_lo == pytest.approx(4.0 / 9.0, rel=1e-12)
    assert est.c_hi == pytest.approx(16.0 / 9.0, rel=1e-12)
    assert est.lambda0_lower == pytest.approx(9.0 / 64.0, rel=1e-12)
    assert est.lambda0_upper == pytest.approx(9.0 / 4.0, rel=1e-12)
    assert est.c_lo <= est.exact_partial_sup <= est.c_hi


def test_gap_constant_divergent_dual():
    # constant lengths with polynomial spheres: dual length converges but the
    # witness blows up, so C = inf and the gap bound is zero
    spec = AntitreeSpec(PolynomialSpheres(1), ConstantLength(1.0))
    est = gap_constant(build_profile(spec, 20), spec)
    assert est.status == "divergent"
    assert est.c_hi == math.inf and est.lambda0_lower == 0.0


def test_gap_constant_infinite_length_blocks():
    # a single growing length makes the dual tail infinite: gap collapses
    spec = AntitreeSpec(AlternatingSpheres((2,)), ConstantLength(1.0))
    est = gap_constant(build_profile(spec, 20), spec)
    assert est.status == "divergent"
    assert est.c_hi == math.inf
    assert est.lambda0_lower == 0.0 and est.lambda0_upper == 0.0


def test_gap_single_interval_quadratic():
    # constant weight on [0, T]: the product is x (T - x), peaking at T^2/4
    spec = AntitreeSpec(ExplicitSpheres((1, 3)), ExplicitLengths((2.0,)))
    p = build_profile(spec, 0)
    assert gap_profile_sup(p) == pytest.approx(1.0, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 20), min_size=2, max_size=6),
       st.lists(st.floats(0.05, 3.0), min_size=5, max_size=5))
def test_gap_sup_matches_dense_sampling(spheres, lengths):
    spec = AntitreeSpec(ExplicitSpheres(tuple([1] + spheres)),
                        ExplicitLengths(tuple(lengths)))
    N = min(len(spheres) - 1, len(lengths) - 1)
    p = build_profile(spec, N)
    closed = gap_profile_sup(p, tail_const=0.1)
    dense = 0.0
    for n in range(N + 1):
        xs = np.linspace(p.t[n], p.t[n + 1], 1000, endpoint=False)
        dense = max(dense, max(gap_phi_at(p, float(x), 0.1) for x in xs))
    assert dense <= closed * (1 + 1e-10)
    assert closed <= dense * (1 + 1e-3) + 1e-12  # grid resolution slack


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 20), min_size=2, max_size=6),
       st.lists(st.floats(0.05, 3.0), min_size=5, max_size=5))
def test_gap_sandwich_brackets_profile_sup(spheres, lengths):
    spec = AntitreeSpec(ExplicitSpheres(tuple([1] + spheres)),
                        ExplicitLengths(tuple(lengths)))
    N = min(len(spheres) - 1, len(lengths) - 1)
    p = build_profile(spec, N)
    lo, hi = gap_discrete_sums(p, tail_const=0.05)
    sup = gap_profile_sup(p, tail_const=0.05)
    assert lo <= sup * (1 + 1e-12)
    assert sup <= hi * (1 + 1e-12)


def test_gap_midpoint_dominates_quarter_upper_sum():
    spec = exp2_const()
    p = build_profile(spec, 12)
    for n in range(p.N + 1):
        mid = 0.5 * (p.t[n] + p.t[n + 1])
        v = p.vol_prefix[n]
        t_n = p.dual_prefix[p.N] - (p.dual_prefix[n - 1] if n else 0.0)
        assert gap_phi_at(p, mid) >= 0.25 * v * t_n * (1 - 1e-12)


def test_essential_gap_exponential_bounded():
    spec = exp2_const()
    seq = essential_gap_constant(build_profile(spec, 25), spec, 8)
    for lo, hi in seq:
        assert lo >= 4.0 / 9.0 * (1 - 1e-9)
        assert hi <= 16.0 / 9.0 * (1 + 1e-9)
    assert all(seq[m + 1][0] <= seq[m][0] * (1 + 1e-12) for m in range(len(seq) - 1))


def test_essential_gap_discrete_family_vanishes():
    spec = poly_power(1, 2)
    seq = essential_gap_constant(build_profile(spec, 60), spec, 30)
    assert seq[0][0] > seq[-1][0]
    assert seq[-1][0] < 0.05 * seq[0][0] + 1e-6


def test_essential_gap_base_matches_gap():
    spec = exp2_const()
    p = build_profile(spec, 20)
    seq = essential_gap_constant(p, spec, 0)
    est = gap_constant(p, spec)
    assert seq[0][0] == pytest.approx(est.c_lo, rel=1e-12)
    assert seq[0][1] == pytest.approx(est.c_hi, rel=1e-12)


# ---------------------------------------------------------------------------
# isoperimetric constant and volume growth


def test_isoperimetric_exponential():
    spec = exp2_const()
    res = isoperimetric_constant(build_profile(spec, 10), spec)
    assert res.alpha == pytest.approx(0.75, abs=1e-15)
    assert res.cheeger_lower == pytest.approx(0.140625, abs=1e-15)
    expected = [1.0, 0.8, 16.0 / 21.0]
    for got, want in zip(res.ratios[:3], expected):
        assert got == pytest.approx(want, rel=1e-13)
    assert all(a > b for a, b in zip(res.ratios, res.ratios[1:]))


def test_isoperimetric_zero_for_infinite_volume_bounded_weights():
    spec = AntitreeSpec(AlternatingSpheres((2, 1)), ConstantLength(1.0))
    res = isoperimetric_constant(build_profile(spec, 20), spec)
    assert res.alpha == 0.0


def test_isoperimetric_single_generation():
    spec = AntitreeSpec(ExplicitSpheres((1, 2)), ExplicitLengths((1.0,)))
    res = isoperimetric_constant(build_profile(spec, 0), spec)
    assert res.alpha == pytest.approx(1.0)


def test_volume_growth_exponential():
    spec = exp2_const()
    p = build_profile(spec, 30)
    value, seq = volume_growth(p)
    for n in (10, 30):
        expected = math.log(2 * (4 ** (n + 1) - 1) / 3) / (n + 1)
        assert seq[n] == pytest.approx(expected, rel=1e-12)
    assert value == pytest.approx(math.log(4.0), abs=0.05)
    assert value <= math.log(4.0)
    # upper spectral bound v^2/4 from the growth rate
    assert value ** 2 / 4 == pytest.approx(0.4805, abs=0.02)


def test_volume_growth_polynomial_vanishes():
    # logarithmic over linear: the trailing values behave like 3 log(n)/n
    spec = AntitreeSpec(PolynomialSpheres(1), ConstantLength(1.0))
    value, _ = volume_growth(build_profile(spec, 400))
    assert value < 0.05


def test_volume_growth_unit_weights():
    spec = AntitreeSpec(AlternatingSpheres((1,)), ConstantLength(1.0))
    value, seq = volume_growth(build_profile(spec, 100))
    assert seq[-1] == pytest.approx(math.log(101.0) / 101.0, rel=1e-12)
    assert value < 0.05


# ---------------------------------------------------------------------------
# ac tests


def test_window_terms_zero_beyond_first_breakpoint_for_two_periodic():
    spec = AntitreeSpec(AlternatingSpheres((3, 2)), ConstantLength(1.0))
    p = build_profile(spec, 30)
    res = ac_window_sum(p, spec)
    assert res.verdict is Verdict.HOLDS
    for (a, b), term in zip(res.windows, res.terms):
        if a >= p.t[1]:
            assert term == 0.0


def test_window_term_equilateral_formula():
    # windows (ell n, ell (n+2)) span two intervals; the excess is
    # ell^2 (s_{n+2} - s_n)^2 / (s_n s_{n+2})
    ell = 1.0
    spec = AntitreeSpec(ExplicitSpheres((1, 2, 3, 4, 5)),
                        ExplicitLengths((ell,) * 4))
    p = build_profile(spec, 3)
    s = p.s
    for n in range(1, 3):
        got = window_term(p, n * ell, (n + 2) * ell)
        want = ell ** 2 * (s[n + 2] - s[n]) ** 2 / (s[n] * s[n + 2])
        assert got == pytest.approx(want, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=4, max_size=8),
       st.lists(st.floats(0.2, 2.0), min_size=7, max_size=7),
       st.floats(0.0, 0.8), st.floats(1.0, 3.0))
def test_window_terms_nonnegative(spheres, lengths, a_frac, width):
    spec = AntitreeSpec(ExplicitSpheres(tuple([1] + spheres)),
                        ExplicitLengths(tuple(lengths)))
    N = min(len(spheres) - 1, len(lengths) - 1)
    p = build_profile(spec, N)
    a = a_frac * p.total_length / 2
    b = min(a + width, p.total_length)
    if b <= a:
        return
    assert window_term(p, a, b) >= 0.0


def test_window_outside_profile_raises():
    spec = AntitreeSpec(ExplicitSpheres((1, 2)), ExplicitLengths((1.0,)))
    p = build_profile(spec, 0)
    with pytest.raises(ValueError):
        window_term(p, 0.5, 1.5)


def test_window_not_applicable_for_finite_length():
    spec = poly_power(1, 4)
    res = ac_window_sum(build_profile(spec, 10), spec)
    assert res.verdict is Verdict.NOT_APPLICABLE


def test_ratio_sum_plain():
    res = ac_sphere_ratio_sum(poly_power(1, 0), 200, "plain")
    assert res.status is SeriesStatus.CONVERGES
    assert res.hypothesis_ok and res.conclusion
    # sum ((n+3)/(n+1) - 1)^2 stays under 4 zeta(2)
    assert res.partial_sum < 4 * PI ** 2 / 6

    res = ac_sphere_ratio_sum(exp2_const(), 50, "plain")
    assert res.status is SeriesStatus.DIVERGES
    assert res.terms_used == 51
    assert res.partial_sum == pytest.approx(51 * 9.0, rel=1e-12)
    assert not res.conclusion

    spec = AntitreeSpec(AlternatingSpheres((2, 3)), ConstantLength(1.0))
    res = ac_sphere_ratio_sum(spec, 100, "plain")
    assert res.status is SeriesStatus.CONVERGES  # ratios are eventually one


def test_ratio_sum_m_variant():
    res = ac_sphere_ratio_sum(poly_power(1, 0.5), 80, "m-of-n")
    assert res.status is SeriesStatus.CONVERGES
    assert res.hypothesis_ok and res.conclusion
    res = ac_sphere_ratio_sum(poly_power(1, 0), 80, "m-of-n")
    assert not res.hypothesis_ok  # lengths do not tend to zero
    with pytest.raises(ValueError):
        ac_sphere_ratio_sum(poly_power(1, 0), 10, "median")


def test_string_deviation_trivial_and_polynomial():
    # alternating (3, 1) spheres give the constant weight 3 everywhere;
    # with b = 9 and a = 0 the integrand vanishes identically
    spec = AntitreeSpec(AlternatingSpheres((3, 1)), ConstantLength(0.7))
    p = build_profile(spec, 6)
    assert p.mu == (3,) * 7
    res = ac_string_deviation(p, a=0.0, b=9.0)
    assert res.total == pytest.approx(0.0, abs=1e-14)

    # unit weight, b = 4, a = 0: integrand (3x)^2, total 3 T^3
    spec = AntitreeSpec(AlternatingSpheres((1,)), ConstantLength(1.0))
    p = build_profile(spec, 4)
    res = ac_string_deviation(p, a=0.0, b=4.0)
    T = p.total_length
    assert res.total == pytest.approx(3 * T ** 3, rel=1e-12)
    with pytest.raises(ValueError):
        ac_string_deviation(p, 0.0, 0.0)


def test_string_deviation_three_periodic_example():
    # spheres 1, q, r, p, q, r, p, ... with lengths beta_k, delta_k,
    # (a1/|a2|) delta_k; per period the deviation grows by
    # (a1^2/(3qr) + a1^3/(3 p r |a2|)) delta_k^3
    p_, r_, q_ = 2, 3, 5
    a1 = q_ / r_ * (r_ ** 2 - p_ ** 2)
    a2 = p_ / r_ * (r_ ** 2 - q_ ** 2)
    deltas = [0.5, 0.25, 0.125, 0.0625]
    betas = [1.0, 1.0, 1.0, 1.0]

    def length(n: int) -> float:
        k, r = divmod(n, 3)
        if r == 0:
            return betas[k]
        if r == 1:
            return deltas[k]
        return a1 / abs(a2) * deltas[k]

    spec = AntitreeSpec(AlternatingSpheres((q_, r_, p_)), CustomLength(length))
    prof = build_profile(spec, 11)
    a = betas[0] * q_ * (1 - p_ ** 2)
    res = ac_string_deviation(prof, a=a, b=float((p_ * q_) ** 2))
    for k in (1, 2, 3):
        got = res.increments[3 * k] + res.increments[3 * k + 1] + res.increments[3 * k + 2]
        want = (a1 ** 2 / (3 * q_ * r_) + a1 ** 3 / (3 * p_ * r_ * abs(a2))) \
            * deltas[k] ** 3
        assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# singular flags


def test_singular_flags_exponential_unbounded_lengths():
    spec = AntitreeSpec(ExponentialSpheres(2),
                        CustomLength(lambda n: float(n + 1), Asym(power=1.0)))
    f = singular_flags(spec)
    assert f.hypothesis_geometry is False  # no positive lower-bound certificate
    spec = AntitreeSpec(ExponentialSpheres(2), ConstantLength(2.0))
    f = singular_flags(spec)
    assert f.hypothesis_geometry is True
    assert not f.whole_line_no_ac  # lengths are bounded
    assert f.finite_value_sets and f.eventually_periodic


def test_singular_flags_polynomial_hypothesis_fails():
    f = singular_flags(poly_power(1, 0))
    assert f.hypothesis_geometry is False
    assert not f.finite_value_sets  # skip ratios are all distinct


def test_singular_flags_periodic_detection_on_explicit_data():
    lengths = tuple([1.0, 2.0] * 20)
    spec = AntitreeSpec(AlternatingSpheres((2, 2)), ExplicitLengths(lengths))
    f = singular_flags(spec, probe=36)
    assert f.finite_value_sets
    assert f.eventually_periodic is True


# ---------------------------------------------------------------------------
# the assembled report


def test_classify_implication_chain_and_table_rows():
    r = classify(poly_power(1, 2), N=40)
    assert r.self_adjoint is Verdict.HOLDS
    assert r.discrete is Verdict.HOLDS
    assert r.trace_class is Verdict.HOLDS
    assert r.positive_definite is Verdict.HOLDS
    assert r.ac_conclusion is Verdict.FAILS

    r = classify(poly_power(1, 0), N=40)
    assert r.discrete is Verdict.FAILS
    assert r.ac_conclusion is Verdict.HOLDS

    r = classify(poly_power(1, 3.5), N=40)
    assert r.deficiency_index == 1
    assert r.extensions_discrete
    assert r.discrete is Verdict.NOT_APPLICABLE


def test_classify_open_question_markers_at_boundary():
    r = classify(poly_power(1, 1), N=40)
    assert r.ac_conclusion is Verdict.INCONCLUSIVE
    assert any("essential spectrum" in note for note in r.open_questions)

    r = classify(poly_power(1, 0.5), N=40)
    assert r.ac_conclusion is Verdict.HOLDS
    assert any("singular component" in note for note in r.open_questions)


def test_classify_volume_growth_flag():
    r = classify(exp2_const(), N=20)
    assert r.volume_growth_applicable is True
    r = classify(poly_power(1, 4), N=20)
    assert r.volume_growth_applicable is False
