import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from twistlab.characters import enumerate_characters, quadratic_characters, trivial_character
from twistlab.modforms import RangeError, get_form, synthesize_tate_twist
from twistlab.twist import (
    TwistCertificate,
    WeakMatch,
    certificate_sturm_target,
    detect_twist,
    detect_twist_report,
    twist_record,
    verify_certificate,
)

CHI4 = quadratic_characters(4)[0]
CHI3 = quadratic_characters(3)[0]


def test_delta_chi4(delta):
    g = twist_record(delta, CHI4)
    cert = detect_twist(g, delta)
    assert isinstance(cert, TwistCertificate)
    assert cert.r == 0 and cert.chi == CHI4 and cert.chi.conductor == 4
    assert cert.sturm_target == 24 and cert.verified_up_to == 10_000
    assert cert.exceptional_primes == [2]
    assert verify_certificate(cert, g, delta) == (True, [])


def test_self_comparison_gives_trivial_character(delta):
    cert = detect_twist(delta, delta)
    assert cert.chi.is_trivial() and cert.r == 0


def test_tate_twist_detected(f11):
    cert = detect_twist(synthesize_tate_twist(f11, 1), f11)
    assert cert.r == 1 and cert.chi.is_trivial()


def test_negative_control(delta, f11):
    report = detect_twist_report(delta, f11)
    assert report.result is None
    assert detect_twist(delta, f11) is None


def test_wrong_r_fails_at_two(delta):
    g = synthesize_tate_twist(delta, 1)
    cert = detect_twist(g, delta)
    bad = dataclasses.replace(cert, r=2)
    ok, failures = verify_certificate(bad, g, delta, 100)
    assert not ok and failures[0] == 2


def test_wrong_character_fails_at_three_mod_four(delta):
    g = twist_record(delta, CHI4)
    cert = detect_twist(g, delta)
    bad = dataclasses.replace(cert, chi=trivial_character(4))
    ok, failures = verify_certificate(bad, g, delta, 1000)
    assert not ok and all(p % 4 == 3 for p in failures) and 3 in failures


def test_weak_match_below_sturm_target(delta):
    g = twist_record(delta, CHI4)
    res = detect_twist(g, delta, X=20)
    assert isinstance(res, WeakMatch)
    assert res.sturm_target == 24 and res.verified_up_to == 20
    assert WeakMatch.from_dict(res.to_dict()) == res


def test_parity_gate_blocks_search(delta):
    w13 = dataclasses.replace(delta, id="w13", weight=13, synthetic=True)
    report = detect_twist_report(delta, w13)
    assert report.parity.inconclusive and report.survivors == [] and report.result is None


def test_range_error(delta):
    with pytest.raises(RangeError):
        detect_twist(delta, delta, X=delta.bound + 1)


def test_twist_record_examples(delta, f11):
    d4 = twist_record(delta, CHI4)
    assert d4.a(3) == -252 and d4.level == 16 and d4.synthetic
    assert twist_record(f11, CHI3).a(2) == 2


@pytest.mark.parametrize("q", [3, 4, 5, 8, 12])
def test_twist_record_scales_coprime_coefficients(delta, q):
    # (f (x) chi)_n = chi(n) a_n for every n coprime to the modulus
    for chi in quadratic_characters(q):
        g = twist_record(delta, chi)
        for n in range(1, 1500):
            assert g.a(n) == chi.real_value(n) * delta.a(n)


def test_certificate_round_trip(delta):
    cert = detect_twist(twist_record(delta, CHI4), delta)
    d = cert.to_dict()
    assert "orientation" in d
    assert TwistCertificate.from_dict(d) == cert


def test_sturm_target_formula(delta):
    assert certificate_sturm_target(delta, delta, 4) == oracles_sturm(12, 16)


def oracles_sturm(k, N):
    index = N
    for p in oracles.primes(N):
        if N % p == 0:
            index = index * (p + 1) // p
    return max(1, k * index // 12)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(["1.12.delta", "1.16", "11.2", "20.2"]),
    st.integers(1, 12),
    st.integers(0, 2),
    st.data(),
)
def test_soundness(fid, q, r, data):
    # whatever detect_twist returns must satisfy the identity it claims
    f = get_form(fid)
    chi = data.draw(st.sampled_from([c for c in enumerate_characters(q) if c.order <= 2]))
    g = twist_record(synthesize_tate_twist(f, r), chi)
    cert = detect_twist(g, f, X=3000)
    assert isinstance(cert, TwistCertificate)
    assert cert.r == r
    assert verify_certificate(cert, g, f)[0]
    assert cert.chi.conductor == chi.conductor
    for p in oracles.primes(500):
        if q % p:
            assert cert.chi.real_value(p) == chi.real_value(p)
