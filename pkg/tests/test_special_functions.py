import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udb import special_functions as sf
from udb.errors import DomainError

from conftest import mp_series

# frozen from a 40-digit power series summed with mpmath
J0_AT_5 = -0.17759677131433830435
J0_FIRST_ZERO = 2.4048255576957727686
J1_FIRST_ZERO = 3.8317059702075123156
J1_SECOND_ZERO = 7.0155866698156187535
J0_AT_J1_FIRST_ZERO = -0.40275939570255297210
J1_ZERO_248 = 779.89989542307179610
J0_AT_J1_ZERO_248 = 0.028570674708734113


def test_j0_examples():
    assert sf.bessel_j0(0.0).value == 1.0
    assert abs(sf.bessel_j0(J0_FIRST_ZERO).value) <= 1e-10
    assert sf.bessel_j0(5.0).value == pytest.approx(J0_AT_5, abs=1e-12)


def test_j1_examples():
    assert sf.bessel_j1(0.0).value == 0.0
    assert abs(sf.bessel_j1(J1_FIRST_ZERO).value) <= 1e-10


def test_error_bounds_small():
    for t in (0.0, 5.0, 12.0, 50.0, 1e6):
        assert 0 <= sf.bessel_j0(t).abs_error_bound <= 1e-10
        assert 0 <= sf.bessel_j1(t).abs_error_bound <= 1e-10


@pytest.mark.parametrize("bad", [math.nan, math.inf, -1.0])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        sf.bessel_j0(bad)
    with pytest.raises(DomainError):
        sf.bessel_j1(bad)


def test_oracle_agreement_random():
    rng = np.random.default_rng(2024)
    t = rng.uniform(0.0, 1000.0, 10_000)
    v0, v1 = sf.j0(t), sf.j1(t)
    with mp.workdps(30):
        ref0 = np.array([float(mp.besselj(0, x)) for x in t])
        ref1 = np.array([float(mp.besselj(1, x)) for x in t])
    assert np.max(np.abs(v0 - ref0)) <= 1e-10
    assert np.max(np.abs(v1 - ref1)) <= 1e-10


def test_series_oracle_near_switch():
    # the independent power series is reliable up to moderate arguments
    for x in np.linspace(0.1, 20.0, 60):
        assert sf.j0(x) == pytest.approx(mp_series(0, x), abs=1e-11)
        assert sf.j1(x) == pytest.approx(mp_series(1, x), abs=1e-11)


def test_large_arguments_against_mpmath():
    for x in (1e3, 12345.678, 2.5e5, 1e6):
        with mp.workdps(30):
            assert sf.j0(x) == pytest.approx(float(mp.besselj(0, x)), abs=1e-10)
            assert sf.j1(x) == pytest.approx(float(mp.besselj(1, x)), abs=1e-10)


def test_derivative_identity():
    rng = np.random.default_rng(5)
    h = 1e-5
    for t in rng.uniform(h, 300.0, 500):
        fd = (sf.j0(t + h) - sf.j0(t - h)) / (2 * h)
        assert abs(fd + sf.j1(t)) <= 1e-6


def test_watson_bound():
    t = np.linspace(0.0, 2000.0, 400_001)
    assert np.max(np.abs(sf.j1(t))) <= sf.WATSON_J1_BOUND + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=1e5, allow_nan=False))
def test_watson_bound_property(t):
    assert abs(sf.bessel_j1(t).value) <= 1 / math.sqrt(2) + sf.bessel_j1(t).abs_error_bound


def test_vectorised_matches_scalar():
    t = np.array([0.0, 0.5, 11.99, 12.0, 12.01, 40.0, 900.0])
    assert np.array_equal(sf.j0(t), np.array([sf.j0(x) for x in t]))
    assert isinstance(sf.j0(3.0), float)


# -- omega ------------------------------------------------------------------

def test_omega_two_is_j0():
    t = np.linspace(0, 100, 1001)
    assert np.array_equal(sf.omega(2, t), sf.j0(t))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_omega_at_zero(n):
    assert sf.omega(n, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_omega_three_closed_form():
    assert abs(sf.omega(3, math.pi)) <= 1e-10
    t = np.linspace(0.01, 200.0, 2000)
    assert np.max(np.abs(sf.omega(3, t) - np.sin(t) / t)) <= 1e-10


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_omega_against_mpmath(n):
    nu = (n - 2) / 2
    for t in (0.3, 2.0, 9.5, 15.0, 47.0, 333.0):
        with mp.workdps(30):
            ref = mp.gamma(n / 2) * (2 / mp.mpf(t)) ** nu * mp.besselj(nu, t)
        assert sf.omega(n, t) == pytest.approx(float(ref), abs=1e-10)


@pytest.mark.parametrize("n", [1, 0, 2.5])
def test_omega_bad_dimension(n):
    with pytest.raises(DomainError):
        sf.omega(n, 1.0)


# -- zeros and envelope -----------------------------------------------------

def test_zero_table_examples():
    assert sf.j1_zeros(1)[0] == pytest.approx(J1_FIRST_ZERO, abs=1e-12)
    assert sf.j1_zeros(2)[1] == pytest.approx(J1_SECOND_ZERO, abs=1e-12)
    table = sf.j1_zeros(248)
    assert len(table) == 248
    assert table[-1] == pytest.approx(J1_ZERO_248, abs=1e-9)


def test_zero_table_invariants():
    z = sf.j1_zeros(400).as_array()
    assert np.all(np.diff(z) > 0)
    assert np.all(np.abs(sf.j1(z)) <= 1e-12)
    gaps = np.diff(z)[3:]
    assert np.all((gaps > math.pi - 0.5) & (gaps < math.pi + 0.5))
    # sign change across every zero
    assert np.all(np.sign(sf.j1(z - 1e-6)) != np.sign(sf.j1(z + 1e-6)))


def test_zeros_interlace_with_j0_zeros():
    z = sf.j1_zeros(100).as_array()
    # exactly one zero of J0 between consecutive zeros of J1
    for a, b in zip(z[:-1], z[1:]):
        s = np.linspace(a, b, 200)
        changes = np.count_nonzero(np.diff(np.sign(sf.j0(s))) != 0)
        assert changes == 1


def test_envelope_examples():
    assert sf.j0_envelope(J1_FIRST_ZERO + 1e-9) == pytest.approx(abs(J0_AT_J1_FIRST_ZERO),
                                                                abs=1e-10)
    v = sf.j0_envelope(J1_ZERO_248 + 1e-9)
    assert v <= 0.0286
    assert v == pytest.approx(J0_AT_J1_ZERO_248, abs=1e-10)
    with pytest.raises(DomainError):
        sf.j0_envelope(3.0)


def test_envelope_monotone_and_dominating():
    u = np.linspace(4.0, 2000.0, 5000)
    env = sf.j0_envelope(u)
    assert np.all(np.diff(env) <= 0)
    rng = np.random.default_rng(11)
    for start in (4.0, 50.0, 780.0):
        e = sf.j0_envelope(start)
        s = start + rng.uniform(0, 5000.0, 1000)
        assert np.all(np.abs(sf.j0(s)) <= e)
        # also the stretch just after the zero, where |J0| is near its extremum
        s = np.linspace(start, start + 10, 1000)
        assert np.all(np.abs(sf.j0(s)) <= e)
