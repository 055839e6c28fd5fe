import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdsas.beamforming import (
    RX,
    TX,
    Sense,
    beampattern,
    degradation_db,
    directivity,
    feasible_window,
    first_null_beamwidth,
    is_feasible,
    phase_response,
    steering_vector,
    write_beampattern_csv,
)

angles = st.floats(1.0, 179.0)
sizes = st.sampled_from([4, 8])


def test_phase_response_examples():
    assert np.allclose(phase_response("dl", 4, 90, 0.5).entries, 1)
    assert np.allclose(phase_response("dl", 2, 60, 0.5).entries, [1, cmath.exp(-1j * math.pi / 2)])


@given(sizes, angles)
def test_ul_is_conjugate_of_dl(M, theta):
    dl = phase_response("dl", M, theta, 0.5).entries
    ul = phase_response("ul", M, theta, 0.5).entries
    assert np.allclose(np.conj(dl), ul)
    assert np.allclose(np.abs(dl), 1)


def test_steering_examples():
    assert np.allclose(steering_vector(TX, 4, 90, 0.5).weights, 0.5)
    w = steering_vector(RX, 4, 60, 0.5).weights
    assert np.allclose(w, [0.5 * cmath.exp(-1j * math.pi * m / 2) for m in range(4)])


@given(sizes, angles, st.sampled_from(["tx", "rx"]), st.floats(0.1, 2.0))
def test_steering_unit_norm(M, theta, sense, d):
    w = steering_vector(sense, M, theta, d).weights
    assert np.linalg.norm(w) == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(np.abs(w), 1 / math.sqrt(M))


def test_directivity_examples():
    for M in (4, 8):
        for sense in (TX, RX):
            assert directivity(phase_response(sense, M, 105, 0.5), steering_vector(sense, M, 105, 0.5)) == pytest.approx(M)
    assert directivity(phase_response(TX, 4, 90, 0.5), steering_vector(TX, 4, 60, 0.5)) == pytest.approx(0, abs=1e-25)


def test_directivity_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        directivity(phase_response(TX, 4, 90), steering_vector(TX, 8, 90))


@given(sizes, angles, angles, st.sampled_from(["tx", "rx"]))
def test_directivity_bounds(M, theta, steer, sense):
    g = directivity(phase_response(sense, M, theta), steering_vector(sense, M, steer))
    assert -1e-12 <= g <= M * (1 + 1e-12)


@settings(max_examples=50)
@given(sizes, st.floats(20, 160), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_directivity_depends_on_cos_difference(M, theta, du, shift):
    # move both directions by the same cos offset
    c0, c1 = math.cos(math.radians(theta)), math.cos(math.radians(theta)) + du
    c2, c3 = c0 + shift, c1 + shift
    if not all(-0.999 < c < 0.999 for c in (c1, c2, c3)):
        return
    deg = [math.degrees(math.acos(c)) for c in (c0, c1, c2, c3)]
    a = directivity(phase_response(TX, M, deg[0]), steering_vector(TX, M, deg[1]))
    b = directivity(phase_response(TX, M, deg[2]), steering_vector(TX, M, deg[3]))
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_degradation_examples():
    assert degradation_db(phase_response(TX, 4, 90), steering_vector(TX, 4, 90)) == pytest.approx(0, abs=1e-9)
    assert degradation_db(phase_response(TX, 4, 90), steering_vector(TX, 4, 60)) == math.inf
    # Dirichlet closed form |sin(M x)/sin(x)|^2 / M at x = pi d (cos100 - cos90), frozen
    assert degradation_db(phase_response(TX, 4, 90), steering_vector(TX, 4, 100)) == pytest.approx(
        1.689395504715642, abs=1e-10
    )


@given(sizes, angles, st.sampled_from(["tx", "rx"]))
def test_zero_degradation_on_target(M, theta, sense):
    assert abs(degradation_db(phase_response(sense, M, theta), steering_vector(sense, M, theta))) < 1e-9


def test_window_against_dense_scan():
    # edges from a 0.001 deg scan of the closed-form kernel (first/last feasible grid points)
    w = feasible_window(TX, 4, 90, 0.5, 2.0)
    assert not w.clamped
    assert 79.155 <= w.lo <= 79.156
    assert 100.844 <= w.hi <= 100.845
    w8 = feasible_window(RX, 8, 90, 0.5, 2.0)
    assert 84.720 <= w8.lo <= 84.721
    assert 95.279 <= w8.hi <= 95.280


def test_window_collapses():
    w = feasible_window(TX, 4, 70, 0.5, 1e-12)
    assert w.lo == pytest.approx(70, abs=1e-5) and w.hi == pytest.approx(70, abs=1e-5)


def test_window_clamped_near_endfire():
    w = feasible_window(TX, 4, 15, 0.5, 2.0)
    assert w.clamped and w.lo == 0.0
    w = feasible_window(TX, 4, 165, 0.5, 2.0)
    assert w.clamped and w.hi == 180.0


def test_window_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        feasible_window(TX, 4, 90, 0.5, 0.0)


@settings(max_examples=40, deadline=None)
@given(sizes, st.floats(5, 175), st.floats(0.1, 6.0), st.sampled_from(["tx", "rx"]))
def test_window_properties(M, theta, eps, sense):
    w = feasible_window(sense, M, theta, 0.5, eps)
    assert w.lo <= theta <= w.hi
    for a in np.linspace(w.lo, w.hi, 41):
        assert is_feasible(sense, M, theta, a, eps)
    if not w.clamped:
        c = math.cos(math.radians(theta))
        lo_side = math.cos(math.radians(w.lo)) - c
        hi_side = math.cos(math.radians(w.hi)) - c
        assert lo_side == pytest.approx(-hi_side, abs=1e-7)


def test_beampattern_peak_and_cos_symmetry():
    for M in (4, 8):
        f = steering_vector(TX, M, 60)
        pattern = beampattern(f, [60.0])
        assert pattern[0, 1] == pytest.approx(10 * math.log10(M))
    f = steering_vector(TX, 4, 90)
    p = beampattern(f, [30.0, 330.0])
    assert p[0, 1] == pytest.approx(p[1, 1])


def test_pattern_sense_matches():
    f = steering_vector(RX, 8, 45)
    assert beampattern(f, [45.0])[0, 1] == pytest.approx(10 * math.log10(8))


def test_lin8_narrower_than_lin4():
    grid = np.arange(1, 1800) * 0.1
    for steer in (45, 75, 105, 135):
        w4 = first_null_beamwidth(beampattern(steering_vector(TX, 4, steer), grid), steer)
        w8 = first_null_beamwidth(beampattern(steering_vector(TX, 8, steer), grid), steer)
        assert w8 < w4


def test_first_null_beamwidth_broadside():
    grid = np.arange(1, 18000) * 0.01
    w = first_null_beamwidth(beampattern(steering_vector(TX, 4, 90), grid), 90)
    # nulls at cos = +-1/(M d) = +-0.5, i.e. 60 and 120 deg
    assert w == pytest.approx(60.0, abs=0.02)


def test_beampattern_csv(tmp_path):
    path = tmp_path / "bp.csv"
    write_beampattern_csv(path, beampattern(steering_vector(TX, 4, 90), [10.0, 90.0]))
    lines = path.read_text().splitlines()
    assert lines[0] == "angle_deg,gain_db"
    assert len(lines) == 3


def test_sense_aliases():
    assert Sense.parse("tx") is Sense.DL and Sense.parse("RX") is Sense.UL
