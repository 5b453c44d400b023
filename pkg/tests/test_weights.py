import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bergext import (
    CutoffFamily,
    EvaluationError,
    ParameterError,
    RegularizedLogWeight,
    Weight,
    clamp_max,
    twisted_derivative,
)
from bergext.weights import sampled_laplacian_min


def test_zero_weight():
    w = Weight.zero()
    z = np.array([0.1 + 0.2j, -0.5j])
    assert np.allclose(w.evaluate(z), 0.0)
    assert np.allclose(w.d_holomorphic(z), 0.0)


def test_halfplane_values_and_derivative():
    w = Weight.halfplane(3.0)
    z = np.array([0.25 - 0.1j, 0.4 + 0.4j])
    assert np.allclose(w.evaluate(z), -6.0 * z.real)
    # d/dz of -2m Re z = -m
    assert np.allclose(w.d_holomorphic(z), -3.0)


def test_point_log_sentinel_and_derivative():
    w = Weight.point_log(0.5)
    z = np.array([0.0j, 0.5 + 0.0j])
    vals = w.evaluate(z)
    assert vals[0] == -np.inf
    assert vals[1] == pytest.approx(0.5 * math.log(0.25))
    with pytest.raises(EvaluationError):
        w.d_holomorphic(z)
    assert np.allclose(w.d_holomorphic(np.array([0.5 + 0j])), 0.5 / 0.5)


def test_serialization_roundtrip():
    w = Weight([(0.5, "z**2 - 1/4")], "-2*x + y**2", "disk", subharmonic=True)
    d = w.to_dict()
    w2 = Weight.from_dict(d)
    z = np.array([0.3 + 0.1j, -0.2 + 0.6j])
    assert np.allclose(w.evaluate(z), w2.evaluate(z))
    assert d["domain"] == "disk"
    assert d["log_terms"][0]["r"] == 0.5


def test_bidisk_branch_restriction():
    w = Weight.diagonal_log()
    b2 = w.restrict_to_branch(2)  # {z2=0}: phi = log|z1|^2
    z = np.array([0.5 + 0.1j])
    assert np.allclose(b2.evaluate(z), np.log(np.abs(z) ** 2))
    assert np.allclose(b2.d_holomorphic(z), 1.0 / z)
    b1 = w.restrict_to_branch(1)  # {z1=0}: phi = log|z2|^2, d/dz2 = 1/z2
    assert np.allclose(b1.d_holomorphic(z), 1.0 / z)


def test_clamped_weight_plateau():
    base = Weight.halfplane(4.0)
    w = clamp_max(base, 0.4, 20.0)
    # deep inside the plateau the value is exactly -A and the derivative 0
    r = 0.5 * w.plateau_radius()
    z = np.array([r + 0j, 0.0j])
    assert np.allclose(w.evaluate(z), -20.0)
    assert np.allclose(w.d_holomorphic(z), 0.0)
    # far outside: agrees with phi + eps log|z|^2
    z = np.array([0.5 + 0.2j])
    assert np.allclose(w.evaluate(z),
                       base.evaluate(z) + 0.4 * np.log(np.abs(z) ** 2))


def test_clamp_monotone_in_eps():
    base = Weight.halfplane(2.0)
    z = np.exp(1j * np.linspace(0, 6, 40)) * np.linspace(0.05, 0.95, 40)
    lo = clamp_max(base, 0.1, 8.0).evaluate(z)
    hi = clamp_max(base, 0.3, 8.0).evaluate(z)
    # larger eps makes the log term more negative on |z|<1
    assert np.all(hi <= lo + 1e-12)


def test_regularized_log_convolution():
    eps = 0.2
    w = RegularizedLogWeight(eps, "z")
    inside = np.array([0.1 + 0.0j])
    outside = np.array([0.5 + 0.0j])
    assert w.evaluate(inside)[0] == pytest.approx(
        (0.01 - eps**2) / eps**2 + math.log(eps**2))
    assert w.evaluate(outside)[0] == pytest.approx(math.log(0.25))
    # continuity at |z| = eps
    a = w.evaluate(np.array([eps * (1 - 1e-9) + 0j]))[0]
    b = w.evaluate(np.array([eps * (1 + 1e-9) + 0j]))[0]
    assert a == pytest.approx(b, abs=1e-7)
    # derivative: conj(z)/eps^2 inside, 1/z outside
    assert w.d_holomorphic(inside)[0] == pytest.approx(0.1 / eps**2)
    assert w.d_holomorphic(outside)[0] == pytest.approx(2.0)


def test_regularized_log_shifted():
    w = RegularizedLogWeight(0.1, "z", style="shifted")
    z = np.array([0.3 + 0.4j])
    assert w.evaluate(z)[0] == pytest.approx(math.log(0.01 + 0.25))


def test_twisted_derivative_vanishes_on_exact_log():
    # f = z, phi = log|z|^2 on the branch: df - f/z = 0
    w = RegularizedLogWeight(1e-12, "z")  # effectively log|z|^2 off 0
    z = np.array([0.3 + 0.1j, -0.6 + 0.2j])
    td = twisted_derivative(w, (0.0, 1.0), z)
    assert np.allclose(td, 0.0, atol=1e-12)


def test_twisted_derivative_claim_profile():
    eps = 0.2
    w = RegularizedLogWeight(eps, "z1-z2")
    b2 = w.restrict_to_branch(2)
    inside = np.array([0.1 + 0.0j])
    outside = np.array([0.5 + 0.0j])
    td_in = twisted_derivative(b2, (0.0, 1.0), inside)
    td_out = twisted_derivative(b2, (0.0, 1.0), outside)
    assert td_in[0] == pytest.approx((eps**2 - 0.01) / eps**2)
    assert td_out[0] == pytest.approx(0.0, abs=1e-14)


def test_cutoff_rho_plateau_and_support():
    fam = CutoffFamily("rho_eps", 0.3)
    z = np.array([0.1 + 0j, 0.3 + 0j, 0.5 + 0j])
    vals = fam.evaluate(z)
    assert vals[0] == 1.0          # |z|^2/eps^2 < 1
    assert vals[1] == 1.0          # == 1 boundary of plateau
    assert vals[2] == 0.0          # |z|^2/eps^2 > 2
    g = fam.evaluate(z, mode="grad_sq")
    assert g[0] == 0.0 and g[2] == 0.0


def test_cutoff_xi_decay():
    vals = [CutoffFamily("xi_eps", e).gradient_decay_integral()
            for e in (0.5, 0.25, 0.125, 0.0625)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.5 * vals[0]
    # the decay is exponential in 1/eps
    assert vals[1] / vals[0] == pytest.approx(math.exp(-2.0), rel=1e-6)


def test_cutoff_validation():
    with pytest.raises(ParameterError):
        CutoffFamily("nope", 0.1)
    with pytest.raises(ParameterError):
        CutoffFamily("rho_eps", -1.0)
    with pytest.raises(ParameterError):
        CutoffFamily("rho_eps", 0.1).gradient_decay_integral()


def test_sampled_laplacian_subharmonic():
    assert sampled_laplacian_min(Weight.halfplane(2.0)) > -1e-6
    # the regularized log is only C^1 across |z| = eps; stencils straddling
    # the seam see an O(h) dip, so the tolerance is looser there
    assert sampled_laplacian_min(RegularizedLogWeight(0.3, "z")) > -1e-2


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 2 * math.pi))
def test_cutoff_values_in_unit_interval(r, theta):
    z = np.array([r * np.exp(1j * theta)])
    for fam in (CutoffFamily("rho_eps", 0.3), CutoffFamily("xi_eps", 0.5)):
        v = fam.evaluate(z)[0]
        assert -1e-12 <= v <= 1 + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-4.0, 4.0), st.floats(0.05, 0.9))
def test_weight_roundtrip_eval(m, r):
    w = Weight.halfplane(m)
    w2 = Weight.from_dict(w.to_dict())
    z = np.array([r * np.exp(0.7j)])
    assert np.allclose(w.evaluate(z), w2.evaluate(z))
