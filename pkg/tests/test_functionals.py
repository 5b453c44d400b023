import math

import numpy as np
import pytest

from bergext import CrossData, RegularizedLogWeight, Weight
from bergext.errors import EvaluationError, ParameterError
from bergext.functionals import (
    DivergentNorm,
    NormSpec,
    derivative_norm_on_Y,
    evaluate_norm,
    final_example_norm,
    gamma_branch_norm,
    log_weighted_bulk_norm,
)
from bergext.quadrature import disk_rule


def test_norm_spec_validation():
    with pytest.raises(ParameterError):
        NormSpec("nope")
    with pytest.raises(ParameterError):
        NormSpec("gamma_branch", gamma=1.5)
    with pytest.raises(ParameterError):
        NormSpec("gamma_branch", r_sing=1.5)
    with pytest.raises(ParameterError):
        NormSpec("gamma_branch", variant="other")


def test_bulk_norm_divisible_oracle():
    # U = z1 z2, phi = 0: the integral factors into two identical disk
    # integrals of 1/log^2(e^{-1}|z|^2)
    U = np.zeros((2, 2), complex)
    U[1, 1] = 1.0
    val = log_weighted_bulk_norm(U, Weight.zero("bidisk"))
    r = disk_rule(48, 8, grading_levels=24)
    one = float(np.dot(r.weights,
                       1.0 / (np.log(np.abs(r.nodes) ** 2) - 1.0) ** 2))
    assert val == pytest.approx(one**2, rel=1e-6)


def test_bulk_norm_zero_and_homogeneity():
    U = np.zeros((2, 2), complex)
    assert log_weighted_bulk_norm(U, Weight.zero("bidisk")) == 0.0
    U[1, 1] = 1.0
    v1 = log_weighted_bulk_norm(U, Weight.zero("bidisk"))
    v2 = log_weighted_bulk_norm(2 * U, Weight.zero("bidisk"))
    assert v2 == pytest.approx(4 * v1, rel=1e-12)


def test_bulk_norm_nondivisible_guard():
    U = np.zeros((2, 2), complex)
    U[0, 0] = 1.0
    with pytest.raises(EvaluationError):
        log_weighted_bulk_norm(U, Weight.zero("bidisk"))
    spec = NormSpec("log_weighted_bulk", region="exclude_sing", r_sing=0.3)
    val = log_weighted_bulk_norm(U, Weight.zero("bidisk"), spec)
    assert np.isfinite(val) and val > 0


def test_gamma_branch_closed_forms():
    w0 = Weight.zero()
    # gamma = 1, f = z: (int 1 dlam)^2 = pi^2
    assert gamma_branch_norm((0, 1), w0, gamma=1.0) == pytest.approx(
        math.pi**2, rel=1e-10)
    # gamma = 0, f = z: int 1 = pi
    assert gamma_branch_norm((0, 1), w0, gamma=0.0) == pytest.approx(
        math.pi, rel=1e-10)
    assert gamma_branch_norm((0, 0), w0, gamma=0.5) == 0.0


def test_gamma_branch_divergence_tagged():
    val = gamma_branch_norm((1.0,), Weight.point_log(1.0), gamma=0.0,
                            variant="conjecture")
    assert isinstance(val, DivergentNorm)
    assert math.isinf(val) and val.growth_rate > 0


def test_final_example_rate():
    for eps in (0.1, 0.05):
        exact = math.pi * math.log(1 + 1 / eps**2)
        assert final_example_norm(eps) == pytest.approx(exact, rel=1e-10)


def test_holder_continuity_in_gamma():
    # normalized test family: conjecture variant against the mass-1 measure
    # e^{-log pi} dlam, data f = z (1 + z/2)
    w = Weight([], "log(pi)", "disk")
    u = (0.0, 1.0, 0.5)
    vals = [gamma_branch_norm(u, w, gamma=g, variant="conjecture")
            for g in (0.0, 0.25, 0.5, 1.0)]
    for a, b in zip(vals, vals[1:]):
        assert abs(b - a) <= 0.2 * max(a, b)


def test_derivative_norm_exact_diagonal_vanishes():
    cd = CrossData((0.0,), (0.0, 1.0))
    val = derivative_norm_on_Y(cd, Weight.diagonal_log(), include_log=False)
    assert val == pytest.approx(0.0, abs=1e-20)


def test_derivative_norm_regularized_bounded():
    cd = CrossData((0.0,), (0.0, 1.0))
    vals = [derivative_norm_on_Y(cd, RegularizedLogWeight(e, "z1-z2"),
                                 include_log=False)
            for e in (0.2, 0.1, 0.05, 0.025)]
    assert max(vals) <= 2.0 * min(vals)
    with_log = derivative_norm_on_Y(cd, RegularizedLogWeight(0.1, "z1-z2"))
    assert with_log > vals[1]  # the log^2 factor only adds weight


def test_derivative_norm_zero_data():
    cd = CrossData((0.0,), (0.0,))
    assert derivative_norm_on_Y(cd, Weight.diagonal_log()) == 0.0


def test_quadratic_homogeneity_branch():
    w0 = Weight.zero()
    v1 = gamma_branch_norm((0, 1, 2), w0, gamma=0.5)
    v2 = gamma_branch_norm((0, 2, 4), w0, gamma=0.5)
    assert v2 == pytest.approx(4 * v1, rel=1e-10)


def test_conic_density_knob():
    w0 = Weight.zero()
    base = gamma_branch_norm((0, 1), w0, gamma=0.0)
    conic = gamma_branch_norm((0, 1), w0, gamma=0.0, conic_k=2)
    # |z|^{-1} density increases the integral: int |z|^{-1} = 2pi
    assert conic == pytest.approx(2 * math.pi, rel=1e-8)
    assert conic > base


def test_evaluate_norm_dispatch():
    spec = NormSpec("final_example", epsilon=0.1)
    assert evaluate_norm(spec, (0.0, 1.0)) == pytest.approx(
        math.pi * math.log(1 + 100.0), rel=1e-10)
    with pytest.raises(ParameterError):
        evaluate_norm(NormSpec("final_example"), (0.0, 1.0))
    with pytest.raises(ParameterError):
        evaluate_norm(NormSpec("gamma_branch"), (0.0, 1.0))
