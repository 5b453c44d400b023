"""Minimal-norm extension solvers.

Jets at the origin of the disk are extended by two independent routes: a
direct constrained quadratic minimization through the representers of the
derivative functionals, and the level-by-level recursion through the
orthogonal ladder E_0 > E_1 > ... (these must agree; that cross-check is the
module's central test).  Boundary data on the cross {z1 z2 = 0} in the bidisk
is extended by a Schur-complement solve with the data coefficients pinned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, EvaluationError, ParameterError
from .bergman import (
    _solve_hermitian,
    bergman_metric_at_zero,
    higher_kernel,
    log_kernel_gradient_at_zero,
    unit_ek,
)
from .quadrature import disk_rule


@dataclass(frozen=True)
class Jet:
    """Prescribed derivatives (a_0, ..., a_{N-1}) at the origin."""

    values: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1:
            raise ParameterError("a jet needs at least one value")

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class CrossData:
    """Pair (f1, f2) of one-variable coefficient vectors on the cross, with
    the compatibility f1(0) = f2(0) enforced at construction."""

    f1: tuple
    f2: tuple

    def __post_init__(self):
        f1 = tuple(complex(v) for v in (self.f1 or (0.0,)))
        f2 = tuple(complex(v) for v in (self.f2 or (0.0,)))
        if f1[0] != f2[0]:
            raise ParameterError(
                "cross data incompatible: f1(0)=%r != f2(0)=%r" % (f1[0], f2[0]))
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    @property
    def a0(self):
        return self.f1[0]


@dataclass
class ExtensionReport:
    coefficients: np.ndarray
    monomials: list
    norm_sq: float
    levels: list = field(default_factory=list)       # (k, b_k, B_k(0), |h_k|^2)
    cross_parts: tuple | None = None                 # (|h0|^2, |h1|^2)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "monomials": [list(m) if isinstance(m, tuple) else m for m in self.monomials],
            "norm_sq": self.norm_sq,
            "levels": [
                {"k": k, "b_k": [b.real, b.imag], "B_k": B, "h_k_norm_sq": h}
                for (k, b, B, h) in self.levels
            ],
            "cross_parts": list(self.cross_parts) if self.cross_parts else None,
            "diagnostics": self.diagnostics,
        }


def _jet_constraints(model, jet):
    N = len(jet)
    if model.domain != "disk":
        raise ParameterError("jet extension lives on the disk")
    if N > model.degree + 1:
        raise ParameterError(
            "jet length %d exceeds degree+1 = %d" % (N, model.degree + 1))
    C = np.zeros((N, len(model.monomials)), dtype=complex)
    for k in range(N):
        C[k, model.index[k]] = math.factorial(k)
    return C, np.array(jet.values, dtype=complex)


def _level_breakdown(model, coeffs, N):
    """Project a solution onto the one-dimensional ladders E_k (-) E_{k+1}."""
    levels = []
    hs = []
    for k in range(N):
        ek = unit_ek(model, k)
        ekk0 = math.factorial(k) * ek[model.index[k]]
        Bk = abs(ekk0) ** 2
        amp = complex(np.vdot(ek, model.gram @ coeffs))  # <h, e_k>_G
        hk = amp * ek
        bk = complex(ekk0 * amp)  # h_k^{(k)}(0)
        hs.append(hk)
        levels.append((k, bk, float(Bk), float(abs(amp) ** 2)))
    return levels


def extend_jet_direct(model, jet):
    """Norm-minimal coefficient vector under the derivative constraints,
    via the N x N Hermitian representer Gram system."""
    C, a = _jet_constraints(model, jet)
    X = _solve_hermitian(model.gram, C.conj().T)     # representers
    M = C @ X
    M = 0.5 * (M + M.conj().T)
    try:
        lam = np.linalg.solve(M, a)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError(
            "representer Gram singular: the weight's multiplier ideal kills "
            "the jet") from exc
    coeffs = X @ lam
    norm_sq = float(np.real(np.vdot(a, lam)))
    resid = float(np.abs(C @ coeffs - a).max())
    report = ExtensionReport(
        coefficients=coeffs,
        monomials=model.monomials,
        norm_sq=norm_sq,
        levels=_level_breakdown(model, coeffs, len(jet)),
        diagnostics={
            "solver": "direct",
            "constraint_residual": resid,
            "gram_condition": model.condition_number,
        },
    )
    return report


def extend_jet_recursive(model, jet):
    """Level-by-level construction: b_k = a_k - sum_{j<k} h_j^{(k)}(0) and
    h_k = (b_k / e_k^{(k)}(0)) e_k; the total norm is sum |b_k|^2 / B_k(0)."""
    C, a = _jet_constraints(model, jet)
    N = len(jet)
    coeffs = np.zeros(len(model.monomials), dtype=complex)
    hs = []
    levels = []
    norm_sq = 0.0
    for k in range(N):
        ek = unit_ek(model, k)
        ekk0 = math.factorial(k) * ek[model.index[k]]
        Bk = abs(ekk0) ** 2
        if Bk <= 0:
            raise DegeneracyError("e_k^{(k)}(0) vanished at level %d" % k)
        bk = a[k] - sum(math.factorial(k) * h[model.index[k]] for h in hs)
        hk = (bk / ekk0) * ek
        hs.append(hk)
        coeffs = coeffs + hk
        contrib = abs(bk) ** 2 / Bk
        norm_sq += contrib
        levels.append((k, complex(bk), float(Bk), float(contrib)))
    resid = float(np.abs(C @ coeffs - a).max())
    return ExtensionReport(
        coefficients=coeffs,
        monomials=model.monomials,
        norm_sq=float(norm_sq),
        levels=levels,
        diagnostics={
            "solver": "recursive",
            "constraint_residual": resid,
            "gram_condition": model.condition_number,
        },
    )


def rhs_estimate_jet(model, jet):
    """Right-hand sides of the two-jet estimate.

    exact  = (|a0|^2 + |a1 - a0 g|^2_{omega_B}) / B_0(0)  (an identity for
             length-2 jets), with g = e_0'(0)/e_0(0);
    ot     = the same bracket times e^{-phi(0)}.
    """
    if len(jet) != 2:
        raise ParameterError("the two-term estimate needs a length-2 jet")
    if model.degree < 1:
        raise ParameterError("degree must be >= 1")
    a0, a1 = jet.values
    g = log_kernel_gradient_at_zero(model)
    omega = bergman_metric_at_zero(model)
    b0 = higher_kernel(model, 0)
    bracket = abs(a0) ** 2 + abs(a1 - a0 * g) ** 2 / omega
    phi0 = float(model.weight.evaluate(np.array(0.0 + 0.0j)))
    return {
        "exact": float(bracket / b0),
        "ot": float(bracket * np.exp(-phi0)),
        "gradient": g,
        "omega_B": float(omega),
        "B0": float(b0),
        "phi0": phi0,
    }


def _cross_fixed_vector(model, cross):
    D = model.degree
    if len(cross.f1) > D + 1 or len(cross.f2) > D + 1:
        raise ParameterError(
            "cross data degree exceeds the truncation degree %d; "
            "refusing to truncate silently" % D)
    fixed_idx = []
    fixed_val = []
    for n in range(D + 1):
        fixed_idx.append(model.index[(0, n)])
        fixed_val.append(cross.f1[n] if n < len(cross.f1) else 0.0)
    for m in range(1, D + 1):
        fixed_idx.append(model.index[(m, 0)])
        fixed_val.append(cross.f2[m] if m < len(cross.f2) else 0.0)
    free_idx = [i for i, (m, n) in enumerate(model.monomials) if m >= 1 and n >= 1]
    return fixed_idx, np.array(fixed_val, dtype=complex), free_idx


def extend_cross(model, cross):
    """Minimal-norm extension of cross data: boundary coefficients pinned,
    interior coefficients from the Schur-complement solve."""
    if model.domain != "bidisk":
        raise ParameterError("cross extension needs a bidisk model")
    F, cF, R = _cross_fixed_vector(model, cross)
    G = model.gram
    coeffs = np.zeros(len(model.monomials), dtype=complex)
    coeffs[F] = cF
    if R:
        GRR = G[np.ix_(R, R)]
        GRF = G[np.ix_(R, F)]
        try:
            cR = _solve_hermitian(GRR, -(GRF @ cF))
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError("free-block Gram singular") from exc
        coeffs[R] = cR
        stationarity = float(np.abs((G @ coeffs)[R]).max())
    else:
        stationarity = 0.0
    norm_sq = float(np.real(np.vdot(coeffs, G @ coeffs)))
    h0, h1, parts = _cross_decomposition(model, cross, coeffs)
    report = ExtensionReport(
        coefficients=coeffs,
        monomials=model.monomials,
        norm_sq=norm_sq,
        cross_parts=parts,
        diagnostics={
            "solver": "cross-schur",
            "stationarity_residual": stationarity,
            "gram_condition": model.condition_number,
            "pythagoras_rel_defect": abs(norm_sq - (parts[0] + parts[1]))
            / max(norm_sq, 1e-300),
        },
    )
    return report


def _cross_decomposition(model, cross, coeffs):
    e0 = unit_ek(model, 0)
    e00 = e0[model.index[(0, 0)]]
    h0 = (cross.a0 / e00) * e0 if e00 != 0 else np.zeros_like(e0)
    h1 = coeffs - h0
    G = model.gram
    n0 = float(np.real(np.vdot(h0, G @ h0)))
    n1 = float(np.real(np.vdot(h1, G @ h1)))
    return h0, h1, (n0, n1)


def decompose_cross(model, cross):
    """(h0, h1) with h0 = (a0/e_0(0)) e_0 and h1 the remainder of the
    minimal extension; |h|^2 = |h0|^2 + |h1|^2 by orthogonality."""
    rep = extend_cross(model, cross)
    h0, h1, parts = _cross_decomposition(model, cross, rep.coefficients)
    return h0, h1, rep


def branch_restriction(model, coeffs, branch):
    """One-variable coefficients of a bidisk coefficient vector on V_1/V_2."""
    D = model.degree
    out = np.zeros(D + 1, dtype=complex)
    for n in range(D + 1):
        key = (0, n) if branch == 1 else (n, 0)
        out[n] = coeffs[model.index[key]]
    return out


def rhs_estimate_cross(model, cross, rule_on_V=None, tol=1e-8):
    """|a0|^2/B_0(0) plus the V-integral of |f - h0|^2/|z|^2 e^{-phi},
    computed branch by branch as one-variable disk integrals."""
    if model.domain != "bidisk":
        raise ParameterError("needs a bidisk model")
    if rule_on_V is None:
        rule_on_V = disk_rule(radial_order=32, angular_order=64, grading_levels=14)
    b0 = higher_kernel(model, 0)
    term0 = abs(cross.a0) ** 2 / b0
    e0 = unit_ek(model, 0)
    e00 = e0[model.index[(0, 0)]]
    h0 = (cross.a0 / e00) * e0 if e00 != 0 else np.zeros_like(e0)
    total_v = 0.0
    parts = []
    for branch, data in ((1, cross.f1), (2, cross.f2)):
        h0b = branch_restriction(model, h0, branch)
        diff = np.zeros(model.degree + 1, dtype=complex)
        diff[: len(data)] = data
        diff -= h0b
        scale = max(np.abs(diff).max(), 1.0)
        if abs(diff[0]) > tol * scale:
            raise EvaluationError(
                "V-integral divergent on branch %d: (f - h0)(0) = %r does not "
                "vanish within tolerance" % (branch, diff[0]))
        q = diff[1:]  # (f - h0)/z, the singularity is removable
        wb = model.weight.restrict_to_branch(branch)
        phi = np.asarray(wb.evaluate(rule_on_V.nodes), dtype=float)
        qv = np.polynomial.polynomial.polyval(rule_on_V.nodes, q) if q.size else 0.0
        val = float(np.dot(rule_on_V.weights, np.abs(qv) ** 2 * np.exp(-phi)))
        parts.append(val)
        total_v += val
    return {
        "total": float(term0 + total_v),
        "a0_term": float(term0),
        "v_integral": float(total_v),
        "v_parts": parts,
        "B0": float(b0),
    }
