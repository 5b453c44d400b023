"""Norm functionals on the cross geometry.

Three families of quadratic functionals evaluated on the model:

* ``log_weighted_bulk_norm`` -- the bulk integral with the
  1/(|z1 z2|^2 log^2|z1|^2 log^2|z2|^2) density,
* ``gamma_branch_norm``      -- the branch integrals with exponent 2/(1+gamma),
* ``derivative_norm_on_Y``   -- the twisted-derivative integral with the
  log^2(max |z_j|^2) factor.

Divergent integrals are reported as a tagged +inf (:class:`DivergentNorm`)
carrying the observed growth rate under mesh refinement, never as a raw
overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ParameterError
from .quadrature import bidisk_rule, disk_rule
from .weights import RegularizedLogWeight, twisted_derivative

_KINDS = ("log_weighted_bulk", "gamma_branch", "derivative_on_Y", "final_example")


class DivergentNorm(float):
    """+inf tagged with the observed per-refinement-level growth rate."""

    def __new__(cls, growth_rate):
        out = float.__new__(cls, float("inf"))
        out.growth_rate = float(growth_rate)
        return out

    def __repr__(self):
        return "DivergentNorm(growth_rate=%g)" % self.growth_rate


@dataclass(frozen=True)
class NormSpec:
    """Which functional, with which parameters.

    ``section_normalization`` (delta) replaces |z_j|^2 by e^{-delta}|z_j|^2
    inside the squared logs of the bulk density; delta > 0 keeps the density
    integrable up to the boundary.  ``conic_k`` optionally multiplies branch
    integrands by the conic density |z|^{-2(1-1/k)}.
    """

    kind: str
    gamma: float = 0.0
    epsilon: float | None = None
    region: str = "full"
    r_sing: float = 0.1
    sections: tuple = ("z1", "z2")
    section_normalization: float = 1.0
    conic_k: int | None = None
    variant: str = "theorem"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError("unknown functional kind %r" % self.kind)
        if not (0.0 <= self.gamma <= 1.0):
            raise ParameterError("gamma must lie in [0,1], got %r" % self.gamma)
        if self.region not in ("full", "exclude_sing"):
            raise ParameterError("region must be 'full' or 'exclude_sing'")
        if not (0.0 < self.r_sing < 1.0):
            raise ParameterError("r_sing must lie in (0,1), got %r" % self.r_sing)
        if self.variant not in ("theorem", "conjecture"):
            raise ParameterError("variant must be 'theorem' or 'conjecture'")
        if self.conic_k is not None and self.conic_k not in (2, 3):
            raise ParameterError("conic_k must be 2 or 3 when given")


def _vanishes_on_cross(U):
    return not (np.abs(U[0, :]).max() > 0 or np.abs(U[:, 0]).max() > 0)


def log_weighted_bulk_norm(U, weight, spec=None, rule=None):
    """int |U|^2 / (|z1 z2|^2 log^2(e^{-d}|z1|^2) log^2(e^{-d}|z2|^2)) e^{-phi}.

    ``U`` is a 2-D coefficient array (U[m,n] multiplies z1^m z2^n).  When U
    vanishes on the cross the |z1 z2|^2 is divided out exactly; otherwise the
    singular integrand is only integrable away from the cross, so the region
    must exclude it (``region='exclude_sing'``).
    """
    if spec is None:
        spec = NormSpec("log_weighted_bulk")
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    if not np.abs(U).max():
        return 0.0
    if rule is None:
        rule = bidisk_rule(radial_order=(24, 24), angular_order=(48, 48),
                           grading_levels=14)
    delta = float(spec.section_normalization)
    divisible = _vanishes_on_cross(U)
    if not divisible and spec.region != "exclude_sing":
        raise EvaluationError(
            "U does not vanish on the cross: the bulk density is "
            "non-integrable on the full domain; use region='exclude_sing'")
    if divisible:
        Q = U[1:, 1:]

        def f(z1, z2):
            q = np.polynomial.polynomial.polyval2d(z1, z2, Q) if Q.size else 0.0
            den = (np.log(np.abs(z1) ** 2) - delta) ** 2 \
                * (np.log(np.abs(z2) ** 2) - delta) ** 2
            phi = np.asarray(weight.evaluate(z1, z2), dtype=float)
            return np.abs(q) ** 2 / den * np.exp(-phi)
    else:
        r0 = spec.r_sing

        def f(z1, z2):
            keep = (np.abs(z1) > r0) & (np.abs(z2) > r0)
            u = np.polynomial.polynomial.polyval2d(z1, z2, U)
            den = np.abs(z1 * z2) ** 2 \
                * (np.log(np.abs(z1) ** 2) - delta) ** 2 \
                * (np.log(np.abs(z2) ** 2) - delta) ** 2
            phi = np.asarray(weight.evaluate(z1, z2), dtype=float)
            vals = np.where(keep, np.abs(u) ** 2 / np.where(keep, den, 1.0), 0.0)
            return vals * np.exp(-np.where(keep, phi, 0.0))

    return float(np.real(rule.integrate(f)))


def _branch_integral(u, weight, power, w_exponent, conic_k, rule):
    """int |f(z)/z|^{power} e^{-w_exponent*phi} [|z|^{-2(1-1/k)}] dlam."""
    c = np.asarray(u, dtype=complex)

    def f(z):
        fv = np.polynomial.polynomial.polyval(z, c)
        a = np.abs(z)
        vals = (np.abs(fv) / a) ** power
        phi = np.asarray(weight.evaluate(z), dtype=float)
        vals = vals * np.exp(-w_exponent * phi)
        if conic_k:
            vals = vals * a ** (-2.0 * (1.0 - 1.0 / conic_k))
        return vals

    return float(np.real(rule.integrate(f)))


def gamma_branch_norm(u, weight, gamma=0.0, variant="theorem", rule=None,
                      conic_k=None):
    """(int_branch |f(z)/z|^{2/(1+gamma)} w dlam)^{1+gamma} with
    w = e^{-phi/(1+gamma)} (theorem) or e^{-phi} (conjecture).

    Divergence (e.g. f(0) != 0 at gamma=0 with a singular-enough weight) is
    detected by grading refinement and reported as :class:`DivergentNorm`.
    """
    if not (0.0 <= gamma <= 1.0):
        raise ParameterError("gamma must lie in [0,1], got %r" % gamma)
    if variant not in ("theorem", "conjecture"):
        raise ParameterError("variant must be 'theorem' or 'conjecture'")
    c = np.asarray(u, dtype=complex)
    if c.size == 0 or not np.abs(c).max():
        return 0.0
    power = 2.0 / (1.0 + gamma)
    w_exp = 1.0 / (1.0 + gamma) if variant == "theorem" else 1.0
    if rule is not None:
        return float(_branch_integral(u, weight, power, w_exp, conic_k, rule)
                     ** (1.0 + gamma))
    base_levels = 18
    r1 = disk_rule(radial_order=32, angular_order=64, grading_levels=base_levels)
    r2 = disk_rule(radial_order=32, angular_order=64, grading_levels=base_levels + 6)
    i1 = _branch_integral(u, weight, power, w_exp, conic_k, r1)
    i2 = _branch_integral(u, weight, power, w_exp, conic_k, r2)
    if i2 > i1 and (i2 - i1) > 0.05 * abs(i2):
        # growth per geometric refinement level toward the branch origin
        return DivergentNorm((i2 - i1) / 6.0)
    return float(i2 ** (1.0 + gamma))


def derivative_norm_on_Y(data, weight, rule=None, include_log=True):
    """sum_i int_{V_i} log^2(max|z_j|^2) |d^phi f_i|^2 e^{-phi} dlam.

    ``data`` is :class:`~bergext.extension.CrossData`; on branch V_i the max
    over the two coordinate sections reduces to |z|^2 of the branch variable.
    With ``include_log=False`` the bare twisted-derivative integral is
    returned.
    """
    if rule is None:
        rule = disk_rule(radial_order=32, angular_order=64, grading_levels=16)
    total = 0.0
    parts = []
    for branch, coeffs in ((1, data.f1), (2, data.f2)):
        c = np.asarray(coeffs, dtype=complex)
        if not c.size or not np.abs(c).max():
            parts.append(0.0)
            continue
        wb = weight.restrict_to_branch(branch) if weight.domain == "bidisk" else weight
        td = twisted_derivative(wb, c, rule.nodes)
        td2 = np.abs(td) ** 2
        phi = np.asarray(wb.evaluate(rule.nodes), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.where(td2 == 0.0, 0.0, td2 * np.exp(-phi))
        if include_log:
            vals = vals * np.log(np.abs(rule.nodes) ** 2) ** 2
        if not np.all(np.isfinite(vals)):
            raise EvaluationError(
                "twisted-derivative integrand non-finite on branch %d" % branch)
        val = float(np.dot(rule.weights, vals))
        parts.append(val)
        total += val
    return total


def final_example_norm(epsilon, u=(0.0, 1.0), rule=None):
    """The compact-analogue branch integral with the shifted regularization:
    for f = z this is exactly int_disk dlam/(eps^2+|z|^2)."""
    w = RegularizedLogWeight(epsilon, "z", style="shifted")
    return gamma_branch_norm(u, w, gamma=0.0, variant="conjecture", rule=rule)


def evaluate_norm(spec, data, weight=None, rule=None):
    """Dispatch a NormSpec to the matching evaluator (CLI entry point)."""
    if spec.kind == "log_weighted_bulk":
        if weight is None:
            raise ParameterError("log_weighted_bulk needs a bidisk weight")
        return log_weighted_bulk_norm(np.asarray(data, dtype=complex), weight,
                                      spec, rule)
    if spec.kind == "gamma_branch":
        if weight is None:
            raise ParameterError("gamma_branch needs a branch weight")
        return gamma_branch_norm(data, weight, spec.gamma, spec.variant, rule,
                                 spec.conic_k)
    if spec.kind == "derivative_on_Y":
        if weight is None:
            raise ParameterError("derivative_on_Y needs a bidisk weight")
        return derivative_norm_on_Y(data, weight, rule)
    if spec.kind == "final_example":
        if spec.epsilon is None:
            raise ParameterError("final_example needs epsilon")
        return final_example_norm(spec.epsilon, data, rule)
    raise ParameterError("unknown functional kind %r" % spec.kind)
