"""Truncated weighted Bergman models.

A model discretizes the space of holomorphic functions square-integrable
against e^{-phi}: monomials up to the truncation degree, their Gram matrix
under quadrature, and an orthonormalizing factorization.  All kernel
quantities (B_0(z,w), the higher-order kernels B_k(0), the Bergman metric at
the origin) are linear algebra on the Gram matrix.

The bidisk uses the full tensor grid z1^m z2^n with m,n <= D so that cross
constraints are exactly expressible.  For weights invariant under the
simultaneous rotation (z1,z2) -> (e^{ia}z1, e^{ia}z2) the Gram is computed by
exact angular reduction: entries vanish unless m+n = m'+n', and the surviving
ones are a one-dimensional radial integral of inner-disk moment matrices.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
import sympy as sp

from .errors import COND_LIMIT, DegeneracyError, ParameterError
from .quadrature import BidiskRule, bidisk_rule, disk_rule, refine
from . import weights as wmod


class BergmanModel:
    def __init__(self, domain, weight, degree, monomials, gram, rule):
        self.domain = domain
        self.weight = weight
        self.degree = int(degree)
        self.monomials = monomials
        self.index = {m: i for i, m in enumerate(monomials)}
        self.gram = gram
        self.rule = rule
        self._factorize()

    def _factorize(self):
        G = self.gram
        herm_defect = np.abs(G - G.conj().T).max()
        scale = np.abs(G).max()
        if not np.isfinite(scale) or scale == 0:
            raise DegeneracyError("non-finite Gram matrix", self.monomials)
        if herm_defect > 1e-10 * scale:
            raise DegeneracyError("Gram matrix not Hermitian (defect %.2e)" % herm_defect)
        G = 0.5 * (G + G.conj().T)
        self.gram = G
        d = np.sqrt(np.diag(G).real)
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            bad = [self.monomials[i] for i in np.flatnonzero(~(np.isfinite(d) & (d > 0)))]
            raise DegeneracyError(
                "weight is not integrable against monomials %s" % bad, bad)
        self._scale = d
        Gs = G / d[:, None] / d[None, :]
        lam, U = np.linalg.eigh(Gs)
        self.min_eigenvalue = float(lam[0] * np.min(d) ** 2)  # crude lower scale
        if lam[0] <= 0 or not np.isfinite(lam[-1]):
            raise DegeneracyError(
                "Gram matrix numerically singular (min eigenvalue %.3e); "
                "lower the degree or change the quadrature grading" % lam[0])
        self.condition_number = float(lam[-1] / lam[0])
        if self.condition_number > COND_LIMIT:
            raise DegeneracyError(
                "Gram condition number %.3e exceeds %.0e; lower the degree or "
                "change the quadrature grading" % (self.condition_number, COND_LIMIT))
        # orthonormal basis in monomial coordinates: columns of E
        E = (U / np.sqrt(lam)[None, :]) / d[:, None]
        # deterministic sign fix and ordering (leading monomial, then weight)
        lead = np.argmax(np.abs(E), axis=0)
        order = np.lexsort((-lam, lead))
        E = E[:, order]
        for j in range(E.shape[1]):
            col = E[:, j]
            k = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
            ph = col[k] / abs(col[k])
            E[:, j] = col * np.conj(ph)
        self.basis_coeffs = E

    # -- evaluation of basis / kernel ---------------------------------------

    def _monomial_values(self, z):
        if self.domain == "disk":
            z = np.asarray(z, dtype=complex)
            return z[..., None] ** np.arange(self.degree + 1)
        z1, z2 = z
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        vals = np.empty(np.broadcast(z1, z2).shape + (len(self.monomials),), complex)
        for i, (m, n) in enumerate(self.monomials):
            vals[..., i] = z1**m * z2**n
        return vals

    def basis_values(self, z):
        """Values of the orthonormal basis functions e_j at z."""
        return self._monomial_values(z) @ self.basis_coeffs

    def kernel(self, z, w):
        """Truncated reproducing kernel B_0(z,w) = sum_j e_j(z) conj(e_j(w))."""
        ez = self.basis_values(z)
        ew = self.basis_values(w)
        return np.sum(ez * np.conj(ew), axis=-1)

    def summary(self, kmax=6):
        out = {
            "domain": self.domain,
            "weight": self.weight.describe(),
            "degree": self.degree,
            "condition_number": self.condition_number,
            "B0": higher_kernel(self, 0),
        }
        if self.domain == "disk":
            kmax = min(kmax, self.degree)
            out["Bk"] = [higher_kernel(self, k) for k in range(kmax + 1)]
            out["bergman_metric_at_zero"] = bergman_metric_at_zero(self)
        return out


def _solve_hermitian(G, B):
    """Solve G X = B with Jacobi scaling (G Hermitian positive definite)."""
    d = np.sqrt(np.diag(G).real)
    Gs = G / d[:, None] / d[None, :]
    Bs = B / d[:, None] if B.ndim > 1 else B / d
    Xs = np.linalg.solve(Gs, Bs)
    return Xs / d[:, None] if B.ndim > 1 else Xs / d


def _check_integrable(weight, degree, domain):
    """Reject weights whose log terms make low monomials non-integrable.

    A zero of total log-order s at the origin kills z^n for n < s; a zero of
    order >= 1 elsewhere (point or curve) kills every represented monomial.
    """
    if not isinstance(weight, wmod.Weight):
        return
    z = sp.symbols("z")
    if domain == "disk":
        order0 = 0.0
        for t in weight.log_terms:
            poly = sp.Poly(t.expr, z)
            roots = sp.roots(poly)
            for root, mult in roots.items():
                a = complex(root)
                if abs(a) >= 1.0 - 1e-12:
                    continue
                if abs(a) < 1e-12:
                    order0 += t.r * mult
                elif t.r * mult >= 1.0:
                    raise DegeneracyError(
                        "weight forces vanishing at z=%r; every monomial is "
                        "non-integrable" % a, list(range(degree + 1)))
        if order0 >= 1.0:
            killed = [n for n in range(degree + 1) if n < order0]
            raise DegeneracyError(
                "weight's multiplier ideal kills monomials %s "
                "(log order %.3g at the origin)" % (killed, order0), killed)
    else:
        for t in weight.log_terms:
            if t.r >= 1.0:
                raise DegeneracyError(
                    "bidisk log term %r with coefficient %.3g >= 1 forces "
                    "vanishing on a curve; model degenerate" % (t.f_str, t.r))


def _disk_gram(weight, degree, rule):
    wts = rule.weights * np.exp(-np.asarray(weight.evaluate(rule.nodes), dtype=float))
    if not np.all(np.isfinite(wts)):
        raise DegeneracyError("weight produced non-finite e^{-phi} at quadrature nodes")
    G = np.zeros((degree + 1, degree + 1), dtype=complex)
    n = rule.nodes.size
    powers = np.arange(degree + 1)
    step = max(1, 2_000_000 // (degree + 1))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        V = rule.nodes[lo:hi, None] ** powers[None, :]
        G += V.conj().T @ (wts[lo:hi, None] * V)
    return G


def _inner_moments(weight, r, inner, degree):
    """I_r[n,n'] = int_disk zeta^n conj(zeta)^{n'} e^{-phi(r,zeta)} dlam(zeta)
    via the tensor structure: one FFT per inner radius handles the angular sum
    for every Fourier offset d = n - n' exactly (trapezoid = DFT)."""
    nb = degree + 1
    na = inner.angular_order
    if na <= 2 * degree:
        raise ParameterError(
            "inner angular order %d aliases Fourier offsets up to %d" % (na, degree))
    grid = inner.radii[:, None] * inner._phases[None, :]
    phi = np.asarray(weight.evaluate(np.full(1, r + 0j), grid), dtype=float)
    T = np.exp(-phi)
    F = np.fft.fft(T, axis=1)
    # columns for d = -degree..degree: sum_j T_j e^{+i d theta_j} = F[(na-d) % na]
    d = np.arange(-degree, degree + 1)
    Fd = F[:, (na - d) % na]
    pw = inner.radial_weights * inner.radii
    P = pw[:, None] * inner.radii[:, None] ** np.arange(2 * degree + 1)[None, :]
    K = (2.0 * np.pi / na) * (P.T @ Fd)  # K[s, d+degree], s = n+n'
    n = np.arange(nb)
    return K[n[:, None] + n[None, :], n[:, None] - n[None, :] + degree]


def _bidisk_gram_reduced(weight, degree, rule):
    """Angular-reduction Gram for diagonally rotation-invariant weights."""
    D = degree
    nb = D + 1
    radii = rule.rule1.radii
    rw = rule.rule1.radial_weights
    # inner moment matrices I_r[n,n'] and radial moments r^{m+m'+1}
    I = np.zeros((radii.size, nb, nb), dtype=complex)
    for i, r in enumerate(radii):
        inner = rule._inner_for_radius(r) if rule.diagonal_grading else rule.rule2
        I[i] = _inner_moments(weight, r, inner, D)
    P = (rw * radii)[:, None] * radii[:, None] ** np.arange(2 * D + 1)[None, :]
    mons = [(m, n) for m in range(nb) for n in range(nb)]
    G = np.zeros((len(mons), len(mons)), dtype=complex)
    S = np.einsum("rs,rnk->snk", P, I)  # s = m+m' radial moment index
    for a, (m, n) in enumerate(mons):
        for b, (mp, np_) in enumerate(mons):
            if m + n != mp + np_:
                continue
            G[a, b] = 2.0 * np.pi * S[m + mp, n, np_]
    return mons, G


def _bidisk_gram_generic(weight, degree, rule):
    nb = degree + 1
    mons = [(m, n) for m in range(nb) for n in range(nb)]
    powers = np.arange(nb)
    G = np.zeros((len(mons), len(mons)), dtype=complex)
    for z1, w1, z2, w2 in rule.iter_blocks():
        phi = np.asarray(weight.evaluate(np.full_like(z2, z1), z2), dtype=float)
        t = w2 * np.exp(-phi)
        V2 = z2[:, None] ** powers[None, :]
        g = V2.conj().T @ (t[:, None] * V2)  # (n, n') moments at this z1
        a = z1**powers
        A = np.outer(a.conj(), a)           # (m, m'): row index conjugated
        G += w1 * np.einsum("mk,nl->mnkl", A, g).reshape(len(mons), len(mons))
    return mons, G


def default_rule(domain, weight=None, degree=24):
    if domain == "disk":
        return disk_rule(radial_order=48, angular_order=128, grading_levels=16)
    diag = bool(getattr(weight, "diagonal_rotation_invariant", False))
    return bidisk_rule(
        radial_order=(16, 16),
        angular_order=(64, 256),
        grading_levels=10,
        diagonal_grading=diag,
        diagonal_levels=12,
    )


def build_model(domain, weight, degree, rule=None, check_convergence=False):
    """Assemble the truncated model: Gram matrix, factorization, diagnostics."""
    if degree < 1:
        raise ParameterError("degree must be >= 1, got %r" % degree)
    if getattr(weight, "domain", domain) != domain:
        raise ParameterError(
            "weight domain %r does not match model domain %r"
            % (getattr(weight, "domain", None), domain))
    _check_integrable(weight, degree, domain)
    if rule is None:
        rule = default_rule(domain, weight, degree)
    if domain == "disk":
        G = _disk_gram(weight, degree, rule)
        mons = list(range(degree + 1))
    elif domain == "bidisk":
        if not isinstance(rule, BidiskRule):
            raise ParameterError("bidisk model needs a bidisk rule")
        if getattr(weight, "diagonal_rotation_invariant", False):
            mons, G = _bidisk_gram_reduced(weight, degree, rule)
        else:
            mons, G = _bidisk_gram_generic(weight, degree, rule)
    else:
        raise ParameterError("unknown domain %r" % domain)
    if check_convergence:
        fine = refine(rule)
        if domain == "disk":
            G2 = _disk_gram(weight, degree, fine)
        elif getattr(weight, "diagonal_rotation_invariant", False):
            _, G2 = _bidisk_gram_reduced(weight, degree, fine)
        else:
            _, G2 = _bidisk_gram_generic(weight, degree, fine)
        drift = np.abs(G2 - G).max()
        if drift > 1e-8 * np.abs(G).max():
            warnings.warn(
                "Gram entries not converged: doubling orders moves them by "
                "%.2e (rel %.2e)" % (drift, drift / np.abs(G).max()))
    return BergmanModel(domain, weight, degree, mons, G, rule)


def kernel(model, z, w):
    """B_0(z,w) for the truncated model."""
    return complex(model.kernel(z, w)) if np.isscalar(z) or (
        model.domain == "bidisk" and np.isscalar(z[0])
    ) else model.kernel(z, w)


def _ek_subspace(model, k):
    """Indices of the monomials spanning E_k."""
    if model.domain == "disk":
        return list(range(k, model.degree + 1))
    if k == 0:
        return list(range(len(model.monomials)))
    if k == 1:
        return [i for i, mn in enumerate(model.monomials) if mn != (0, 0)]
    if k == 2:
        return [i for i, (m, n) in enumerate(model.monomials) if m >= 1 and n >= 1]
    raise ParameterError("bidisk model defines E_k only for k <= 2")


def higher_kernel(model, k):
    """B_k(0): squared norm of f -> f^{(k)}(0) restricted to E_k.

    Equals u* G_k^{-1} u with u the functional's coefficient vector (a single
    entry k! at the monomial z^k) in the E_k monomial coordinates."""
    if k < 0 or k > model.degree:
        raise ParameterError("k must satisfy 0 <= k <= degree, got %r" % k)
    idx = _ek_subspace(model, k)
    Gk = model.gram[np.ix_(idx, idx)]
    u = np.zeros(len(idx), dtype=complex)
    target = k if model.domain == "disk" else (k, 0) if k else (0, 0)
    if model.domain == "disk":
        u[idx.index(model.index[k])] = math.factorial(k)
    else:
        if k > 0:
            raise ParameterError("bidisk higher kernels beyond k=0 are not defined here")
        u[idx.index(model.index[(0, 0)])] = 1.0
    x = _solve_hermitian(Gk, u)
    return float(np.real(np.vdot(u, x)))


def bergman_metric_at_zero(model):
    """omega_B(0) = B_1(0)/B_0(0) (the classical kernel/metric identity)."""
    if model.degree < 1:
        raise ParameterError("degree must be >= 1")
    return higher_kernel(model, 1) / higher_kernel(model, 0)


def log_kernel_gradient_at_zero(model):
    """e_0'(0)/e_0(0) = d/dz log B_0(z,z) at 0, from the basis coefficients."""
    if model.degree < 1:
        raise ParameterError("degree must be >= 1")
    E = model.basis_coeffs
    if model.domain == "disk":
        c0 = E[model.index[0], :]
        c1 = E[model.index[1], :]
    else:
        raise ParameterError("log-kernel gradient implemented on the disk")
    b0 = np.sum(np.abs(c0) ** 2)
    return complex(np.sum(c1 * np.conj(c0)) / b0)


def unit_ek(model, k):
    """Unit-norm element of E_k orthogonal to E_{k+1}, as a full coefficient
    vector: the normalized representer of f -> f^{(k)}(0) inside E_k."""
    idx = _ek_subspace(model, k)
    Gk = model.gram[np.ix_(idx, idx)]
    u = np.zeros(len(idx), dtype=complex)
    if model.domain == "disk":
        u[idx.index(model.index[k])] = math.factorial(k)
    else:
        u[idx.index(model.index[(0, 0)])] = 1.0
    v = _solve_hermitian(Gk, u)
    nrm2 = float(np.real(np.vdot(u, v)))  # = |functional|^2 norm on E_k
    if nrm2 <= 0:
        raise DegeneracyError("representer of the derivative functional degenerate")
    full = np.zeros(len(model.monomials), dtype=complex)
    full[idx] = v / math.sqrt(nrm2)
    return full


def model_summary_json(model, kmax=6):
    import json

    return json.dumps(model.summary(kmax), indent=2, default=float)
