"""Weights on the disk and bidisk: structured singular parts, clamped and
regularized variants, twisted derivatives, and cut-off families.

A weight is phi(z) = sum_j r_j log|f_j(z)|^2 + psi(z) with polynomial factors
f_j and a real-polynomial smooth part psi.  Evaluation at a zero of some f_j
returns -inf (a tagged sentinel, never an exception): downstream integrands
multiply by e^{-phi} and quadrature nodes avoid singular centers anyway.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

from .errors import EvaluationError, ParameterError

_Z = sp.symbols("z")
_Z1, _Z2 = sp.symbols("z1 z2")
_X, _Y = sp.symbols("x y", real=True)
_X1, _Y1, _X2, _Y2 = sp.symbols("x1 y1 x2 y2", real=True)

_DISK_LOCALS = {"z": _Z}
_BIDISK_LOCALS = {"z1": _Z1, "z2": _Z2}
_DISK_SMOOTH = {"x": _X, "y": _Y}
_BIDISK_SMOOTH = {"x1": _X1, "y1": _Y1, "x2": _X2, "y2": _Y2}


def _lambdify(args, expr):
    return sp.lambdify(args, expr, modules="numpy")


class _LogTerm:
    """One r_j * log|f_j|^2 term; keeps the sympy factor for derivatives."""

    def __init__(self, r, f_str, domain):
        if r < 0:
            raise ParameterError("log-term coefficient must be >= 0, got %r" % r)
        self.r = float(r)
        self.f_str = str(f_str)
        loc = _DISK_LOCALS if domain == "disk" else _BIDISK_LOCALS
        self.expr = sp.sympify(self.f_str, locals=loc)
        if domain == "disk":
            self._f = _lambdify((_Z,), self.expr)
            self._df = _lambdify((_Z,), sp.diff(self.expr, _Z))
        else:
            self._f = _lambdify((_Z1, _Z2), self.expr)
            self._d1 = _lambdify((_Z1, _Z2), sp.diff(self.expr, _Z1))
            self._d2 = _lambdify((_Z1, _Z2), sp.diff(self.expr, _Z2))

    def values(self, *zs):
        return np.broadcast_arrays(
            np.asarray(self._f(*zs), dtype=complex), *[np.asarray(z) for z in zs]
        )[0]


class _SmoothPart:
    """Real polynomial in the real coordinates, with holomorphic derivative."""

    def __init__(self, expr_str, domain):
        self.expr_str = str(expr_str)
        loc = _DISK_SMOOTH if domain == "disk" else _BIDISK_SMOOTH
        self.expr = sp.sympify(self.expr_str, locals=loc)
        self.domain = domain
        if domain == "disk":
            self._f = _lambdify((_X, _Y), self.expr)
            # d/dz = (d/dx - i d/dy)/2
            dz = (sp.diff(self.expr, _X) - sp.I * sp.diff(self.expr, _Y)) / 2
            self._dz = _lambdify((_X, _Y), dz)
        else:
            args = (_X1, _Y1, _X2, _Y2)
            self._f = _lambdify(args, self.expr)
            d1 = (sp.diff(self.expr, _X1) - sp.I * sp.diff(self.expr, _Y1)) / 2
            d2 = (sp.diff(self.expr, _X2) - sp.I * sp.diff(self.expr, _Y2)) / 2
            self._d1 = _lambdify(args, d1)
            self._d2 = _lambdify(args, d2)

    def values(self, *zs):
        if self.domain == "disk":
            z = np.asarray(zs[0])
            out = self._f(z.real, z.imag)
        else:
            z1, z2 = np.broadcast_arrays(np.asarray(zs[0]), np.asarray(zs[1]))
            out = self._f(z1.real, z1.imag, z2.real, z2.imag)
        ref = np.broadcast_arrays(*[np.asarray(z) for z in zs])[0]
        return np.broadcast_to(np.asarray(out, dtype=float), ref.shape).copy()


class Weight:
    """Structured weight phi = sum r_j log|f_j|^2 + psi on disk or bidisk."""

    def __init__(self, log_terms=(), smooth="0", domain="disk",
                 subharmonic=False, tag=None, diagonal_rotation_invariant=False):
        if domain not in ("disk", "bidisk"):
            raise ParameterError("domain must be 'disk' or 'bidisk', got %r" % domain)
        self.domain = domain
        self.log_terms = [
            t if isinstance(t, _LogTerm) else _LogTerm(t[0], t[1], domain)
            for t in log_terms
        ]
        self.smooth = _SmoothPart(smooth, domain)
        self.is_subharmonic = bool(subharmonic)
        self.tag = tag
        self.diagonal_rotation_invariant = bool(diagonal_rotation_invariant)

    # -- constructors for the weights actually used by the experiments -------

    @classmethod
    def zero(cls, domain="disk"):
        return cls([], "0", domain, subharmonic=True, tag="zero",
                   diagonal_rotation_invariant=(domain == "bidisk"))

    @classmethod
    def halfplane(cls, m, domain="disk"):
        """phi(z) = -2m Re(z) (harmonic, hence subharmonic)."""
        return cls([], "%r*x" % (-2.0 * m), domain, subharmonic=True,
                   tag="halfplane(m=%g)" % m)

    @classmethod
    def point_log(cls, r=1.0):
        """phi(z) = r log|z|^2 on the disk."""
        return cls([(r, "z")], "0", "disk", subharmonic=True, tag="point_log")

    @classmethod
    def diagonal_log(cls):
        """phi = log|z1-z2|^2 on the bidisk (unregularized)."""
        return cls([(1.0, "z1-z2")], "0", "bidisk", subharmonic=True,
                   tag="diagonal_log", diagonal_rotation_invariant=True)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, *zs):
        """phi at the given point(s); -inf sentinel on the zero set of any f_j."""
        out = self.smooth.values(*zs)
        for t in self.log_terms:
            a2 = np.abs(t.values(*zs)) ** 2
            with np.errstate(divide="ignore"):
                out = out + t.r * np.log(a2)
        return out

    def d_holomorphic(self, *zs):
        """dphi/dz (disk).  EvaluationError at a log singularity."""
        if self.domain != "disk":
            raise ParameterError("d_holomorphic is a one-variable operation")
        z = np.asarray(zs[0], dtype=complex)
        out = np.asarray(self.smooth._dz(z.real, z.imag), dtype=complex)
        out = np.broadcast_to(out, z.shape).copy()
        for t in self.log_terms:
            fv = t.values(z)
            if np.any(fv == 0):
                raise EvaluationError(
                    "derivative of %s requested at a singular point" % self.describe()
                )
            out = out + t.r * np.asarray(t._df(z), dtype=complex) / fv
        return out

    def d_branch(self, branch, z):
        """Holomorphic derivative along branch 1 ({z1=0}, variable z2) or
        branch 2 ({z2=0}, variable z1) of a bidisk weight."""
        if self.domain != "bidisk":
            raise ParameterError("d_branch needs a bidisk weight")
        z = np.asarray(z, dtype=complex)
        z1, z2 = (np.zeros_like(z), z) if branch == 1 else (z, np.zeros_like(z))
        if branch == 1:
            out = np.asarray(
                self.smooth._d2(z1.real, z1.imag, z2.real, z2.imag), dtype=complex)
        else:
            out = np.asarray(
                self.smooth._d1(z1.real, z1.imag, z2.real, z2.imag), dtype=complex)
        out = np.broadcast_to(out, z.shape).copy()
        for t in self.log_terms:
            fv = t.values(z1, z2)
            if np.any(fv == 0):
                raise EvaluationError("branch derivative at a singular point")
            dv = t._d2(z1, z2) if branch == 1 else t._d1(z1, z2)
            out = out + t.r * np.asarray(dv, dtype=complex) / fv
        return out

    def restrict_to_branch(self, branch):
        """Disk-like evaluator of a bidisk weight on V_1={z1=0} or V_2={z2=0}."""
        return BranchWeight(self, branch)

    def describe(self):
        return self.tag or ("weight(%d log terms)" % len(self.log_terms))

    # -- serialization (External Interface schema) ---------------------------

    def to_dict(self):
        d = {
            "log_terms": [{"r": t.r, "f": t.f_str} for t in self.log_terms],
            "smooth": self.smooth.expr_str,
            "domain": self.domain,
        }
        if self.is_subharmonic:
            d["subharmonic"] = True
        if self.tag:
            d["tag"] = self.tag
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            [(t["r"], t["f"]) for t in d.get("log_terms", [])],
            d.get("smooth", "0"),
            d.get("domain", "disk"),
            subharmonic=d.get("subharmonic", False),
            tag=d.get("tag"),
        )


class BranchWeight:
    """Restriction of a bidisk weight to one branch of the cross."""

    domain = "disk"

    def __init__(self, parent, branch):
        if branch not in (1, 2):
            raise ParameterError("branch must be 1 or 2")
        self.parent = parent
        self.branch = branch
        self.is_subharmonic = getattr(parent, "is_subharmonic", False)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        zero = np.zeros_like(z)
        if self.branch == 1:
            return self.parent.evaluate(zero, z)
        return self.parent.evaluate(z, zero)

    def d_holomorphic(self, z):
        return self.parent.d_branch(self.branch, z)

    def describe(self):
        return "%s|V%d" % (self.parent.describe(), self.branch)


class ClampedWeight:
    """psi(z) = max(phi(z) + eps_coeff*log|z|^2, -floor) on the disk.

    A max of subharmonic functions, so subharmonicity is inherited.  psi is
    identically -floor on a small disk around the origin (the log term tends
    to -inf), which is what makes dpsi(0) = 0.
    """

    domain = "disk"

    def __init__(self, base, eps_coeff, floor):
        if eps_coeff <= 0:
            raise ParameterError("eps_coeff must be > 0, got %r" % eps_coeff)
        if not np.isfinite(floor):
            raise ParameterError("floor must be finite, got %r" % floor)
        if getattr(base, "domain", "disk") != "disk":
            raise ParameterError("clamp_max applies to disk weights")
        self.base = base
        self.eps_coeff = float(eps_coeff)
        self.floor = float(floor)
        self.is_subharmonic = getattr(base, "is_subharmonic", False)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = self.base.evaluate(z) + self.eps_coeff * np.log(np.abs(z) ** 2)
        raw = np.where(np.isnan(raw), -np.inf, raw)
        return np.maximum(raw, -self.floor)

    def d_holomorphic(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            raw = self.base.evaluate(z) + self.eps_coeff * np.where(
                z == 0, -np.inf, np.log(np.where(z == 0, 1.0, np.abs(z) ** 2))
            )
        clamped = raw <= -self.floor
        safe = np.where(z == 0, 1.0, z)
        d = self.base.d_holomorphic(z) + self.eps_coeff / safe
        return np.where(clamped, 0.0, d)

    def plateau_radius(self):
        """Approximate radius below which psi == -floor (using phi(0) for the
        slowly varying base part)."""
        phi0 = float(self.base.evaluate(np.array(0.0 + 0.0j)))
        return float(np.exp((-self.floor - phi0) / (2.0 * self.eps_coeff)))

    def describe(self):
        return "max(%s + %g*log|z|^2, %g)" % (
            self.base.describe(), self.eps_coeff, -self.floor)


def clamp_max(weight, eps_coeff, floor):
    """Pointwise max(phi + eps_coeff*log|z|^2, -floor) as a weight evaluator."""
    return ClampedWeight(weight, eps_coeff, floor)


class RegularizedLogWeight:
    """Smoothing of log|zeta|^2, zeta = z (disk) or z1-z2 (bidisk).

    style='convolution': the mollification against the normalized indicator
    of the eps-disk,
        phi_eps = (|zeta|^2 - eps^2)/eps^2 + log eps^2   for |zeta| < eps,
        phi_eps = log|zeta|^2                            otherwise,
    continuous across |zeta| = eps and decreasing to log|zeta|^2 as eps -> 0.

    style='shifted': phi_eps = log(eps^2 + |zeta|^2), so that e^{-phi_eps} is
    exactly 1/(eps^2 + |zeta|^2).
    """

    def __init__(self, epsilon, direction="z", style="convolution"):
        if epsilon <= 0:
            raise ParameterError("epsilon must be > 0, got %r" % epsilon)
        if direction not in ("z", "z1-z2"):
            raise ParameterError("direction must be 'z' or 'z1-z2'")
        if style not in ("convolution", "shifted"):
            raise ParameterError("style must be 'convolution' or 'shifted'")
        self.epsilon = float(epsilon)
        self.direction = direction
        self.style = style
        self.domain = "disk" if direction == "z" else "bidisk"
        self.is_subharmonic = True
        self.diagonal_rotation_invariant = direction == "z1-z2"

    def _zeta(self, *zs):
        if self.direction == "z":
            return np.asarray(zs[0], dtype=complex)
        z1, z2 = np.broadcast_arrays(np.asarray(zs[0]), np.asarray(zs[1]))
        return np.asarray(z1 - z2, dtype=complex)

    def evaluate(self, *zs):
        zeta = self._zeta(*zs)
        a2 = np.abs(zeta) ** 2
        e2 = self.epsilon**2
        if self.style == "shifted":
            return np.log(e2 + a2)
        with np.errstate(divide="ignore"):
            outer = np.log(a2)
        return np.where(a2 < e2, (a2 - e2) / e2 + np.log(e2), outer)

    def _d_zeta(self, zeta):
        a2 = np.abs(zeta) ** 2
        e2 = self.epsilon**2
        if self.style == "shifted":
            return np.conj(zeta) / (e2 + a2)
        safe = np.where(zeta == 0, 1.0, zeta)
        return np.where(a2 < e2, np.conj(zeta) / e2, 1.0 / safe)

    def d_holomorphic(self, z):
        if self.domain != "disk":
            raise ParameterError("d_holomorphic is a one-variable operation")
        return self._d_zeta(np.asarray(z, dtype=complex))

    def d_branch(self, branch, z):
        # on V2 zeta = z1; on V1 zeta = -z2 and d zeta/d z2 = -1
        zeta = np.asarray(z, dtype=complex) if branch == 2 else -np.asarray(z, dtype=complex)
        d = self._d_zeta(zeta)
        return d if branch == 2 else -d

    def restrict_to_branch(self, branch):
        """On either branch the restriction is the one-variable regularized
        log (phi_eps is radial in zeta)."""
        if self.domain != "bidisk":
            raise ParameterError("restrict_to_branch needs a bidisk weight")
        return RegularizedLogWeight(self.epsilon, "z", self.style)

    def describe(self):
        return "reglog(%s, eps=%g, %s)" % (self.direction, self.epsilon, self.style)


def eval_weight(weight, *zs):
    """phi at the given point(s); -inf where singular."""
    return weight.evaluate(*zs)


def twisted_derivative(weight, f_coeffs, z):
    """d^phi f = f'(z) - f(z) dphi(z) for a one-variable polynomial f.

    ``weight`` is any disk-like evaluator with d_holomorphic (including
    branch restrictions of bidisk weights)."""
    z = np.asarray(z, dtype=complex)
    c = np.asarray(f_coeffs, dtype=complex)
    fv = np.polynomial.polynomial.polyval(z, c)
    dfv = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(c))
    return dfv - fv * weight.d_holomorphic(z)


# -- cut-off families --------------------------------------------------------

def _rho(t):
    """C^1 plateau profile: 1 on (-inf,1], 0 on [2,inf), cubic between."""
    t = np.asarray(t, dtype=float)
    u = np.clip(t - 1.0, 0.0, 1.0)
    return 1.0 - 3.0 * u**2 + 2.0 * u**3


def _rho_prime(t):
    t = np.asarray(t, dtype=float)
    u = t - 1.0
    inside = (u > 0.0) & (u < 1.0)
    u = np.clip(u, 0.0, 1.0)
    return np.where(inside, -6.0 * u + 6.0 * u**2, 0.0)


class CutoffFamily:
    """rho_eps(z) = rho(|s|^2/eps^2), or the iterated-log plateau
    Xi_eps(z) = rho_eps(log log 1/|s|^2) with rho_eps equal to 1 on
    [0, 1/eps] and 0 beyond 1 + 1/eps."""

    def __init__(self, kind, epsilon, section="z", domain="disk"):
        if kind not in ("rho_eps", "xi_eps"):
            raise ParameterError("kind must be 'rho_eps' or 'xi_eps'")
        if epsilon <= 0:
            raise ParameterError("epsilon must be > 0")
        self.kind = kind
        self.epsilon = float(epsilon)
        self.section_str = str(section)
        self.domain = domain
        loc = _DISK_LOCALS if domain == "disk" else _BIDISK_LOCALS
        expr = sp.sympify(self.section_str, locals=loc)
        args = (_Z,) if domain == "disk" else (_Z1, _Z2)
        self._s = _lambdify(args, expr)
        self._ds = [_lambdify(args, sp.diff(expr, a)) for a in args]

    def _section(self, *zs):
        ref = np.broadcast_arrays(*[np.asarray(z, dtype=complex) for z in zs])[0]
        return np.broadcast_to(np.asarray(self._s(*zs), dtype=complex), ref.shape)

    def evaluate(self, *zs, mode="value"):
        """Value in [0,1], or the squared (real) gradient with mode='grad_sq'.

        Gradients use the closed-form chain rule; for a holomorphic section s
        the real gradient of |s|^2 has squared norm 4|s|^2|s'|^2."""
        s = self._section(*zs)
        a2 = np.abs(s) ** 2
        e2 = self.epsilon**2
        if self.kind == "rho_eps":
            u = a2 / e2
            if mode == "value":
                return _rho(u)
            ds2 = sum(np.abs(np.asarray(d(*zs), dtype=complex)) ** 2 for d in self._ds)
            return _rho_prime(u) ** 2 * 4.0 * a2 * ds2 / e2**2
        # xi_eps: argument log(log(1/|s|^2)); clamp to 1 when |s| >= 1
        with np.errstate(divide="ignore", invalid="ignore"):
            big_l = -np.log(a2)
            t = np.where(big_l > 0, np.log(np.where(big_l > 0, big_l, 1.0)), -np.inf)
        shifted = t - (1.0 / self.epsilon) + 1.0
        if mode == "value":
            return np.where(big_l > 0, _rho(shifted), 1.0)
        ds2 = sum(np.abs(np.asarray(d(*zs), dtype=complex)) ** 2 for d in self._ds)
        safe_a2 = np.where(a2 > 0, a2, 1.0)
        safe_l = np.where(big_l > 0, big_l, 1.0)
        g = _rho_prime(shifted) ** 2 * 4.0 * ds2 / (safe_a2 * safe_l**2)
        return np.where(big_l > 0, g, 0.0)

    def gradient_decay_integral(self):
        """Disk integral of |d Xi_eps|^2 for the model section s_W = z.

        The transition band sits at radius exp(-e^{1/eps}/2) -- far below any
        two-dimensional grid for small eps -- so the radial integral is
        computed exactly by the substitution t = log(-2 log r):
            int_disk |d Xi|^2 dlam = 4 pi int rho_eps'(t)^2 e^{-t} dt.
        """
        if self.kind != "xi_eps" or self.section_str != "z":
            raise ParameterError("decay integral implemented for xi_eps with s=z")
        lo = 1.0 / self.epsilon
        x, w = np.polynomial.legendre.leggauss(64)
        t = lo + 0.5 * (x + 1.0)
        wt = 0.5 * w
        vals = _rho_prime(t - lo + 1.0) ** 2 * np.exp(-t)
        return float(4.0 * np.pi * np.dot(wt, vals))


def cutoff_eval(family, *zs, mode="value"):
    return family.evaluate(*zs, mode=mode)


def sampled_laplacian_min(weight, n=50, h=1e-3, box=0.9):
    """Minimum five-point-stencil Laplacian of phi on an n x n grid in the
    disk, skipping points where any stencil value is non-finite."""
    xs = np.linspace(-box / np.sqrt(2), box / np.sqrt(2), n)
    X, Y = np.meshgrid(xs, xs)
    z = X + 1j * Y
    vals = []
    for dz in (0.0, h, -h, 1j * h, -1j * h):
        vals.append(np.asarray(weight.evaluate(z + dz), dtype=float))
    lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / h**2
    ok = np.isfinite(lap)
    if not ok.any():
        raise EvaluationError("no finite stencil values on the sample grid")
    return float(lap[ok].min())
