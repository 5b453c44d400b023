"""Graded tensor polar quadrature on the unit disk and bidisk.

Rules are tensor products of composite Gauss-Legendre in the radius and a
uniform trapezoid (periodic) rule in the angle.  The radial mesh is
geometrically refined toward prescribed grading centers so that integrable
singularities (log|z|^2, |z|^{-2a} with a<1, 1/(eps^2+|z|^2)) converge as the
orders grow.  Nodes are strictly interior: Gauss-Legendre nodes never touch
cell endpoints, so singular centers are automatically avoided.

Bidisk rules are tensor products of two disk rules.  With
``diagonal_grading=True`` the second-factor rule is rebuilt per outer node:
graded toward the radius |z1| and rotated by arg(z1), which concentrates
nodes near the diagonal {z1 = z2} (rotating a disk rule is again a valid
disk rule).
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import EvaluationError, ParameterError

_MIN_CELL = 1e-14


def _radial_breakpoints(center_radii, ratio, levels):
    """Mesh of [0,1] geometrically refined toward 0 and each center radius."""
    pts = {0.0, 1.0}
    # always grade toward 0: every in-scope singular weight is centered there
    # unless a nonzero center is given
    for j in range(1, levels + 1):
        pts.add(ratio**j)
    for rc in center_radii:
        if rc <= 0.0:
            continue  # already covered by the mesh toward 0
        pts.add(rc)
        for j in range(1, levels + 1):
            d = ratio**j
            lo = rc * (1.0 - d)
            hi = rc + d * (1.0 - rc)
            if lo > 0.0:
                pts.add(lo)
            if hi < 1.0:
                pts.add(hi)
    bps = np.array(sorted(pts))
    keep = np.concatenate([[True], np.diff(bps) > _MIN_CELL])
    return bps[keep]


class DiskRule:
    """Tensor polar quadrature rule on the open unit disk.

    Attributes
    ----------
    nodes : complex ndarray, shape (N,)
    weights : positive float ndarray, shape (N,)
    radii, radial_weights : the underlying radial composite rule (the node
        layout is the tensor grid radii x angles; kept for structured reuse).
    """

    domain = "disk"

    def __init__(self, radii, radial_weights, angular_order, metadata):
        self.radii = radii
        self.radial_weights = radial_weights
        self.angular_order = int(angular_order)
        theta = 2.0 * np.pi * np.arange(self.angular_order) / self.angular_order
        self._phases = np.exp(1j * theta)
        w_theta = 2.0 * np.pi / self.angular_order
        self.nodes = (radii[:, None] * self._phases[None, :]).ravel()
        self.weights = (
            (radial_weights * radii)[:, None]
            * np.full(self.angular_order, w_theta)[None, :]
        ).ravel()
        self.metadata = dict(metadata)

    def __len__(self):
        return self.nodes.size

    def rotated(self, phase):
        """Same rule with every node multiplied by a unit phase."""
        out = object.__new__(DiskRule)
        out.radii = self.radii
        out.radial_weights = self.radial_weights
        out.angular_order = self.angular_order
        out._phases = self._phases * phase
        out.nodes = self.nodes * phase
        out.weights = self.weights
        out.metadata = dict(self.metadata, rotation=complex(phase))
        return out

    def integrate(self, f):
        vals = np.asarray(f(self.nodes))
        bad = ~np.isfinite(vals)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise EvaluationError(
                "non-finite integrand value at node z=%r" % (self.nodes[k],)
            )
        return complex(np.dot(self.weights, vals))


def disk_rule(
    radial_order=64,
    angular_order=128,
    grading_centers=(),
    grading_ratio=0.5,
    grading_levels=20,
):
    """Graded tensor polar rule on the unit disk.

    ``radial_order`` Gauss-Legendre points per radial cell, ``angular_order``
    uniform angles per annulus.  The radial mesh is refined geometrically
    (ratio ``grading_ratio``, ``grading_levels`` levels) toward the radius of
    each grading center and toward 0.
    """
    if radial_order < 2:
        raise ParameterError("radial_order must be >= 2, got %r" % radial_order)
    if angular_order < 4:
        raise ParameterError("angular_order must be >= 4, got %r" % angular_order)
    if not (0.0 < grading_ratio < 1.0):
        raise ParameterError("grading_ratio must lie in (0,1), got %r" % grading_ratio)
    centers = [complex(c) for c in grading_centers]
    for c in centers:
        if abs(c) > 1.0 + 1e-12:
            raise ParameterError("grading center %r outside the closed disk" % c)
    bps = _radial_breakpoints([abs(c) for c in centers], grading_ratio, grading_levels)
    x, w = leggauss(int(radial_order))
    radii = []
    rweights = []
    for a, b in zip(bps[:-1], bps[1:]):
        radii.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        rweights.append(0.5 * (b - a) * w)
    meta = {
        "radial_order": int(radial_order),
        "angular_order": int(angular_order),
        "grading_centers": centers,
        "grading_ratio": float(grading_ratio),
        "grading_levels": int(grading_levels),
    }
    return DiskRule(np.concatenate(radii), np.concatenate(rweights), angular_order, meta)


class BidiskRule:
    """Tensor product of two disk rules on the unit bidisk.

    Node pairs are enumerated lazily through :meth:`iter_blocks`; each block
    is (z1 value, w1, z2 nodes, z2 weights).  With diagonal grading the
    second-factor rule is regenerated per outer node (cached by radius,
    rotated by the outer node's phase).
    """

    domain = "bidisk"

    def __init__(self, rule1, rule2, diagonal_grading=False, diagonal_levels=12):
        self.rule1 = rule1
        self.rule2 = rule2
        self.diagonal_grading = bool(diagonal_grading)
        self.diagonal_levels = int(diagonal_levels)
        self._inner_cache = {}
        self.metadata = {
            "factor1": rule1.metadata,
            "factor2": rule2.metadata,
            "diagonal_grading": self.diagonal_grading,
        }

    def _inner_for_radius(self, r):
        key = round(float(r), 15)
        rule = self._inner_cache.get(key)
        if rule is None:
            m = self.rule2.metadata
            rule = disk_rule(
                m["radial_order"],
                m["angular_order"],
                grading_centers=(r,),
                grading_ratio=m["grading_ratio"],
                grading_levels=self.diagonal_levels,
            )
            # outer radii rarely repeat; keep the cache tiny to bound memory
            if len(self._inner_cache) >= 4:
                self._inner_cache.pop(next(iter(self._inner_cache)))
            self._inner_cache[key] = rule
        return rule

    def iter_blocks(self):
        """Yield (z1, w1, z2_nodes, z2_weights) with z1 scalar."""
        if not self.diagonal_grading:
            z2, w2 = self.rule2.nodes, self.rule2.weights
            for z1, w1 in zip(self.rule1.nodes, self.rule1.weights):
                yield z1, w1, z2, w2
        else:
            for z1, w1 in zip(self.rule1.nodes, self.rule1.weights):
                r = abs(z1)
                inner = self._inner_for_radius(r)
                phase = z1 / r if r > 0 else 1.0
                yield z1, w1, inner.nodes * phase, inner.weights

    def integrate(self, f):
        total = 0.0 + 0.0j
        for z1, w1, z2, w2 in self.iter_blocks():
            vals = np.asarray(f(np.full_like(z2, z1), z2))
            bad = ~np.isfinite(vals)
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                raise EvaluationError(
                    "non-finite integrand value at node (z1,z2)=(%r,%r)"
                    % (z1, z2[k])
                )
            total += w1 * np.dot(w2, vals)
        return complex(total)

    def total_weight(self):
        if not self.diagonal_grading:
            return self.rule1.weights.sum() * self.rule2.weights.sum()
        return sum(
            w1 * w2.sum() for _, w1, _, w2 in self.iter_blocks()
        )


def bidisk_rule(
    radial_order=(16, 16),
    angular_order=(32, 64),
    grading_centers=((), ()),
    grading_ratio=0.5,
    grading_levels=10,
    diagonal_grading=False,
    diagonal_levels=12,
):
    """Tensor product rule on the bidisk, optionally graded toward the
    diagonal {z1 = z2} (coordinate rotation of the second factor)."""
    r1 = disk_rule(
        radial_order[0], angular_order[0], grading_centers[0], grading_ratio, grading_levels
    )
    r2 = disk_rule(
        radial_order[1], angular_order[1], grading_centers[1], grading_ratio, grading_levels
    )
    return BidiskRule(r1, r2, diagonal_grading=diagonal_grading, diagonal_levels=diagonal_levels)


def integrate(rule, f):
    """Weighted sum of f over the rule's nodes.

    Disk rules call ``f(z)``, bidisk rules ``f(z1, z2)`` (vectorized).
    Deterministic for a fixed rule; raises EvaluationError naming the node on
    a non-finite value.
    """
    return rule.integrate(f)


def refine(rule, factor=2):
    """Same rule family with radial and angular orders multiplied by ``factor``
    (used for quadrature-convergence flags)."""
    if isinstance(rule, DiskRule):
        m = rule.metadata
        return disk_rule(
            m["radial_order"] * factor,
            m["angular_order"] * factor,
            m["grading_centers"],
            m["grading_ratio"],
            m["grading_levels"],
        )
    if isinstance(rule, BidiskRule):
        return BidiskRule(
            refine(rule.rule1, factor),
            refine(rule.rule2, factor),
            diagonal_grading=rule.diagonal_grading,
            diagonal_levels=rule.diagonal_levels,
        )
    raise ParameterError("unknown rule type %r" % type(rule).__name__)
