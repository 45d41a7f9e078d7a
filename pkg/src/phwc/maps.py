"""Smooth maps into Hermitian charts and their residual checks.

A map phi: R^m -> C^n is a vector of expression trees; every residual below
is evaluated pointwise from second-order jets.  The pseudo horizontal weak
conformality condition comes in three equivalent forms (coordinate Gram,
isotropy through the dual metric, commutator with the complex structure) that
are kept as independent code paths so they can cross-check each other.

Conventions for the complexified target tangent space: the frame is
(d/dz^1 .. d/dz^n, d/dzbar^1 .. d/dzbar^n); the real metric induced by the
Hermitian components h_{a bbar} extends complex-bilinearly to the block form
[[0, h/2], [h^T/2, 0]], and dually the coefficients h^{AB} of the 1-form
metric are [[0, 2 h^{-T}], [2 h^{-1}, 0]].  With the flat metric on C^1 this
gives h^{1 1bar} = 2, so z -> c z has dilation |c|^2 as it should.

All operations are pure functions of immutable inputs; point sweeps are
embarrassingly parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jet
from .geometry import (
    HermitianMetricField,
    MetricField,
    SourceNotKaehler,
    TargetNotKaehler,
    christoffel_domain,
    christoffel_kaehler,
)
from .jet import Expr, Jet2, as_expr, eval_jet2

__all__ = [
    "DimensionMismatch",
    "SmoothMap",
    "DifferentialPoint",
    "HWCReport",
    "TensionPoint",
    "differential",
    "phwc_residual_coord",
    "isotropy_residual",
    "phwc_residual_commutator",
    "hwc_report",
    "tension",
    "pluriharmonic_residual",
    "compose",
    "holomorphy_residual",
    "antiholomorphy_residual",
]


class DimensionMismatch(ValueError):
    pass


class SmoothMap:
    """phi: R^m -> C^n given by n expressions in m real variables."""

    def __init__(self, domain_dim: int, target_cdim: int, components):
        if len(components) != target_cdim:
            raise DimensionMismatch(
                f"{target_cdim} components expected, got {len(components)}")
        self.domain_dim = domain_dim
        self.target_cdim = target_cdim
        self.components = [as_expr(c) for c in components]

    def value(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.array([eval_jet2(c, p).value for c in self.components])

    def jets(self, p) -> list[Jet2]:
        p = np.asarray(p, dtype=float)
        return [eval_jet2(c, p) for c in self.components]


@dataclass
class DifferentialPoint:
    """First and second partials of the components at a point."""

    dphi: np.ndarray    # (n, m) complex, dphi[a, i] = d phi^a / d x^i
    second: np.ndarray  # (n, m, m) complex, symmetric in the last two slots


def differential(phi: SmoothMap, p) -> DifferentialPoint:
    js = phi.jets(p)
    dphi = np.array([j.grad for j in js])
    second = np.array([j.hess for j in js])
    return DifferentialPoint(dphi, second)


def _coord_gram(phi: SmoothMap, g: MetricField, p):
    """(2,0) Gram matrix M_ab = g^ij d_i phi^a d_j phi^b and the jets."""
    ginv = g.inverse(p)
    dphi = differential(phi, p).dphi
    return dphi @ ginv @ dphi.T, dphi, ginv


def phwc_residual_coord(phi: SmoothMap, g: MetricField, p) -> float:
    """max_{a,b} | g^ij d_i phi^a d_j phi^b |; zero exactly on PHWC maps."""
    gram, _, _ = _coord_gram(phi, g, p)
    return float(np.max(np.abs(gram)))


def isotropy_residual(phi: SmoothMap, g: MetricField, p) -> float:
    """Isotropy of V = span{(dphi)*(dz^a)} under the dual metric g*.

    Computes g(v_a, v_b) for the raised vectors v_a = g^{-1} dphi^a, which is
    the same Gram matrix as :func:`phwc_residual_coord` assembled through a
    different contraction path.
    """
    gm = g.matrix(p)
    ginv = np.linalg.inv(gm)
    dphi = differential(phi, p).dphi
    v = ginv @ dphi.T                      # columns are the raised covectors
    gram = v.T @ gm @ v
    return float(np.max(np.abs(gram)))


def _complexified_transfer(phi: SmoothMap, p):
    """dphi on the complexified frames: rows (d/dz^a) then (d/dzbar^a)."""
    dphi = differential(phi, p).dphi
    return np.vstack([dphi, np.conj(dphi)])


def _target_bilinear(h: HermitianMetricField, z):
    """Complex-bilinear metric block matrix on (d_a, d_abar)."""
    hm = h.matrix(z)
    n = h.cdim
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = 0.5 * hm
    out[n:, :n] = 0.5 * hm.T
    return out


def _target_dual(h: HermitianMetricField, z):
    """Dual-metric coefficients h^{AB} on the frame (dz^a, dzbar^a)."""
    hinv = h.inverse(z)
    n = h.cdim
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = 2.0 * hinv.T
    out[n:, :n] = 2.0 * hinv
    return out


def phwc_residual_commutator(phi: SmoothMap, g: MetricField,
                             h: HermitianMetricField, p) -> float:
    """Frobenius norm of [dphi o (dphi)*, J] on the complexified target.

    The adjoint is taken with respect to g on the domain and the bilinear
    extension of the target metric; J acts as +i / -i on the (1,0) / (0,1)
    parts.
    """
    gm = g.matrix(p)
    ginv = np.linalg.inv(gm)
    z = phi.value(p)
    d = _complexified_transfer(phi, p)
    gc = _target_bilinear(h, z)
    p_op = d @ ginv @ d.T @ gc
    n = h.cdim
    jmat = np.diag(np.concatenate([1j * np.ones(n), -1j * np.ones(n)]))
    comm = p_op @ jmat - jmat @ p_op
    return float(np.linalg.norm(comm))


@dataclass
class HWCReport:
    """Least-squares fit of the horizontal weak conformality equation.

    ``lambda_sq`` is the fitted squared dilation (clamped at zero), and
    ``defect`` the Frobenius misfit of g^ij dphi^A dphi^B against
    lambda^2 h^{AB} over all index types A, B.  A vanishing differential
    satisfies the equation by definition and reports (0, 0).
    """

    lambda_sq: float
    defect: float


def hwc_report(phi: SmoothMap, g: MetricField, h: HermitianMetricField,
               p) -> HWCReport:
    gm = g.matrix(p)
    ginv = np.linalg.inv(gm)
    d = _complexified_transfer(phi, p)
    s = d @ ginv @ d.T
    t = _target_dual(h, phi.value(p))
    tt = float(np.real(np.sum(t * np.conj(t))))
    lam = float(np.real(np.sum(s * np.conj(t)))) / tt
    lam = max(lam, 0.0)
    defect = float(np.linalg.norm(s - lam * t))
    return HWCReport(lambda_sq=lam, defect=defect)


@dataclass
class TensionPoint:
    """Holomorphic components tau^a of the tension field at a point."""

    tau: np.ndarray  # (n,) complex

    @property
    def harmonic_residual(self) -> float:
        return float(np.max(np.abs(self.tau))) if len(self.tau) else 0.0

    def real_components(self) -> np.ndarray:
        """Real tangent components of tau, interleaved (re, im) per chart dim."""
        out = np.empty(2 * len(self.tau))
        out[0::2] = self.tau.real
        out[1::2] = self.tau.imag
        return out


def tension(phi: SmoothMap, g: MetricField, h: HermitianMetricField,
            p) -> TensionPoint:
    """tau^a = g^ij (d2_ij phi^a - Gamma^k_ij d_k phi^a) + Gamma^a_bc M_bc.

    The target symbols are the holomorphic Christoffels of a Kaehler metric;
    M is the (2,0) Gram matrix, so the correction term dies on PHWC maps.
    """
    if not h.kaehler:
        raise TargetNotKaehler("tension requires a Kaehler-flagged target")
    diff = differential(phi, p)
    ginv = g.inverse(p)
    gamma_m = christoffel_domain(g, p).gamma
    flat_part = np.einsum("ij,aij->a", ginv, diff.second) \
        - np.einsum("ij,kij,ak->a", ginv, gamma_m, diff.dphi)
    gram = diff.dphi @ ginv @ diff.dphi.T
    gamma_n = christoffel_kaehler(h, phi.value(p)).gamma
    return TensionPoint(flat_part + np.einsum("abc,bc->a", gamma_n, gram))


def _wirtinger_table(phi: SmoothMap, x):
    """First Wirtinger derivatives dz/dzbar and mixed Hessians of a map
    whose domain is the real chart of C^{m/2}."""
    if phi.domain_dim % 2:
        raise DimensionMismatch("source chart needs an even real dimension")
    n = phi.domain_dim // 2
    js = phi.jets(x)
    d_z = np.array([[jet.dz(j, a) for a in range(n)] for j in js])
    d_zbar = np.array([[jet.dzbar(j, a) for a in range(n)] for j in js])
    mixed = np.array([[[jet.d2_z_zbar(j, a, b) for b in range(n)]
                       for a in range(n)] for j in js])
    return d_z, d_zbar, mixed


def pluriharmonic_residual(f: SmoothMap, z,
                           source: HermitianMetricField | None = None,
                           target: HermitianMetricField | None = None) -> float:
    """max over components and (a, b) of | d2 f / dz^a dzbar^b + correction |.

    ``f`` is a map defined on the real chart of C^k (interleaved coordinates);
    ``z`` is a chart point.  On a Kaehler source the mixed Hessian is already
    tensorial, so no source symbols enter.  For a flat target the correction
    is absent; a Kaehler target contributes Gamma^a_bc df^b df^cbar.
    """
    if source is not None and not source.kaehler:
        raise SourceNotKaehler(
            "pluriharmonicity needs a Kaehler structure on the source chart")
    x = HermitianMetricField.real_coords(z)
    d_z, d_zbar, mixed = _wirtinger_table(f, x)
    resid = mixed.copy()
    if target is not None:
        if not target.kaehler:
            raise TargetNotKaehler("target correction requires a Kaehler metric")
        w = f.value(x)
        gamma = christoffel_kaehler(target, w).gamma
        resid = resid + np.einsum("abc,bi,cj->aij", gamma, d_z, d_zbar)
    return float(np.max(np.abs(resid)))


def compose(psi: SmoothMap, phi: SmoothMap) -> SmoothMap:
    """Expression-level substitution psi o phi.

    ``psi`` must live on the real chart of phi's target: its variable 2a is
    re(phi^a) and 2a+1 is im(phi^a).  The composite is a first-class map, so
    every residual can be evaluated on it directly.
    """
    if psi.domain_dim != 2 * phi.target_cdim:
        raise DimensionMismatch(
            f"psi expects {psi.domain_dim} real variables but phi provides "
            f"{2 * phi.target_cdim}")
    mapping: dict[int, Expr] = {}
    for a, comp in enumerate(phi.components):
        mapping[2 * a] = jet.re(comp)
        mapping[2 * a + 1] = jet.im(comp)
    return SmoothMap(phi.domain_dim, psi.target_cdim,
                     [c.substitute(mapping) for c in psi.components])


def holomorphy_residual(psi: SmoothMap, z) -> float:
    """max |d psi^a / dzbar^b| at a chart point; zero iff psi is holomorphic
    to first order there."""
    x = HermitianMetricField.real_coords(z)
    _, d_zbar, _ = _wirtinger_table(psi, x)
    return float(np.max(np.abs(d_zbar)))


def antiholomorphy_residual(psi: SmoothMap, z) -> float:
    """max |d psi^a / dz^b| at a chart point."""
    x = HermitianMetricField.real_coords(z)
    d_z, _, _ = _wirtinger_table(psi, x)
    return float(np.max(np.abs(d_z)))
