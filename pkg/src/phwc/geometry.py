"""Metric data on the domain and on the target chart.

The domain carries a Riemannian metric given by an m x m grid of real-valued
expressions g_ij(x); the target is a single holomorphic chart of C^n with a
Hermitian component grid h_{a bbar}(z) written in the interleaved real
coordinates (re z^1, im z^1, ..., re z^n, im z^n).  Both metric types are
immutable and all operations are pure, so point sweeps can run concurrently
over shared fields.

Points where positivity fails abort with an error instead of being
regularised: a residual computed through a repaired metric would be
meaningless.
"""

from __future__ import annotations

import numpy as np

from . import jet
from .jet import Const, Expr, as_expr, eval_jet2

__all__ = [
    "GeometryError",
    "MetricNotSPD",
    "MetricNotPD",
    "TargetNotKaehler",
    "SourceNotKaehler",
    "SPD_EPS",
    "MetricField",
    "HermitianMetricField",
    "christoffel_domain",
    "christoffel_kaehler",
    "kaehler_residual",
    "laplace_beltrami",
]

# Smallest admissible eigenvalue for a metric at a queried point.
SPD_EPS = 1e-10


class GeometryError(ValueError):
    pass


class MetricNotSPD(GeometryError):
    """Domain metric is not symmetric positive definite at the point."""


class MetricNotPD(GeometryError):
    """Hermitian metric is not positive definite (or not Hermitian) there."""


class TargetNotKaehler(GeometryError):
    """Operation requires the target metric's Kaehler flag."""


class SourceNotKaehler(GeometryError):
    """Operation requires a Kaehler structure on the source chart."""


def _inverse_checked(g: np.ndarray, what: str) -> np.ndarray:
    ginv = np.linalg.inv(g)
    if np.max(np.abs(g @ ginv - np.eye(len(g)))) > 1e-12:
        raise GeometryError(f"{what} inverse failed the g*g^-1 = Id check; "
                            "the matrix is too ill-conditioned")
    return ginv


class MetricField:
    """Riemannian metric g_ij(x) on R^m given by expressions.

    The component grid is symmetrised on construction: entry (i, j) with
    i <= j is authoritative and mirrored to (j, i).
    """

    def __init__(self, dim: int, components):
        self.dim = dim
        grid = [[as_expr(components[i][j]) for j in range(dim)] for i in range(dim)]
        for i in range(dim):
            for j in range(i + 1, dim):
                grid[j][i] = grid[i][j]
        self.components = grid

    @classmethod
    def euclidean(cls, dim: int) -> "MetricField":
        return cls(dim, [[Const(1.0 if i == j else 0.0) for j in range(dim)]
                         for i in range(dim)])

    @classmethod
    def diagonal(cls, entries) -> "MetricField":
        dim = len(entries)
        return cls(dim, [[as_expr(entries[i]) if i == j else Const(0.0)
                          for j in range(dim)] for i in range(dim)])

    @classmethod
    def conformal(cls, dim: int, factor) -> "MetricField":
        factor = as_expr(factor)
        return cls(dim, [[factor if i == j else Const(0.0) for j in range(dim)]
                         for i in range(dim)])

    def matrix(self, p) -> np.ndarray:
        """g(p) as a real SPD matrix; raises MetricNotSPD otherwise."""
        p = np.asarray(p, dtype=float)
        g = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(i, self.dim):
                v = eval_jet2(self.components[i][j], p).value
                if abs(v.imag) > 1e-12 * max(1.0, abs(v)):
                    raise MetricNotSPD(f"g_{i+1}{j+1} is not real at {p}")
                g[i, j] = g[j, i] = v.real
        if np.min(np.linalg.eigvalsh(g)) <= SPD_EPS:
            raise MetricNotSPD(f"domain metric not SPD at {p}")
        return g

    def inverse(self, p) -> np.ndarray:
        return _inverse_checked(self.matrix(p), "domain metric")

    def jets(self, p):
        """Grid of jets of the components (for metric derivatives)."""
        p = np.asarray(p, dtype=float)
        return [[eval_jet2(self.components[i][j], p) for j in range(self.dim)]
                for i in range(self.dim)]


class HermitianMetricField:
    """Hermitian metric h_{a bbar}(z) on a chart of C^n.

    Component expressions use the interleaved real coordinates of the chart.
    ``kaehler`` is a *claim*; honest fields can be validated against
    :func:`kaehler_residual` (the command-line driver does so for every
    manifest that sets the flag, and the theorem suite re-validates at each
    sampled point).
    """

    def __init__(self, cdim: int, components, kaehler: bool = False):
        self.cdim = cdim
        self.components = [[as_expr(components[a][b]) for b in range(cdim)]
                           for a in range(cdim)]
        self.kaehler = bool(kaehler)

    @classmethod
    def flat(cls, cdim: int) -> "HermitianMetricField":
        return cls(cdim, [[Const(1.0 if a == b else 0.0) for b in range(cdim)]
                          for a in range(cdim)], kaehler=True)

    @classmethod
    def from_potential(cls, potential: Expr, cdim: int) -> "HermitianMetricField":
        """Metric h_{a bbar} = d^2 K / dz^a dzbar^b of a real potential K.

        The potential is an expression in the interleaved real chart
        variables; its mixed Wirtinger Hessian is built symbolically, so
        the resulting field is exactly Kaehler wherever it is positive
        definite and the flag is set honestly.
        """
        half = Const(0.5)
        ihalf = Const(0.5j)

        def d_z(e: Expr, a: int) -> Expr:
            return half * jet.differentiate(e, 2 * a) \
                - ihalf * jet.differentiate(e, 2 * a + 1)

        def d_zbar(e: Expr, b: int) -> Expr:
            return half * jet.differentiate(e, 2 * b) \
                + ihalf * jet.differentiate(e, 2 * b + 1)

        comps = [[d_zbar(d_z(potential, a), b) for b in range(cdim)]
                 for a in range(cdim)]
        return cls(cdim, comps, kaehler=True)

    @staticmethod
    def real_coords(z) -> np.ndarray:
        """Interleave a complex chart point into real coordinates."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        x = np.empty(2 * len(z))
        x[0::2] = z.real
        x[1::2] = z.imag
        return x

    def matrix(self, z) -> np.ndarray:
        """h(z) as a Hermitian PD matrix; raises MetricNotPD otherwise."""
        x = self.real_coords(z)
        h = np.empty((self.cdim, self.cdim), dtype=complex)
        for a in range(self.cdim):
            for b in range(self.cdim):
                h[a, b] = eval_jet2(self.components[a][b], x).value
        scale = max(1.0, np.max(np.abs(h)))
        if np.max(np.abs(h - h.conj().T)) > 1e-10 * scale:
            raise MetricNotPD(f"target metric is not Hermitian at z={z}")
        h = 0.5 * (h + h.conj().T)
        if np.min(np.linalg.eigvalsh(h)) <= SPD_EPS:
            raise MetricNotPD(f"target metric not positive definite at z={z}")
        return h

    def inverse(self, z) -> np.ndarray:
        return _inverse_checked(self.matrix(z), "target metric")

    def jets(self, z):
        x = self.real_coords(z)
        return [[eval_jet2(self.components[a][b], x) for b in range(self.cdim)]
                for a in range(self.cdim)]


class ChristoffelDomain:
    """Gamma^k_ij of the domain metric at a point, symmetric in (i, j)."""

    def __init__(self, gamma: np.ndarray):
        self.gamma = gamma  # indexed [k, i, j]

    def __getitem__(self, kij):
        return self.gamma[kij]


class ChristoffelKaehler:
    """Gamma^a_{bc} of a Kaehler target at a point, symmetric in (b, c)."""

    def __init__(self, gamma: np.ndarray):
        self.gamma = gamma  # indexed [a, b, c]

    def __getitem__(self, abc):
        return self.gamma[abc]


def christoffel_domain(g: MetricField, p) -> ChristoffelDomain:
    """Levi-Civita symbols Gamma^k_ij = g^kl (d_i g_lj + d_j g_li - d_l g_ij)/2."""
    m = g.dim
    jets = g.jets(p)
    gm = np.empty((m, m))
    dg = np.empty((m, m, m))  # dg[l, i, j] = d_l g_ij
    for i in range(m):
        for j in range(m):
            gm[i, j] = jets[i][j].value.real
            dg[:, i, j] = jets[i][j].grad.real
    if np.min(np.linalg.eigvalsh(gm)) <= SPD_EPS:
        raise MetricNotSPD(f"domain metric not SPD at {np.asarray(p)}")
    ginv = _inverse_checked(gm, "domain metric")
    sym = (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg)
           - np.einsum("lij->lij", dg))
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, sym)
    return ChristoffelDomain(gamma)


def christoffel_kaehler(h: HermitianMetricField, z) -> ChristoffelKaehler:
    """Holomorphic symbols Gamma^a_{bc} = h^{a dbar} d_{z^b} h_{c dbar}.

    Valid for Kaehler metrics, where they are symmetric in (b, c); the raw
    formula is evaluated in whatever holomorphic coordinates the chart uses.
    """
    n = h.cdim
    jets = h.jets(z)
    hm = np.empty((n, n), dtype=complex)
    dh = np.empty((n, n, n), dtype=complex)  # dh[b, c, d] = d_{z^b} h_{c dbar}
    for c in range(n):
        for d in range(n):
            j = jets[c][d]
            hm[c, d] = j.value
            for b in range(n):
                dh[b, c, d] = jet.dz(j, b)
    scale = max(1.0, np.max(np.abs(hm)))
    if np.max(np.abs(hm - hm.conj().T)) > 1e-10 * scale:
        raise MetricNotPD(f"target metric is not Hermitian at z={z}")
    if np.min(np.linalg.eigvalsh(0.5 * (hm + hm.conj().T))) <= SPD_EPS:
        raise MetricNotPD(f"target metric not positive definite at z={z}")
    hinv = _inverse_checked(hm, "target metric")  # hinv[d, a]: h_{c dbar} h^{dbar a}
    gamma = np.einsum("bcd,da->abc", dh, hinv)
    return ChristoffelKaehler(gamma)


def kaehler_residual(h: HermitianMetricField, z) -> float:
    """max_{a,b,c} | d_{z^a} h_{b cbar} - d_{z^b} h_{a cbar} |.

    Zero exactly when the associated 2-form is closed, i.e. the metric is
    Kaehler on the chart.
    """
    n = h.cdim
    jets = h.jets(z)
    dh = np.empty((n, n, n), dtype=complex)
    for b in range(n):
        for c in range(n):
            for a in range(n):
                dh[a, b, c] = jet.dz(jets[b][c], a)
    return float(np.max(np.abs(dh - np.einsum("abc->bac", dh))))


def laplace_beltrami(f: Expr, g: MetricField, p) -> float:
    """Laplace-Beltrami of a real scalar: g^ij (d2_ij f - Gamma^k_ij d_k f)."""
    p = np.asarray(p, dtype=float)
    jf = eval_jet2(f, p)
    ginv = g.inverse(p)
    gamma = christoffel_domain(g, p).gamma
    hess = jf.hess
    corr = np.einsum("kij,k->ij", gamma, jf.grad)
    val = np.einsum("ij,ij->", ginv, hess - corr)
    return float(val.real)
