"""The f-structure associated to a PHWC map and its curvature conditions.

At a point where the map satisfies the PHWC condition, the covectors
(dphi)*(dz^a) span an isotropic subspace V of the complexified cotangent
space, which becomes the +i eigenspace of an f-structure acting on 1-forms.
On tangent vectors the same structure has +i eigenspace equal to the
*conjugate* of the raised span of V (the two transfers across the metric
differ by a conjugation on isotropic spaces); that orientation is the one
that makes every PHWC map f-holomorphic, dphi o F = J o dphi.  The module
builds F pointwise, then probes the field of such structures by central
differences: Nijenhuis tensor, parallelism defect, fundamental 2-form and
its exterior derivative, and the mixed-type condition on covariant
derivatives out of the 0-eigenspace.

Derivatives of the field use central differences of the pointwise
construction rather than differentiating the orthonormalisation: rank
pivoting is discontinuous, whereas the projectors themselves are smooth on
constant-rank neighbourhoods.  A rank change across a stencil makes the
derivative meaningless and is reported as such, never averaged away.

Pointwise constructions are pure; the implication harness processes its
samples independently and keeps diagnostics ordered by sample for
deterministic reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import HermitianMetricField, MetricField, christoffel_domain, kaehler_residual
from .maps import SmoothMap, differential, phwc_residual_coord, tension

__all__ = [
    "NotPHWCAtPoint",
    "RankDeficiencyAmbiguous",
    "RankJumpOnStencil",
    "FStructurePoint",
    "TwoFormPoint",
    "associated_f_structure",
    "f_field_of_map",
    "constant_f_field",
    "f_holomorphy_residual",
    "dphi_kernel_residual",
    "nijenhuis_residual",
    "parallel_residual",
    "fundamental_two_form",
    "domega_12_residual",
    "met_residual",
    "SuiteSample",
    "SuiteTolerances",
    "SuiteRecord",
    "TheoremSuiteReport",
    "theorem_suite",
]

PHWC_GATE = 1e-8
RANK_TOL = 1e-8
H_STEP = 1e-4


class NotPHWCAtPoint(ValueError):
    """The map fails the PHWC gate at the requested point."""


class RankDeficiencyAmbiguous(ValueError):
    """A pivot norm fell inside [rank_tol/10, rank_tol]; the rank of the
    isotropic span cannot be decided at this tolerance."""


class RankJumpOnStencil(ValueError):
    """The f-structure rank differs across a difference stencil."""


@dataclass
class FStructurePoint:
    """Associated f-structure at a point.

    F is real with eigenvalues +i, -i, 0; Pplus/Pminus/Pzero are the
    eigenprojectors (g-orthogonal, not Euclidean-orthogonal), and rank is the
    rank of F, twice the complex rank of the isotropic span.
    """

    F: np.ndarray          # (m, m) real
    Pplus: np.ndarray      # (m, m) complex
    Pminus: np.ndarray     # (m, m) complex
    Pzero: np.ndarray      # (m, m) complex (real-valued)
    rank: int
    gm: np.ndarray         # metric matrix at the point
    basis_plus: np.ndarray   # (m, k) columns spanning the +i eigenspace
    basis_zero: np.ndarray   # (m, m-rank) real columns spanning ker F

    @property
    def m(self) -> int:
        return self.F.shape[0]

    def algebra_residual(self) -> float:
        """Worst violation of the defining algebra of an f-structure."""
        eye = np.eye(self.m)
        gf = self.gm @ self.F
        checks = [
            self.F @ self.F @ self.F + self.F,
            gf + gf.T,
            self.Pplus + self.Pminus + self.Pzero - eye,
            self.Pplus @ self.Pplus - self.Pplus,
            self.Pminus @ self.Pminus - self.Pminus,
            self.Pzero @ self.Pzero - self.Pzero,
            self.Pplus @ self.Pminus,
            self.Pminus @ self.Pplus,
            self.Pplus @ self.Pzero,
            self.Pzero @ self.Pplus,
            self.F - np.real(1j * (self.Pplus - self.Pminus)),
            self.Pminus - np.conj(self.Pplus),
        ]
        return float(max(np.max(np.abs(c)) for c in checks))

    @classmethod
    def from_matrix(cls, F: np.ndarray, gm: np.ndarray) -> "FStructurePoint":
        """Wrap a hand-built f-structure matrix (F^3 + F = 0 assumed)."""
        F = np.asarray(F, dtype=float)
        m = F.shape[0]
        pplus = -0.5 * (F @ F + 1j * F)
        pminus = np.conj(pplus)
        pzero = np.eye(m) - pplus - pminus
        k = int(round(np.trace(pplus).real))
        basis_plus = _column_space(pplus, k)
        basis_zero = _column_space(np.real(pzero), m - 2 * k).real
        return cls(F=F, Pplus=pplus, Pminus=pminus, Pzero=pzero, rank=2 * k,
                   gm=np.asarray(gm, dtype=float), basis_plus=basis_plus,
                   basis_zero=basis_zero)


def _column_space(a: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((a.shape[0], 0), dtype=a.dtype)
    u, s, _ = np.linalg.svd(a)
    return u[:, :k]


def associated_f_structure(phi: SmoothMap, g: MetricField, p,
                           rank_tol: float = RANK_TOL,
                           phwc_gate: float = PHWC_GATE) -> FStructurePoint:
    """Build F at p from the isotropic span of the raised differentials.

    The raised vectors v_a = g^{-1} (d phi^a) are orthonormalised by pivoted
    Gram-Schmidt under the Hermitian product <X, Y> = g(X, conj Y); their
    span carries the -i eigenvalue on tangent vectors and its conjugate the
    +i eigenvalue (this is the orientation under which dphi intertwines F
    with multiplication by i on the target).  Pivot norms below rank_tol/10
    are dropped; norms inside [rank_tol/10, rank_tol] raise
    RankDeficiencyAmbiguous rather than silently deciding the rank.
    """
    resid = phwc_residual_coord(phi, g, p)
    if not resid <= phwc_gate:
        raise NotPHWCAtPoint(
            f"PHWC residual {resid:.3e} exceeds the gate {phwc_gate:.1e} at {p}")
    gm = g.matrix(p)
    ginv = np.linalg.inv(gm)
    dphi = differential(phi, p).dphi
    vectors = [ginv @ row for row in dphi]
    m = gm.shape[0]

    def hnorm(x):
        return float(np.sqrt(max(np.real(np.conj(x) @ gm @ x), 0.0)))

    basis: list[np.ndarray] = []
    work = [v.astype(complex) for v in vectors]
    while work:
        norms = [hnorm(w) for w in work]
        imax = int(np.argmax(norms))
        top = norms[imax]
        if top < rank_tol / 10:
            break
        if top < rank_tol:
            raise RankDeficiencyAmbiguous(
                f"pivot norm {top:.3e} inside [{rank_tol / 10:.1e}, "
                f"{rank_tol:.1e}] at {p}")
        e = work.pop(imax) / top
        basis.append(e)
        work = [w - (np.conj(e) @ gm @ w) * e for w in work]

    k = len(basis)
    if k:
        emat = np.column_stack(basis)
        pminus = emat @ np.conj(emat).T @ gm
    else:
        emat = np.zeros((m, 0), dtype=complex)
        pminus = np.zeros((m, m), dtype=complex)
    pplus = np.conj(pminus)
    pzero = np.eye(m) - pplus - pminus
    f_mat = 2.0 * np.imag(pminus)          # equals real(i (P+ - P-)) exactly
    basis_zero = _column_space(np.real(pzero), m - 2 * k).real
    return FStructurePoint(F=f_mat, Pplus=pplus, Pminus=pminus, Pzero=pzero,
                           rank=2 * k, gm=gm, basis_plus=np.conj(emat),
                           basis_zero=basis_zero)


def f_field_of_map(phi: SmoothMap, g: MetricField,
                   rank_tol: float = RANK_TOL,
                   phwc_gate: float = PHWC_GATE):
    """Pointwise F-field of a map, for the stencil operations below."""
    return lambda x: associated_f_structure(phi, g, x, rank_tol, phwc_gate)


def constant_f_field(F: np.ndarray, g: MetricField):
    """Field with the same matrix everywhere (metric still evaluated)."""
    return lambda x: FStructurePoint.from_matrix(F, g.matrix(x))


def _as_field(source, g, rank_tol, phwc_gate):
    if isinstance(source, SmoothMap):
        return f_field_of_map(source, g, rank_tol, phwc_gate)
    return source


def f_holomorphy_residual(phi: SmoothMap, fp: FStructurePoint, p) -> float:
    """max | (dphi . F)^a_j - i (dphi)^a_j | on the holomorphic rows.

    Zero means dphi intertwines F with the complex structure of the chart.
    """
    dphi = differential(phi, p).dphi
    return float(np.max(np.abs(dphi @ fp.F - 1j * dphi)))


def dphi_kernel_residual(phi: SmoothMap, fp: FStructurePoint, p) -> float:
    """max | dphi . Pzero |: the differential must kill the 0-eigenspace."""
    dphi = differential(phi, p).dphi
    return float(np.max(np.abs(dphi @ fp.Pzero)))


def _stencil(field, p, h_step):
    """Center and +/- h values of the field; ranks must agree."""
    p = np.asarray(p, dtype=float)
    m = len(p)
    center = field(p)
    plus, minus = [], []
    for l in range(m):
        e = np.zeros(m)
        e[l] = h_step
        plus.append(field(p + e))
        minus.append(field(p - e))
    ranks = {fp.rank for fp in plus + minus + [center]}
    if len(ranks) != 1:
        raise RankJumpOnStencil(
            f"f-structure rank takes values {sorted(ranks)} on the stencil "
            f"around {p}; derivatives are meaningless there")
    return center, plus, minus


def _field_derivative(plus, minus, attr, h_step):
    return np.array([(getattr(fp, attr) - getattr(fm, attr)) / (2 * h_step)
                     for fp, fm in zip(plus, minus)])


def nijenhuis_residual(source, g: MetricField, p,
                       h_step: float = H_STEP,
                       rank_tol: float = RANK_TOL,
                       phwc_gate: float = PHWC_GATE) -> float:
    """max component of the Nijenhuis tensor of the F-field at p.

    N^k_ij = F^l_i d_l F^k_j - F^l_j d_l F^k_i - F^k_l (d_i F^l_j - d_j F^l_i),
    with the field derivatives taken by central differences.
    """
    field_fn = _as_field(source, g, rank_tol, phwc_gate)
    center, plus, minus = _stencil(field_fn, p, h_step)
    f_mat = center.F
    df = _field_derivative(plus, minus, "F", h_step)  # df[l, k, j] = d_l F^k_j
    term1 = np.einsum("li,lkj->kij", f_mat, df)
    term2 = np.einsum("lj,lki->kij", f_mat, df)
    curl = np.einsum("ilj->lij", df) - np.einsum("jli->lij", df)
    term3 = np.einsum("kl,lij->kij", f_mat, curl)
    return float(np.max(np.abs(term1 - term2 - term3)))


def parallel_residual(source, g: MetricField, p,
                      h_step: float = H_STEP,
                      rank_tol: float = RANK_TOL,
                      phwc_gate: float = PHWC_GATE) -> float:
    """max component of the covariant derivative of the F-field at p:
    (nabla_i F)^k_j = d_i F^k_j + Gamma^k_il F^l_j - Gamma^l_ij F^k_l."""
    field_fn = _as_field(source, g, rank_tol, phwc_gate)
    center, plus, minus = _stencil(field_fn, p, h_step)
    f_mat = center.F
    df = _field_derivative(plus, minus, "F", h_step)
    gamma = christoffel_domain(g, p).gamma
    nabla = (df
             + np.einsum("kil,lj->ikj", gamma, f_mat)
             - np.einsum("lij,kl->ikj", gamma, f_mat))
    return float(np.max(np.abs(nabla)))


@dataclass
class TwoFormPoint:
    """Fundamental 2-form omega_ij = g_ik F^k_j and its exterior derivative
    (domega)_ijk = d_i omega_jk - d_j omega_ik + d_k omega_ij."""

    omega: np.ndarray    # (m, m) real antisymmetric
    domega: np.ndarray   # (m, m, m) real fully antisymmetric


def fundamental_two_form(g: MetricField, source, p,
                         h_step: float = H_STEP,
                         rank_tol: float = RANK_TOL,
                         phwc_gate: float = PHWC_GATE) -> TwoFormPoint:
    field_fn = _as_field(source, g, rank_tol, phwc_gate)
    p = np.asarray(p, dtype=float)
    m = len(p)
    center = field_fn(p)

    def omega_at(x, fp):
        return g.matrix(x) @ fp.F

    omega0 = center.gm @ center.F
    domega_partials = np.empty((m, m, m))
    ranks = {center.rank}
    for l in range(m):
        e = np.zeros(m)
        e[l] = h_step
        fp, fm = field_fn(p + e), field_fn(p - e)
        ranks.update((fp.rank, fm.rank))
        domega_partials[l] = (omega_at(p + e, fp) - omega_at(p - e, fm)) / (2 * h_step)
    if len(ranks) != 1:
        raise RankJumpOnStencil(
            f"f-structure rank takes values {sorted(ranks)} on the stencil "
            f"around {p}")
    domega = (domega_partials
              - np.einsum("jik->ijk", domega_partials)
              + np.einsum("kij->ijk", domega_partials))
    return TwoFormPoint(omega=omega0, domega=domega)


def domega_12_residual(g: MetricField, source, p,
                       h_step: float = H_STEP,
                       rank_tol: float = RANK_TOL,
                       phwc_gate: float = PHWC_GATE) -> float:
    """max |domega(u, v, w)| over u, v of one eigenspace type and w of a
    different type, the types taken from the projectors at the center point."""
    field_fn = _as_field(source, g, rank_tol, phwc_gate)
    center = field_fn(np.asarray(p, dtype=float))
    two_form = fundamental_two_form(g, field_fn, p, h_step, rank_tol, phwc_gate)
    bases = {
        "+": center.basis_plus,
        "-": np.conj(center.basis_plus),
        "0": center.basis_zero.astype(complex),
    }
    worst = 0.0
    for t_same, b_same in bases.items():
        if b_same.shape[1] < 2:
            continue
        for t_other, b_other in bases.items():
            if t_other == t_same or b_other.shape[1] == 0:
                continue
            vals = np.einsum("ijk,ia,jb,kc->abc",
                             two_form.domega.astype(complex),
                             b_same, b_same, b_other)
            worst = max(worst, float(np.max(np.abs(vals))))
    return worst


def met_residual(g: MetricField, source, p,
                 h_step: float = H_STEP,
                 rank_tol: float = RANK_TOL,
                 phwc_gate: float = PHWC_GATE) -> float:
    """Defect of: covariant derivatives of +type covectors along the
    0-eigenspace stay inside the +/- covector types.

    Builds sections theta_b(x) = Q(x) theta_b(p) of the +type covector
    bundle, with Q = g Pplus g^{-1} the covector projector, differentiates
    them on the stencil, and measures the 0-type component of
    nabla_{X_a} theta_b for a real basis X_a of ker F.  Vacuously zero when
    the structure has full rank.
    """
    field_fn = _as_field(source, g, rank_tol, phwc_gate)
    p = np.asarray(p, dtype=float)
    m = len(p)
    center = field_fn(p)
    if center.rank == m:
        return 0.0
    gm = center.gm
    ginv = np.linalg.inv(gm)
    # +type covectors are the lowerings of the -i tangent eigenspace
    thetas = gm @ np.conj(center.basis_plus)

    def covector_projector(x, fp):
        gx = g.matrix(x)
        return gx @ fp.Pminus @ np.linalg.inv(gx)

    dtheta = np.empty((m,) + thetas.shape, dtype=complex)
    ranks = {center.rank}
    for l in range(m):
        e = np.zeros(m)
        e[l] = h_step
        fp, fm = field_fn(p + e), field_fn(p - e)
        ranks.update((fp.rank, fm.rank))
        sec_p = covector_projector(p + e, fp) @ thetas
        sec_m = covector_projector(p - e, fm) @ thetas
        dtheta[l] = (sec_p - sec_m) / (2 * h_step)
    if len(ranks) != 1:
        raise RankJumpOnStencil(
            f"f-structure rank takes values {sorted(ranks)} on the stencil "
            f"around {p}")

    gamma = christoffel_domain(g, p).gamma
    qzero = gm @ center.Pzero @ ginv
    worst = 0.0
    for x_vec in center.basis_zero.T:
        for b in range(thetas.shape[1]):
            # (nabla_X theta)_i = X^l d_l theta_i - X^l Gamma^k_{l i} theta_k
            grad_part = np.einsum("l,li->i", x_vec, dtheta[:, :, b])
            conn_part = np.einsum("l,kli,k->i", x_vec, gamma, thetas[:, b])
            zero_component = qzero @ (grad_part - conn_part)
            worst = max(worst, float(np.linalg.norm(zero_component)))
    return worst


# ---------------------------------------------------------------------------
# theorem implication harness
# ---------------------------------------------------------------------------

@dataclass
class SuiteSample:
    """One map with its geometry and evaluation points."""

    name: str
    phi: SmoothMap
    g: MetricField
    h: HermitianMetricField
    points: np.ndarray


@dataclass
class SuiteTolerances:
    eps: float = 1e-8          # hypothesis residuals count as zero below this
    delta: float = 1e-6        # conclusion: harmonicity threshold
    phwc_gate: float = PHWC_GATE
    kaehler_tol: float = 1e-8
    h_step: float = H_STEP
    rank_tol: float = RANK_TOL


@dataclass
class SuiteRecord:
    sample: str
    point: list
    status: str                # "ok" | "skipped" | "counterexample"
    reasons: list
    residuals: dict


@dataclass
class TheoremSuiteReport:
    records: list
    checked: int = 0
    skipped: int = 0
    counterexamples: int = 0

    def counterexample_records(self):
        return [r for r in self.records if r.status == "counterexample"]


def theorem_suite(samples, tol: SuiteTolerances | None = None) -> TheoremSuiteReport:
    """Test the two harmonicity implications over a family of PHWC maps.

    For every sample point: (a) a parallel associated f-structure must come
    with vanishing tension; (b) so must an integrable one whose fundamental
    2-form has no (1,2) part and whose +type covectors satisfy the mixed
    covariant-derivative condition.  Hypotheses are measured, not assumed;
    in particular a Kaehler flag that contradicts the measured closedness
    residual of the target metric is itself reported as a counterexample,
    because every conclusion below relies on it.
    """
    tol = tol or SuiteTolerances()
    records = []
    report = TheoremSuiteReport(records=records)
    for sample in samples:
        field_fn = f_field_of_map(sample.phi, sample.g, tol.rank_tol,
                                  tol.phwc_gate)
        for point in np.atleast_2d(np.asarray(sample.points, dtype=float)):
            rec = SuiteRecord(sample=sample.name, point=list(point),
                              status="ok", reasons=[], residuals={})
            records.append(rec)

            if sample.h.kaehler:
                kr = kaehler_residual(sample.h, sample.phi.value(point))
                rec.residuals["kaehler"] = kr
                if kr > tol.kaehler_tol:
                    rec.status = "counterexample"
                    rec.reasons.append("kaehler_flag_violation")
                    report.counterexamples += 1
                    continue

            try:
                resid = {
                    "phwc": phwc_residual_coord(sample.phi, sample.g, point),
                    "parallel": parallel_residual(field_fn, sample.g, point,
                                                  tol.h_step, tol.rank_tol),
                    "nijenhuis": nijenhuis_residual(field_fn, sample.g, point,
                                                    tol.h_step, tol.rank_tol),
                    "met": met_residual(sample.g, field_fn, point,
                                        tol.h_step, tol.rank_tol),
                    "domega12": domega_12_residual(sample.g, field_fn, point,
                                                   tol.h_step, tol.rank_tol),
                    "harmonic": tension(sample.phi, sample.g, sample.h,
                                        point).harmonic_residual,
                }
            except (NotPHWCAtPoint, RankDeficiencyAmbiguous,
                    RankJumpOnStencil) as err:
                rec.status = "skipped"
                rec.reasons.append(type(err).__name__)
                report.skipped += 1
                continue

            rec.residuals.update(resid)
            report.checked += 1
            if resid["parallel"] <= tol.eps and resid["harmonic"] > tol.delta:
                rec.status = "counterexample"
                rec.reasons.append("parallel_implies_harmonic")
            if (resid["nijenhuis"] <= tol.eps and resid["met"] <= tol.eps
                    and resid["domega12"] <= tol.eps
                    and resid["harmonic"] > tol.delta):
                rec.status = "counterexample"
                rec.reasons.append("integrable_met_sym_implies_harmonic")
            if rec.status == "counterexample":
                report.counterexamples += 1
    return report
