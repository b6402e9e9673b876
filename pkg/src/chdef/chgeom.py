"""Numeric complex-hyperbolic geometry: points, horoballs, classification, audits.

The model is projective: a Hermitian form H(X, Y) = X^T J conj(Y) of
signature (n, 1) on C^{n+1}, interior points are lines with H(Z, Z) < 0,
boundary points are null lines.  All quantities below are invariant under
rescaling lifts and under form isometries, and the tests pin both.

Formulas used throughout (O is a fixed interior basepoint lift):

* distance:  cosh^2(d(P,Q)/2) = |H(P,Q)|^2 / (H(P,P) H(Q,Q))
* Busemann function at boundary point Q, normalized to 0 at O:
      B_Q(Z) = log( |H(Z,Q)|^2 H(O,O) / (H(Z,Z) |H(O,Q)|^2) )
  A horoball is a sublevel set {B_Q <= level}.
* Along any geodesic with ideal endpoint Q, B_Q changes by exactly the
  (signed) arclength; geodesics here are parameterized so that arclength
  equals 2t, which makes every Busemann profile affine with slope +-2 in t.
  Orthogeodesic lengths and horoball tangency therefore reduce to closed
  forms, and the sampling oracles in the tests cross-check them.

Tolerances are centralized in ``Tolerances`` and can be overridden via the
environment (CHDEF_TOL_NULL, _EIG, _RANK, _SIG, _FORM).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._eig import CLUSTER_RADIUS, cluster_points
from .words import Representation, Word


class GeometryError(ValueError):
    pass


class FormError(GeometryError):
    """Matrix is not compatible with the form (or the form is not Hermitian)."""


class PoleError(GeometryError):
    """Busemann evaluation at a point polar to the base."""


class BasePointError(GeometryError):
    """Horoball base points coincide where distinct ones are required."""


class NoNullEigenvector(GeometryError):
    pass


class ClassificationError(GeometryError):
    pass


class AuditError(GeometryError):
    pass


_ENV_PREFIX = "CHDEF_TOL_"


@dataclass(frozen=True)
class Tolerances:
    """Default tolerance ladder; every knob is env-overridable."""

    null: float = 1e-8   # form-null tests, relative to ||J||
    eig: float = 1e-8    # unit-circle and equality tests on cluster means
    rank: float = 1e-8   # singular-value cutoff, relative to ||A||
    sig: float = 1e-8    # inertia zero-band, relative to ||J||
    form: float = 1e-8   # form-compatibility precondition

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        kwargs = {}
        for name in ("null", "eig", "rank", "sig", "form"):
            raw = environ.get(_ENV_PREFIX + name.upper())
            if raw is not None:
                try:
                    kwargs[name] = float(raw)
                except ValueError as exc:
                    raise GeometryError(f"bad {_ENV_PREFIX}{name.upper()}={raw!r}") from exc
        return cls(**kwargs)


class HermitianForm:
    """Wrapper around a numeric Hermitian matrix of signature (n, 1)."""

    def __init__(self, matrix, tol: Tolerances | None = None):
        self.tol = tol or Tolerances()
        j = np.asarray(matrix, dtype=complex)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise FormError("form matrix must be square")
        self.norm = float(np.linalg.norm(j, 2))
        if self.norm == 0 or np.max(np.abs(j - j.conj().T)) > 1e-12 * self.norm:
            raise FormError("form matrix must be Hermitian and nonzero")
        self.matrix = (j + j.conj().T) / 2
        self.dim = j.shape[0]
        eigs = np.linalg.eigvalsh(self.matrix)
        cut = self.tol.sig * self.norm
        self.inertia = (
            int(np.sum(eigs > cut)),
            int(np.sum(eigs < -cut)),
            int(np.sum(np.abs(eigs) <= cut)),
        )
        self._origin: np.ndarray | None = None

    def require_hyperbolic(self):
        p, q, z = self.inertia
        if q != 1 or z != 0:
            raise FormError(f"signature {self.inertia} is not (n, 1)")

    def inner(self, x, y) -> complex:
        """H(x, y): linear in x, conjugate-linear in y."""
        return complex(np.asarray(x) @ self.matrix @ np.conj(np.asarray(y)))

    def origin(self) -> np.ndarray:
        """Deterministic interior basepoint lift: the negative eigendirection."""
        if self._origin is None:
            self.require_hyperbolic()
            eigs, vecs = np.linalg.eigh(self.matrix)
            v = vecs[:, int(np.argmin(eigs))]
            self._origin = _normalize_phase(v)
        return self._origin

    def compatibility_residual(self, a: np.ndarray) -> float:
        """Relative size of A^T J conj(A) - J."""
        a = np.asarray(a, dtype=complex)
        res = a.T @ self.matrix @ a.conj() - self.matrix
        scale = self.norm * max(1.0, float(np.linalg.norm(a, 2)) ** 2)
        return float(np.linalg.norm(res, 2)) / scale

    def require_compatible(self, a: np.ndarray):
        if self.compatibility_residual(a) > self.tol.form:
            raise FormError("matrix does not preserve the form within tolerance")


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise GeometryError("zero lift")
    v = v / nrm
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k])
    return v * np.conj(phase)


def projective_sine(a, b) -> float:
    """Sine of the angle between two complex lines (0 iff equal)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise GeometryError("zero lift")
    a, b = a / na, b / nb
    rej = b - a * np.vdot(a, b)
    return float(np.linalg.norm(rej))


class ProjPoint:
    """Interior point: a lift with H(Z, Z) < 0."""

    __slots__ = ("form", "lift")

    def __init__(self, form: HermitianForm, lift):
        self.form = form
        self.lift = np.asarray(lift, dtype=complex)
        if self.lift.shape != (form.dim,):
            raise GeometryError("lift has wrong dimension")
        if self.form.inner(self.lift, self.lift).real >= 0:
            raise GeometryError("lift is not negative for the form (not interior)")


class BoundaryPoint:
    """Boundary point: a lift on the null cone of the form."""

    __slots__ = ("form", "lift")

    def __init__(self, form: HermitianForm, lift, tol: float | None = None):
        self.form = form
        self.lift = np.asarray(lift, dtype=complex)
        if self.lift.shape != (form.dim,):
            raise GeometryError("lift has wrong dimension")
        nrm = float(np.linalg.norm(self.lift))
        if nrm == 0:
            raise GeometryError("zero lift")
        cut = (tol if tol is not None else form.tol.null) * form.norm * nrm * nrm
        if abs(self.form.inner(self.lift, self.lift)) > cut:
            raise GeometryError("lift is not null for the form within tolerance")


@dataclass(frozen=True)
class Horoball:
    """Sublevel set {B_base <= level} of the Busemann function at the base."""

    base: BoundaryPoint
    level: float


def distance(form: HermitianForm, p: ProjPoint, q: ProjPoint) -> float:
    num = abs(form.inner(p.lift, q.lift)) ** 2
    den = form.inner(p.lift, p.lift).real * form.inner(q.lift, q.lift).real
    val = num / den
    if val < 1.0 - 1e-9:
        raise GeometryError(f"cosh^2(d/2) = {val} < 1: invalid point data")
    return 2.0 * math.acosh(math.sqrt(max(val, 1.0)))


def busemann(form: HermitianForm, base: BoundaryPoint, origin: ProjPoint, z: ProjPoint) -> float:
    zq = abs(form.inner(z.lift, base.lift)) ** 2
    oq = abs(form.inner(origin.lift, base.lift)) ** 2
    zz = form.inner(z.lift, z.lift).real
    oo = form.inner(origin.lift, origin.lift).real
    nz = float(np.linalg.norm(z.lift)) ** 2
    if zq <= 1e-30 * form.norm**2 * nz * float(np.linalg.norm(base.lift)) ** 2:
        raise PoleError("Busemann function undefined: point is polar to the base")
    if oq == 0:
        raise PoleError("origin is polar to the base")
    return math.log(zq * oo / (zz * oq))


def _phase_align(form: HermitianForm, x: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, float]:
    """Rescale q by a phase so that H(x, q) is real and positive."""
    h = form.inner(x, q)
    if abs(h) == 0:
        raise GeometryError("point is polar to the boundary lift")
    return q * (h / abs(h)), abs(h)


class BoundaryRay:
    """Geodesic with ideal endpoints base (t -> -inf) and tip (t -> +inf),
    passing through a given interior point at t = 0; arclength is 2|t|."""

    __slots__ = ("form", "back", "tip", "pairing")

    def __init__(self, form: HermitianForm, base: BoundaryPoint, through: ProjPoint):
        x = through.lift / math.sqrt(-form.inner(through.lift, through.lift).real)
        q = base.lift / np.linalg.norm(base.lift)
        q_aligned, h = _phase_align(form, x, q)
        self.form = form
        self.back = q_aligned           # null lift of the base
        self.tip = 2.0 * h * x + q_aligned  # null lift of the forward endpoint
        self.pairing = h                # H(z(t), z(t)) = -4 h^2 for all t

    def point(self, t: float) -> np.ndarray:
        return math.exp(t) * self.tip - math.exp(-t) * self.back


def point_on_horosphere(
    form: HermitianForm, ball: Horoball, through: ProjPoint | None = None
) -> ProjPoint:
    """The point of {B = level} on the ray from the base through ``through``
    (default: through the origin).  Closed form: B is affine along the ray."""
    origin = ProjPoint(form, form.origin())
    through = through or origin
    ray = BoundaryRay(form, ball.base, through)
    b0 = busemann(form, ball.base, origin, through)
    t = 0.5 * (ball.level - b0)
    return ProjPoint(form, ray.point(t))


class JoiningGeodesic:
    """Geodesic between two distinct boundary points; arclength is 2|t|.

    B_{q1} = 2t + a1 and B_{q2} = -2t + a2 exactly along it, which the
    horoball separation logic exploits.
    """

    __slots__ = ("form", "q1", "q2", "pairing")

    def __init__(self, form: HermitianForm, b1: BoundaryPoint, b2: BoundaryPoint):
        q1 = b1.lift / np.linalg.norm(b1.lift)
        q2 = b2.lift / np.linalg.norm(b2.lift)
        if projective_sine(q1, q2) < 1e-8:
            raise BasePointError("boundary points coincide")
        h = form.inner(q1, q2)
        if abs(h) == 0:
            raise GeometryError("degenerate pair of boundary lifts")
        self.form = form
        self.q1 = q1
        self.q2 = q2 * (-h / abs(h))   # now H(q1, q2') = -|h| < 0
        self.pairing = abs(h)          # H(z(t), z(t)) = -2|h| for all t

    def point(self, t: float) -> np.ndarray:
        return math.exp(-t) * self.q1 + math.exp(t) * self.q2


def geodesic_between(form: HermitianForm, p: ProjPoint, q: ProjPoint):
    """Unit-speed-in-2t geodesic through two interior points: returns
    (point(t), half_distance) with point(0) = p and point(half_distance) = q."""
    pp = p.lift / math.sqrt(-form.inner(p.lift, p.lift).real)
    qq = q.lift / math.sqrt(-form.inner(q.lift, q.lift).real)
    h = form.inner(qq, pp)
    if abs(h) > 0:
        qq = qq * (-abs(h) / h)  # phase so that H(q, p) = -cosh(d/2), real
    t_half = 0.5 * distance(form, p, q)
    if t_half == 0:
        return (lambda t: pp), 0.0
    v = (qq - math.cosh(t_half) * pp) / math.sinh(t_half)

    def point(t: float) -> np.ndarray:
        return math.cosh(t) * pp + math.sinh(t) * v

    return point, t_half


def orthogeodesic_length(form: HermitianForm, h1: Horoball, h2: Horoball) -> float:
    """Signed gap between two horoballs along their joining geodesic.

    Positive iff the closed horoballs are disjoint; the affine Busemann
    profiles give length = B1(z0) + B2(z0) - level1 - level2 for any z0 on
    the joining geodesic.
    """
    geo = JoiningGeodesic(form, h1.base, h2.base)
    origin = ProjPoint(form, form.origin())
    z0 = ProjPoint(form, geo.point(0.0))
    a1 = busemann(form, h1.base, origin, z0)
    a2 = busemann(form, h2.base, origin, z0)
    return a1 + a2 - h1.level - h2.level


def orthogeodesic_feet(form: HermitianForm, h1: Horoball, h2: Horoball) -> tuple[ProjPoint, ProjPoint]:
    """Entry/exit points of the joining geodesic on the two horospheres."""
    geo = JoiningGeodesic(form, h1.base, h2.base)
    origin = ProjPoint(form, form.origin())
    z0 = ProjPoint(form, geo.point(0.0))
    a1 = busemann(form, h1.base, origin, z0)
    a2 = busemann(form, h2.base, origin, z0)
    t1 = 0.5 * (h1.level - a1)
    t2 = 0.5 * (a2 - h2.level)
    return ProjPoint(form, geo.point(t1)), ProjPoint(form, geo.point(t2))


def shadow_contains(form: HermitianForm, h1: Horoball, h2: Horoball, x: ProjPoint) -> bool:
    """Whether the outward geodesic ray from x (away from h1's base) meets
    the closed horoball h2 (x must lie on the horosphere of h1, and h1, h2
    disjoint).

    Along the ray, |H(z(t), Q2)|^2 = e^{2t}|A|^2 + 2 Re(conj(A) B) + e^{-2t}|B|^2
    while H(z, z) is constant, so min_{t >= 0} B2 is a closed form: the
    unconstrained minimizer sits at e^{2t*} = |B|/|A|, and when it falls at
    t* < 0 the outward ray only recedes from h2.
    """
    if orthogeodesic_length(form, h1, h2) <= 0:
        raise GeometryError("shadow test requires disjoint horoballs")
    origin = ProjPoint(form, form.origin())
    b1 = busemann(form, h1.base, origin, x)
    if abs(b1 - h1.level) > 1e-8 * max(1.0, abs(h1.level)):
        raise GeometryError("x does not lie on the horosphere of h1")
    ray = BoundaryRay(form, h1.base, x)
    q2 = h2.base.lift / np.linalg.norm(h2.base.lift)
    a = form.inner(ray.tip, q2)
    b = -form.inner(ray.back, q2)
    if abs(b) < abs(a):
        # minimum behind x: on t >= 0 the Busemann value only grows, and
        # B2(x) > level2 already holds because the horoballs are disjoint
        return False
    fmin = 2.0 * (abs(a) * abs(b) + (np.conj(a) * b).real)
    if fmin <= 0:
        return True  # ray passes through (or ends at) the base of h2
    zz = -4.0 * ray.pairing**2
    oo = form.inner(origin.lift, origin.lift).real
    oq = abs(form.inner(origin.lift, q2)) ** 2
    b2_min = math.log(fmin * oo / (zz * oq))
    return b2_min <= h2.level


# ---------------------------------------------------------------------------
# isometry classification
# ---------------------------------------------------------------------------

TAG_LOXODROMIC = "loxodromic"
TAG_UNIPOTENT = "parabolic-unipotent"
TAG_ELLIPTO_PARABOLIC = "ellipto-parabolic"
TAG_BOUNDARY_ELLIPTIC = "elliptic-boundary"
TAG_SINGLE_POINT = "elliptic-single-point"
TAG_IDENTITY = "identity"
TAG_INDETERMINATE = "indeterminate"


@dataclass
class IsometryClass:
    tag: str
    eigenvalues: list          # cluster means repeated with multiplicity, sorted
    clusters: list             # (mean, algebraic multiplicity, geometric multiplicity)
    rotation_angles: list | None = None
    fixed_lift: np.ndarray | None = None
    detail: str = ""


def _eig_clusters(a: np.ndarray, scale: float) -> list[tuple[complex, int]]:
    vals = np.linalg.eigvals(a)
    return cluster_points(vals, CLUSTER_RADIUS * max(1.0, scale))


def _kernel_basis(a: np.ndarray, mu: complex, cut: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the numeric kernel of (A - mu I) and all
    singular values (ascending)."""
    shifted = a - mu * np.eye(a.shape[0])
    _, svals, vh = np.linalg.svd(shifted)
    svals = svals[::-1]
    count = int(np.sum(svals <= cut))
    basis = vh.conj().T[:, ::-1][:, :count] if count else np.zeros((a.shape[0], 0))
    return basis, svals


def _null_vector_in_span(form: HermitianForm, basis: np.ndarray) -> np.ndarray | None:
    """A form-null unit vector inside span(basis columns), or None.

    With v = basis @ c the value H(v, v) equals c^dagger conj(G) c for the
    Gram matrix G[i,j] = H(b_i, b_j), so diagonalizing conj(G) reduces the
    search to the signs of its eigenvalues.
    """
    if basis.shape[1] == 0:
        return None
    g = basis.T @ form.matrix @ basis.conj()
    w, vecs = np.linalg.eigh(np.conj(g))
    cut = form.tol.null * form.norm
    zero = np.where(np.abs(w) <= cut)[0]
    if len(zero):
        return _normalize_phase(basis @ vecs[:, zero[0]])
    if w[0] < -cut and w[-1] > cut:
        c = vecs[:, -1] * math.sqrt(-w[0]) + vecs[:, 0] * math.sqrt(w[-1])
        return _normalize_phase(basis @ c)
    return None


def _negative_vector_in_span(form: HermitianForm, basis: np.ndarray) -> np.ndarray | None:
    if basis.shape[1] == 0:
        return None
    g = basis.T @ form.matrix @ basis.conj()
    w, vecs = np.linalg.eigh(np.conj(g))
    if w[0] < -form.tol.null * form.norm:
        return _normalize_phase(basis @ vecs[:, 0])
    return None


def classify_isometry(form: HermitianForm, a, tol: Tolerances | None = None) -> IsometryClass:
    """Classify a form-compatible matrix.

    Decision order: identity, then any cluster mean off the unit circle
    (loxodromic), then diagonalizability via per-cluster numeric rank
    (elliptic: boundary or single-point), else parabolic (unipotent when all
    eigenvalues agree, ellipto-parabolic otherwise with rotation angles
    arg(lambda_k / lambda_0) against the non-semisimple eigenvalue).
    Near-threshold rank decisions return tag 'indeterminate' instead of
    guessing.
    """
    tol = tol or form.tol
    a = np.asarray(a, dtype=complex)
    if a.shape != (form.dim, form.dim):
        raise ClassificationError("matrix dimension does not match the form")
    form.require_compatible(a)
    scale = float(np.linalg.norm(a, 2))
    det = complex(np.linalg.det(a))
    if abs(det - 1.0) > tol.form * max(1.0, scale ** form.dim):
        raise FormError("matrix determinant is not 1 within tolerance")

    if float(np.max(np.abs(a - np.eye(form.dim)))) <= tol.eig * max(1.0, scale):
        return IsometryClass(TAG_IDENTITY, [1.0 + 0j] * form.dim,
                             [(1.0 + 0j, form.dim, form.dim)])

    clusters = _eig_clusters(a, scale)
    eigenvalues = [m for m, k in clusters for _ in range(k)]

    off_circle = [m for m, _ in clusters if abs(abs(m) - 1.0) > tol.eig * max(1.0, scale)]
    if off_circle:
        return IsometryClass(TAG_LOXODROMIC, eigenvalues,
                             [(m, k, 0) for m, k in clusters],
                             detail="eigenvalue off the unit circle")

    cut = tol.rank * max(1.0, scale)
    enriched = []
    borderline = False
    for mean, mult in clusters:
        basis, svals = _kernel_basis(a, mean, cut)
        geo = basis.shape[1]
        if any(0.1 * cut < s < 10.0 * cut for s in svals):
            borderline = True
        enriched.append((mean, mult, geo, basis))
    if borderline:
        return IsometryClass(TAG_INDETERMINATE, eigenvalues,
                             [(m, k, g) for m, k, g, _ in enriched],
                             detail="singular value at the rank threshold")

    cluster_info = [(m, k, g) for m, k, g, _ in enriched]
    if all(g >= k for _, k, g, _ in enriched):
        # diagonalizable: elliptic; boundary type iff some eigenspace meets the null cone
        for _, _, _, basis in enriched:
            nullvec = _null_vector_in_span(form, basis)
            if nullvec is not None:
                return IsometryClass(TAG_BOUNDARY_ELLIPTIC, eigenvalues, cluster_info,
                                     fixed_lift=nullvec)
        fixed = None
        for _, _, _, basis in enriched:
            fixed = _negative_vector_in_span(form, basis)
            if fixed is not None:
                break
        return IsometryClass(TAG_SINGLE_POINT, eigenvalues, cluster_info, fixed_lift=fixed)

    defective = [(m, k, g, b) for m, k, g, b in enriched if g < k]
    if any(g == 0 for _, _, g, _ in defective):
        return IsometryClass(TAG_INDETERMINATE, eigenvalues, cluster_info,
                             detail="non-semisimple cluster with empty numeric kernel")
    lam0, _, _, basis0 = defective[0]
    fixed = _null_vector_in_span(form, basis0)
    if len(clusters) == 1:
        return IsometryClass(TAG_UNIPOTENT, eigenvalues, cluster_info, fixed_lift=fixed)
    angles = sorted(
        float(np.angle(m / lam0)) for m, k in clusters if m != lam0 for _ in range(k)
    )
    return IsometryClass(TAG_ELLIPTO_PARABOLIC, eigenvalues, cluster_info,
                         rotation_angles=angles, fixed_lift=fixed)


def fixed_boundary_point(form: HermitianForm, a, tol: Tolerances | None = None,
                         cls: IsometryClass | None = None) -> BoundaryPoint:
    """Form-null fixed lift of a parabolic or boundary-elliptic matrix."""
    cls = cls or classify_isometry(form, a, tol)
    if cls.tag not in (TAG_UNIPOTENT, TAG_ELLIPTO_PARABOLIC, TAG_BOUNDARY_ELLIPTIC):
        raise ClassificationError(f"{cls.tag} matrices have no boundary fixed point here")
    if cls.fixed_lift is None:
        raise NoNullEigenvector("no null eigenvector found within tolerance")
    return BoundaryPoint(form, cls.fixed_lift)


def transport_horoball(form: HermitianForm, g, ball: Horoball) -> Horoball:
    """Image of a horoball under a form isometry: new base g Q, new level read
    off by transporting a marked horosphere point."""
    g = np.asarray(g, dtype=complex)
    new_base = BoundaryPoint(form, g @ ball.base.lift)
    marked = point_on_horosphere(form, ball)
    origin = ProjPoint(form, form.origin())
    new_level = busemann(form, new_base, origin, ProjPoint(form, g @ marked.lift))
    return Horoball(new_base, new_level)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


@dataclass
class AuditReport:
    condition1: dict
    condition2: dict
    parabolic_audit: list
    words_tested: int
    level: float
    passed: bool
    disclaimer: str
    seed: int
    excluded_peripheral: list = field(default_factory=list)
    finite_statement: str = ""

    def to_json(self) -> dict:
        return {
            "condition1": self.condition1,
            "condition2": self.condition2,
            "parabolic_audit": self.parabolic_audit,
            "words_tested": self.words_tested,
            "level": self.level,
            "passed": self.passed,
            "disclaimer": self.disclaimer,
            "seed": self.seed,
            "excluded_peripheral": self.excluded_peripheral,
            "finite_statement": self.finite_statement,
        }


def sample_horosphere_points(
    form: HermitianForm, ball: Horoball, count: int, seed: int
) -> list[ProjPoint]:
    """Deterministic sample of points on the horosphere {B = level}."""
    rng = np.random.default_rng(seed)
    origin = form.origin()
    oo = abs(form.inner(origin, origin).real)
    points = []
    for _ in range(count):
        v = rng.standard_normal(form.dim) + 1j * rng.standard_normal(form.dim)
        v = v / np.linalg.norm(v)
        shrink = 0.3
        x = origin + shrink * v
        while form.inner(x, x).real >= -0.05 * oo:
            shrink *= 0.5
            x = origin + shrink * v
        points.append(point_on_horosphere(form, ball, ProjPoint(form, x)))
    return points


def word_matrices(rep: Representation, words) -> list[tuple[Word, np.ndarray]]:
    """Evaluate many words with shared prefixes via an incremental cache."""
    if rep.mode != "numeric":
        raise AuditError("audits run on numeric representations")
    cache: dict[tuple, np.ndarray] = {(): np.eye(rep.dim, dtype=complex)}
    gen_pow: dict[tuple[int, int], np.ndarray] = {}

    def letter_matrix(gen: int, sign: int) -> np.ndarray:
        key = (gen, sign)
        if key not in gen_pow:
            img = rep.images[gen]
            gen_pow[key] = img if sign > 0 else np.linalg.inv(img)
        return gen_pow[key]

    out = []
    for word in words:
        letters = tuple(word.letters())
        for i in range(len(letters), -1, -1):
            if letters[:i] in cache:
                break
        mat = cache[letters[:i]]
        for j in range(i, len(letters)):
            mat = mat @ letter_matrix(*letters[j])
            cache[letters[: j + 1]] = mat
        out.append((word, mat))
    return out


def _fixes_base(base: BoundaryPoint, g: np.ndarray, cut: float) -> bool:
    return projective_sine(g @ base.lift, base.lift) < cut


def _condition2_margins(
    form: HermitianForm,
    ball: Horoball,
    mats: list[tuple[Word, np.ndarray]],
    names,
    exclusion: float,
) -> tuple[list[tuple[str, float]], list[str]]:
    """Margins orthogeodesic_length(ball, g ball) for every non-peripheral g.

    Flat numpy fast path; agrees with transport_horoball followed by
    orthogeodesic_length (the tests pin the two against each other).
    """
    j = form.matrix
    origin = form.origin()
    oo = form.inner(origin, origin).real
    q1 = ball.base.lift / np.linalg.norm(ball.base.lift)
    jq1 = j @ np.conj(q1)
    oq1 = abs(origin @ jq1) ** 2
    marked = point_on_horosphere(form, ball).lift

    margins = []
    excluded = []
    for word, g in mats:
        text = word.to_text(names)
        q2 = g @ q1
        q2 = q2 / np.linalg.norm(q2)
        overlap = np.vdot(q1, q2)
        if float(np.linalg.norm(q2 - q1 * overlap)) < exclusion:
            excluded.append(text)
            continue
        jq2 = j @ np.conj(q2)
        h = q1 @ jq2
        lam = -h / abs(h)
        z0 = q1 + lam * q2
        zz0 = (z0 @ j @ np.conj(z0)).real
        a1 = math.log((abs(z0 @ jq1) ** 2) * oo / (zz0 * oq1))
        oq2 = abs(origin @ jq2) ** 2
        a2 = math.log((abs(z0 @ jq2) ** 2) * oo / (zz0 * oq2))
        gz = g @ marked
        gzz = (gz @ j @ np.conj(gz)).real
        level2 = math.log((abs(gz @ jq2) ** 2) * oo / (gzz * oq2))
        margins.append((text, a1 + a2 - ball.level - level2))
    return margins, excluded


def consistency_audit(
    form: HermitianForm,
    rep: Representation,
    cusp_gens: tuple[Word, ...],
    test_words,
    ball: Horoball,
    tol: Tolerances | None = None,
    seed: int = 0,
    sample_count: int = 50,
    parabolic_audit: list | None = None,
) -> AuditReport:
    """Finite certification of horoball consistency for one cusp.

    Condition (1): every cusp generator fixes the base point and preserves
    the Busemann level on sampled horosphere points.  Condition (2): every
    non-peripheral test word moves the horoball off itself, measured by the
    signed orthogeodesic length (margin).  Peripheral words, those fixing
    the base point within tolerance, are excluded automatically.
    """
    if rep.mode != "numeric":
        raise AuditError("audits run on numeric representations")
    tol = tol or form.tol
    names = rep.presentation.names
    origin = ProjPoint(form, form.origin())

    condition1 = {}
    samples = sample_horosphere_points(form, ball, sample_count, seed)
    cond1_pass = True
    for word in cusp_gens:
        g = rep.evaluate(word)
        fixes = _fixes_base(ball.base, g, tol.null * 10)
        if not fixes:
            raise AuditError(
                f"cusp generator {word.to_text(names)!r} does not fix the horoball base"
            )
        deviation = 0.0
        for z in samples:
            moved = ProjPoint(form, g @ z.lift)
            deviation = max(deviation, abs(busemann(form, ball.base, origin, moved) - ball.level))
        ok = bool(deviation < 1e-8 * max(1.0, abs(ball.level)))
        cond1_pass &= ok
        condition1[word.to_text(names)] = {
            "fixes_base": True,
            "max_level_deviation": deviation,
            "pass": ok,
        }

    mats = word_matrices(rep, test_words)
    margins, excluded = _condition2_margins(form, ball, mats, names, tol.null * 10)
    violations = [{"word": w, "margin": m} for w, m in margins if m <= 0]
    min_margin = min((m for _, m in margins), default=None)
    spectrum = _spectrum([m for _, m in margins])
    condition2 = {
        "min_margin": min_margin,
        "spectrum": spectrum,
        "violations": violations,
        "vacuous": not margins,
    }

    parabolic_audit = parabolic_audit if parabolic_audit is not None else []
    words_tested = len(margins)
    passed = cond1_pass and not violations
    parabolic_ok = all(entry.get("ok", False) for entry in parabolic_audit)
    if passed and parabolic_ok:
        statement = (
            f"no tested nontrivial word maps to the identity "
            f"({words_tested} words checked)"
        )
    else:
        statement = "audit failed; no faithfulness statement follows"
    return AuditReport(
        condition1=condition1,
        condition2=condition2,
        parabolic_audit=parabolic_audit,
        words_tested=words_tested,
        level=ball.level,
        passed=passed,
        disclaimer=f"certified on {words_tested} words, not a discreteness proof",
        seed=seed,
        excluded_peripheral=excluded,
        finite_statement=statement,
    )


def _spectrum(margins: list[float], decimals: int = 9) -> list[dict]:
    counts: dict[float, int] = {}
    for m in margins:
        key = round(m, decimals)
        counts[key] = counts.get(key, 0) + 1
    return [{"length": k, "count": counts[k]} for k in sorted(counts)]


def cusp_fixed_point(
    form: HermitianForm, rep: Representation, cusp_gens: tuple[Word, ...],
    tol: Tolerances | None = None,
) -> BoundaryPoint:
    """Common boundary fixed point of the cusp generators."""
    tol = tol or form.tol
    if not cusp_gens:
        raise AuditError("at least one cusp generator required")
    first = rep.evaluate(cusp_gens[0])
    base = fixed_boundary_point(form, first, tol)
    for word in cusp_gens[1:]:
        g = rep.evaluate(word)
        if not _fixes_base(base, g, tol.null * 10):
            raise AuditError("cusp generators do not share a boundary fixed point")
    return base


def calibrate_level(
    form: HermitianForm,
    rep: Representation,
    cusp_gens: tuple[Word, ...],
    test_words,
    target_margin: float = 1.0,
    tol: Tolerances | None = None,
) -> tuple[float, float | None]:
    """Find the horoball level whose minimum orthogeodesic margin equals
    ``target_margin``, by bisection on the level.

    Margins decrease by exactly 2 per unit increase of the level, so the
    margin-versus-level profile is strictly decreasing; bisection converges
    to the unique calibrated level.  Returns (level, achieved margin); the
    margin is None when every test word is peripheral (vacuous case).
    """
    tol = tol or form.tol
    base = cusp_fixed_point(form, rep, cusp_gens, tol)
    mats = word_matrices(rep, test_words)
    names = rep.presentation.names

    def min_margin(level: float) -> float | None:
        ball = Horoball(base, level)
        margins, _ = _condition2_margins(form, ball, mats, names, tol.null * 10)
        return min((m for _, m in margins), default=None)

    m0 = min_margin(0.0)
    if m0 is None:
        return 0.0, None
    lo = (m0 - target_margin) / 2.0 - 1.0
    hi = lo + 2.0
    while (min_margin(lo) or 0.0) < target_margin:
        lo -= 2.0
    while (min_margin(hi) or 0.0) > target_margin:
        hi += 2.0
    for _ in range(44):
        mid = 0.5 * (lo + hi)
        if (min_margin(mid) or 0.0) > target_margin:
            lo = mid
        else:
            hi = mid
    level = 0.5 * (lo + hi)
    return level, min_margin(level)


def parabolic_preserving_audit(
    pairs, form_orig: HermitianForm, form_def: HermitianForm,
    tol: Tolerances | None = None,
) -> dict:
    """Check that a deformation keeps cusp classes where required.

    ``pairs`` is an iterable of (label, matrix_original, matrix_deformed).
    PASS iff every parabolic stays parabolic (either subtype) and every
    boundary-elliptic stays boundary-elliptic; other classes are recorded
    but unconstrained.
    """
    parabolic = {TAG_UNIPOTENT, TAG_ELLIPTO_PARABOLIC}
    entries = []
    ok_all = True
    for label, a_orig, a_def in pairs:
        c_orig = classify_isometry(form_orig, a_orig, tol)
        c_def = classify_isometry(form_def, a_def, tol)
        if c_orig.tag in parabolic:
            ok = c_def.tag in parabolic
            constrained = True
        elif c_orig.tag == TAG_BOUNDARY_ELLIPTIC:
            ok = c_def.tag == TAG_BOUNDARY_ELLIPTIC
            constrained = True
        else:
            ok = True
            constrained = False
        ok_all &= ok
        entries.append(
            {
                "label": label,
                "original": c_orig.tag,
                "deformed": c_def.tag,
                "constrained": constrained,
                "ok": bool(ok),
            }
        )
    return {"pairs": entries, "passed": bool(ok_all)}
