"""The circle of boundary-unipotent representations of the figure-eight knot group.

The group is ``< m, n | m w = w n >`` with w = [n, m^-1] = n m^-1 n^-1 m.
For each unit-circle parameter u the pair (M_u, N_u) below satisfies the
relation exactly over Q[u, u^-1] and preserves a Hermitian matrix J_u whose
signature is (3,1) for |alpha| < 2*pi/3 and (2,2) on the complementary arcs,
degenerating exactly at alpha = +-2*pi/3 (u = e^{i*alpha}).

The peripheral subgroup is generated by the meridian m and the longitude
l = w w_rev = n m^-1 n^-1 m^2 n^-1 m^-1 n (w_rev is w spelled backwards).
The meridian image is unipotent for every u; the longitude image has
eigenvalues (u, u, u, u^-3) and is never diagonalizable, so the cusp stays
parabolic along the whole family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _eig
from .ring import Laurent, ONE, RingMatrix, U, U_INV, ZERO, char_poly, sesquilinear_value
from .words import Presentation, Representation, Word


class FamilyError(ValueError):
    pass


def _L(coeffs: dict) -> Laurent:
    return Laurent(coeffs)


_HALF = Fraction(1, 2)

_MERIDIAN_ROWS = [
    [1, 0, 1, _L({1: _HALF, 0: -1})],
    [0, 1, 1, _L({1: _HALF})],
    [0, 0, 1, _L({1: _HALF, 0: _HALF})],
    [0, 0, 0, 1],
]

_PARTNER_ROWS = [
    [1, 0, 0, 0],
    [_L({0: 2, -1: 2}), 1, 0, 0],
    [2, 1, 1, 0],
    [1, 1, 0, 1],
]

_FORM_ROWS = [
    [
        _L({0: 1, 1: _HALF, -1: _HALF}),
        _L({0: -1, 1: -_HALF, -1: -_HALF}),
        _L({0: 1, 1: 1}),
        _L({0: -3, 1: -2, -1: -2, -2: -1}),
    ],
    [
        _L({0: -1, 1: -_HALF, -1: -_HALF}),
        _L({0: 1, 1: _HALF, -1: _HALF}),
        _L({0: -1, 1: -1}),
        _L({0: 1, 1: 1}),
    ],
    [
        _L({0: 1, -1: 1}),
        _L({0: -1, -1: -1}),
        _L({0: 4, 1: 2, -1: 2}),
        _L({0: -4, 1: -2, -1: -2}),
    ],
    [
        _L({0: -3, 1: -2, -1: -2, 2: -1}),
        _L({0: 1, -1: 1}),
        _L({0: -4, 1: -2, -1: -2}),
        _L({0: 4, 1: 2, -1: 2}),
    ],
]

_PRESENTATION_TEXT = """
gens: m n
let w = n m^-1 n^-1 m
rel: m w n^-1 w^-1
"""


@dataclass(frozen=True)
class FigureEightFamily:
    """Exact representation, preserved form, and peripheral words."""

    rep: Representation
    form: RingMatrix
    meridian: Word
    longitude: Word

    @property
    def presentation(self) -> Presentation:
        return self.rep.presentation


def build_family(check: bool = True) -> FigureEightFamily:
    """Construct the family; with check=True the defining relation is verified
    exactly and a failure raises, guarding against transcription slips."""
    pres = Presentation.from_text(_PRESENTATION_TEXT)
    rep = Representation(pres, (RingMatrix(_MERIDIAN_ROWS), RingMatrix(_PARTNER_ROWS)), "exact")
    meridian = pres.word("m")
    longitude = pres.word("n m^-1 n^-1 m^2 n^-1 m^-1 n")
    fam = FigureEightFamily(rep, RingMatrix(_FORM_ROWS), meridian, longitude)
    if check:
        if not all(rep.check_relations()):
            raise FamilyError("defining relation fails over the ring")
        bad = [name for name, ok in verify_form_invariance(fam).items() if not ok]
        if bad:
            raise FamilyError(f"form not preserved by generators: {bad}")
    return fam


def verify_form_invariance(fam: FigureEightFamily) -> dict[str, bool]:
    """Exact check of A^T J star(A) = J for each generator image."""
    out = {}
    for name, img in zip(fam.presentation.names, fam.rep.images):
        out[name] = img.transpose() * fam.form * img.star() == fam.form
    return out


def det_series(fam: FigureEightFamily) -> Laurent:
    """det J_u expanded as a Laurent value."""
    return fam.form.det()


def det_expected_series() -> Laurent:
    coeffs = {0: -96}
    for k, c in ((1, -83), (2, -53), (3, -24), (4, -7), (5, -1)):
        coeffs[k] = c
        coeffs[-k] = c
    return Laurent(coeffs)


def det_expected_factored() -> Laurent:
    """-4 (c+1)^2 (2c+1)^3 with c = (u + u^-1)/2, expanded over the ring."""
    c = (U + U_INV) / 2
    return Laurent.constant(-4) * (c + ONE) ** 2 * (2 * c + ONE) ** 3


def verify_det_closed_form(fam: FigureEightFamily) -> bool:
    d = det_series(fam)
    return d == det_expected_series() and d == det_expected_factored()


def signature_at(fam: FigureEightFamily, alpha: float, tol: float = 1e-8) -> tuple[int, int, int]:
    """Inertia (p, q, z) of J at u = e^{i*alpha}; z counts |eig| <= tol * ||J||."""
    j = fam.form.evaluate(alpha)
    eigs = np.linalg.eigvalsh(j)
    cut = tol * max(np.max(np.abs(eigs)), 1e-300)
    p = int(np.sum(eigs > cut))
    q = int(np.sum(eigs < -cut))
    return p, q, len(eigs) - p - q


def longitude_matrix(fam: FigureEightFamily) -> RingMatrix:
    return fam.rep.evaluate(fam.longitude)


def meridian_unipotent_exact(fam: FigureEightFamily) -> bool:
    """(M - I)^dim = 0 over the ring."""
    m = fam.rep.images[0]
    n = (m - RingMatrix.identity(m.dim)) ** m.dim
    return n == RingMatrix.identity(m.dim) * 0


def longitude_char_poly(fam: FigureEightFamily) -> list[Laurent]:
    return char_poly(longitude_matrix(fam))


def verify_longitude_char_poly(fam: FigureEightFamily) -> bool:
    """Exact check that the longitude image has characteristic polynomial
    (x - u)^3 (x - u^-3), i.e. eigenvalues (u, u, u, u^-3)."""
    expected = [
        ONE,
        -(U ** 3 + 3 * U_INV),
        3 * U ** 2 + 3 * U_INV ** 2,
        -(3 * U + U_INV ** 3),
        ONE,
    ]
    return longitude_char_poly(fam) == expected


def peripheral_analysis(fam: FigureEightFamily, alpha: float, tol: float = 1e-8) -> dict:
    """Numeric cusp diagnostics at u = e^{i*alpha}.

    Eigenvalues of the longitude image come from its exact characteristic
    polynomial: companion-matrix roots, then averaging of root clusters,
    which restores near-machine accuracy at the defective triple.
    Geometric multiplicity of u uses the numeric rank of (L - u I).
    """
    lmat = longitude_matrix(fam)
    coeffs_exact = char_poly(lmat)  # constant term first
    coeffs = np.array([c.evaluate(alpha) for c in reversed(coeffs_exact)])
    roots = _eig.polished_roots(coeffs)
    clusters = _eig.cluster_points(roots, _eig.CLUSTER_RADIUS)
    eigenvalues = _eig.sorted_complex(
        [mean for mean, mult in clusters for _ in range(mult)]
    )

    lnum = lmat.evaluate(alpha)
    unum = np.exp(1j * alpha)
    shifted = lnum - unum * np.eye(lmat.dim)
    svals = np.linalg.svd(shifted, compute_uv=False)
    rank = int(np.sum(svals > tol * max(np.linalg.norm(lnum, 2), 1.0)))
    geo_mult = lmat.dim - rank

    fixed = _common_fixed_null_lift(fam, alpha, tol)
    return {
        "eigenvalues": eigenvalues,
        "geometric_multiplicity_u": geo_mult,
        "meridian_unipotent_exact": meridian_unipotent_exact(fam),
        "fixed_null_lift": fixed,
    }


def _common_fixed_null_lift(fam: FigureEightFamily, alpha: float, tol: float) -> np.ndarray:
    """Common eigenvector of the peripheral images on the null cone of J."""
    m = fam.rep.images[0].evaluate(alpha)
    l = longitude_matrix(fam).evaluate(alpha)
    unum = np.exp(1j * alpha)
    dim = m.shape[0]
    stacked = np.vstack([m - np.eye(dim), l - unum * np.eye(dim)])
    _, svals, vh = np.linalg.svd(stacked)
    small = svals <= tol * max(np.linalg.norm(stacked, 2), 1.0)
    kernel = vh[len(svals) - int(np.sum(small)):].conj().T if np.sum(small) else vh[-1:].conj().T
    j = fam.form.evaluate(alpha)
    best, best_val = None, np.inf
    for k in range(kernel.shape[1]):
        v = kernel[:, k]
        val = abs(v @ j @ v.conj())
        if val < best_val:
            best, best_val = v, val
    if best is None or best_val > tol * np.linalg.norm(j, 2):
        raise FamilyError("no form-null fixed lift found; form may be degenerate here")
    pivot = int(np.argmax(np.abs(best)))
    best = best / best[pivot]
    return best


def symbolic_peripheral_trace(fam: FigureEightFamily) -> Laurent:
    """Exact trace of the product of the two generator images."""
    m, n = fam.rep.images
    return (m * n).trace()


def trace_separation(fam: FigureEightFamily, alphas) -> list[complex]:
    t = symbolic_peripheral_trace(fam)
    return [t.evaluate(a) for a in alphas]


def exact_null_lift_checks(fam: FigureEightFamily) -> dict[str, bool]:
    """Ring identities pinning the cusp lift e1 + e2: fixed by the meridian,
    scaled by u under the longitude, and exactly null for J."""
    vec = (ONE, ONE, ZERO, ZERO)
    m = fam.rep.images[0]
    l = longitude_matrix(fam)
    mv = m.apply(vec)
    lv = l.apply(vec)
    return {
        "meridian_fixes": mv == vec,
        "longitude_scales_by_u": lv == tuple(U * v for v in vec),
        "form_null": sesquilinear_value(fam.form, vec, vec).is_zero(),
    }
