"""Shared constructions for the test suite: random ring elements, random
form isometries, and independent oracles the tests pin library code against."""

import math
from fractions import Fraction

import numpy as np

from chdef.ring import Laurent, RingMatrix


def random_laurent(rng, span=4, terms=3, denom=7):
    coeffs = {}
    for _ in range(terms):
        e = int(rng.integers(-span, span + 1))
        coeffs[e] = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, denom)))
    return Laurent(coeffs)


def random_ring_matrix(rng, dim, span=2, denom=5):
    return RingMatrix(
        [
            [random_laurent(rng, span=span, terms=2, denom=denom) for _ in range(dim)]
            for _ in range(dim)
        ]
    )


def unitriangular_inverse(mat: RingMatrix) -> RingMatrix:
    """Neumann-series inverse of a unitriangular matrix: with L = N - I
    nilpotent, N^-1 = I - L + L^2 - ...  Independent of adjugate code."""
    n = mat.dim
    eye = RingMatrix.identity(n)
    low = mat - eye
    power = eye
    total = eye
    sign = -1
    for _ in range(n - 1):
        power = power * low
        total = total + power if sign > 0 else total - power
        sign = -sign
    assert (power * low) == RingMatrix([[Laurent() for _ in range(n)] for _ in range(n)])
    return total


def skew_hermitian(rng, dim, scale=1.0):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (g - g.conj().T) / 2.0


def random_form_isometry(j, rng, scale=0.4):
    """Random A with A^T J conj(A) = J via the Cayley transform.

    X = conj(J^-1 W) with W skew-Hermitian solves X^T J + J conj(X) = 0,
    and (I - X)(I + X)^-1 then preserves the form.
    """
    j = np.asarray(j, dtype=complex)
    dim = j.shape[0]
    w = skew_hermitian(rng, dim, scale)
    x = np.conj(np.linalg.solve(j, w))
    eye = np.eye(dim)
    return (eye - x) @ np.linalg.inv(eye + x)


def chord_sum(form, point_fn, t0, t1, steps):
    """Polygonal arclength of a curve of lifts, using the metric's own
    two-point distance on consecutive samples."""
    from chdef.chgeom import ProjPoint, distance

    ts = np.linspace(t0, t1, steps + 1)
    total = 0.0
    prev = ProjPoint(form, point_fn(ts[0]))
    for t in ts[1:]:
        cur = ProjPoint(form, point_fn(t))
        total += distance(form, prev, cur)
        prev = cur
    return total


def random_interior_point(form, rng, spread=0.5):
    """Interior lift near the origin of the form."""
    from chdef.chgeom import ProjPoint

    origin = form.origin()
    oo = form.inner(origin, origin).real
    v = rng.standard_normal(form.dim) + 1j * rng.standard_normal(form.dim)
    v = v / np.linalg.norm(v)
    x = origin + spread * v
    while form.inner(x, x).real >= 0.05 * oo:
        spread *= 0.5
        x = origin + spread * v
    return ProjPoint(form, x)


def random_boundary_point(form, rng):
    """Null lift: walk from an interior point toward infinity along a ray."""
    from chdef.chgeom import BoundaryPoint

    w, vecs = np.linalg.eigh(form.matrix)
    neg = vecs[:, int(np.argmin(w))]
    pos_cols = [k for k in range(form.dim) if w[k] > 0]
    c = rng.standard_normal(len(pos_cols)) + 1j * rng.standard_normal(len(pos_cols))
    pos = sum(
        ci * vecs[:, k] / math.sqrt(w[k]) for ci, k in zip(c, pos_cols)
    ) / np.linalg.norm(c)
    lam = math.sqrt(-form.inner(neg, neg).real / form.inner(pos, pos).real)
    return BoundaryPoint(form, neg + lam * pos)
