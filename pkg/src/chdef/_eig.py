"""Numeric eigenvalue helpers shared by the family and geometry modules.

Defective eigenvalues of a k-fold Jordan block scatter by roughly eps^(1/k)
under rounding, far beyond the certification tolerances, while the mean of
the scattered cluster recovers the true value to near machine precision.
Everything downstream therefore works with clustered eigenvalues: a list of
(mean, algebraic multiplicity) pairs.
"""

from __future__ import annotations

import numpy as np

# Wide enough to absorb the eps^(1/4) scatter of a defective quadruple in
# dimension <= 8, narrow enough to keep genuinely distinct unit-circle
# eigenvalues (separated by the twist or holonomy angle) apart.
CLUSTER_RADIUS = 3e-3


def polished_roots(coeffs: np.ndarray, target: float = 1e-12) -> np.ndarray:
    """Roots of a monic-ish polynomial via companion matrix, Newton-polished.

    ``coeffs`` are highest-degree-first as for np.roots.  Each simple root is
    polished until the relative residual drops below ``target``; clustered
    roots are left to the caller's averaging.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    roots = np.roots(coeffs)
    deriv = np.polyder(coeffs)
    scale = np.max(np.abs(coeffs))
    for i, r in enumerate(roots):
        x = r
        for _ in range(20):
            p = np.polyval(coeffs, x)
            if abs(p) <= target * scale * max(1.0, abs(x)) ** (len(coeffs) - 1):
                break
            dp = np.polyval(deriv, x)
            if abs(dp) < 1e-30:
                break
            step = p / dp
            if abs(step) > 0.1 * max(1.0, abs(x)):
                break  # near-multiple root: Newton would wander, keep companion value
            x = x - step
        roots[i] = x
    return roots


def cluster_points(values, radius: float) -> list[tuple[complex, int]]:
    """Greedy single-linkage clustering; returns (mean, count), deterministic order.

    Clusters are sorted by (real, imag) of their means.
    """
    values = sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))
    groups: list[list[complex]] = []
    for v in values:
        placed = False
        for g in groups:
            if any(abs(v - w) <= radius for w in g):
                g.append(v)
                placed = True
                break
        if not placed:
            groups.append([v])
    # single linkage: merge groups that touch
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(a - b) <= radius for a in groups[i] for b in groups[j]):
                    groups[i].extend(groups.pop(j))
                    merged = True
                    break
            if merged:
                break
    out = [(sum(g) / len(g), len(g)) for g in groups]
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def sorted_complex(values) -> list[complex]:
    return sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))
