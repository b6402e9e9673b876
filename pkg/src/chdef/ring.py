"""Exact arithmetic over the ring Q[u, u^-1] with the circle involution.

A Laurent value is a finite map ``exponent -> Fraction`` in canonical form:
zero coefficients are never stored, so equality of values is equality of
maps.  The involution ``star`` substitutes u -> u^-1 and fixes coefficients.
On the unit circle u = e^{i*alpha} that substitution is complex conjugation,
which is what makes Hermitian-form identities decidable exactly: an identity
of matrices over this ring, conjugations included, either holds on the whole
circle or fails as a concrete nonzero Laurent value.

RingMatrix is a square matrix over the ring.  Inversion is restricted to
unit determinants (a single term with nonzero coefficient); everything a
discrete-group representation needs stays inside that case, and anything
else is a data error worth surfacing loudly.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np


class RingError(ValueError):
    """Base class for exact-arithmetic failures."""


class DimensionMismatch(RingError):
    pass


class NotInvertible(RingError):
    pass


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


class Laurent:
    """Immutable Laurent polynomial with Fraction coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs=None):
        data: dict[int, Fraction] = {}
        if coeffs:
            for exp, c in coeffs.items():
                c = _as_fraction(c)
                if c:
                    data[int(exp)] = data.get(int(exp), Fraction(0)) + c
            data = {k: v for k, v in data.items() if v}
        self._coeffs = data

    @classmethod
    def constant(cls, value) -> "Laurent":
        return cls({0: _as_fraction(value)})

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "Laurent":
        return cls({exp: _as_fraction(coeff)})

    # -- canonical accessors -------------------------------------------------

    def items(self):
        return self._coeffs.items()

    def coefficient(self, exp: int) -> Fraction:
        return self._coeffs.get(exp, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._coeffs))

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_one(self) -> bool:
        return self._coeffs == {0: Fraction(1)}

    def is_constant(self) -> bool:
        return not self._coeffs or set(self._coeffs) == {0}

    def is_unit(self) -> bool:
        """True when the value is a single nonzero term, hence invertible."""
        return len(self._coeffs) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise RingError(f"{self} is not a constant")
        return self.coefficient(0)

    def valuation(self) -> int:
        if not self._coeffs:
            raise RingError("zero has no valuation")
        return min(self._coeffs)

    def degree(self) -> int:
        if not self._coeffs:
            raise RingError("zero has no degree")
        return max(self._coeffs)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return Laurent(out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for k1, c1 in self._coeffs.items():
            for k2, c2 in other._coeffs.items():
                k = k1 + k2
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return Laurent(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a scalar or by a unit (single-term) Laurent value."""
        if isinstance(other, (int, Fraction)):
            return self * Laurent.constant(Fraction(1, 1) / _as_fraction(other))
        if isinstance(other, Laurent):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = Laurent.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Laurent":
        if not self.is_unit():
            raise NotInvertible(f"{self} is not a unit of the ring")
        ((exp, coeff),) = self._coeffs.items()
        return Laurent({-exp: Fraction(1, 1) / coeff})

    def star(self) -> "Laurent":
        """The involution u -> u^-1; conjugation on the unit circle."""
        return Laurent({-k: c for k, c in self._coeffs.items()})

    # -- evaluation and serialization ----------------------------------------

    def evaluate(self, alpha: float) -> complex:
        """Numeric value at u = e^{i*alpha}."""
        return sum(
            (float(c) * cmath.exp(1j * k * alpha) for k, c in self._coeffs.items()),
            start=0j,
        )

    def substitute_one(self) -> Fraction:
        """Exact value at u = 1 (sum of coefficients)."""
        return sum(self._coeffs.values(), start=Fraction(0))

    def to_json(self) -> dict[str, str]:
        return {str(k): str(c) for k, c in sorted(self._coeffs.items())}

    @classmethod
    def from_json(cls, data: dict) -> "Laurent":
        if not isinstance(data, dict):
            raise RingError("Laurent JSON must be an object of exponent -> coefficient")
        return cls({int(k): Fraction(v) for k, v in data.items()})

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(sorted(self._coeffs.items())))

    def __bool__(self):
        return bool(self._coeffs)

    def __repr__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for k in sorted(self._coeffs):
            c = self._coeffs[k]
            if k == 0:
                parts.append(str(c))
            else:
                var = "u" if k == 1 else ("u^-1" if k == -1 else f"u^{k}")
                parts.append(var if c == 1 else (f"-{var}" if c == -1 else f"{c}*{var}"))
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def _coerce(value):
    if isinstance(value, Laurent):
        return value
    if isinstance(value, (int, Fraction)):
        return Laurent.constant(value)
    return NotImplemented


ZERO = Laurent()
ONE = Laurent.constant(1)
U = Laurent.monomial(1)
U_INV = Laurent.monomial(-1)


def exact_div(num: Laurent, den: Laurent) -> Laurent:
    """Exact quotient num/den; raises RingError when the division has a remainder.

    Used by fraction-free elimination, where divisibility is guaranteed by the
    algorithm; a remainder therefore indicates corrupted input.
    """
    if den.is_zero():
        raise ZeroDivisionError("exact division by zero")
    if num.is_zero():
        return ZERO
    if den.is_unit():
        return num * den.inverse()
    # Shift both operands to ordinary polynomials and long-divide.
    nv, dv = num.valuation(), den.valuation()
    n_coeffs = _dense(num)
    d_coeffs = _dense(den)
    quotient = [Fraction(0)] * (len(n_coeffs) - len(d_coeffs) + 1)
    if len(n_coeffs) < len(d_coeffs):
        raise RingError(f"{den} does not divide {num}")
    lead = d_coeffs[-1]
    rem = list(n_coeffs)
    for i in range(len(quotient) - 1, -1, -1):
        q = rem[i + len(d_coeffs) - 1] / lead
        quotient[i] = q
        if q:
            for j, dc in enumerate(d_coeffs):
                rem[i + j] -= q * dc
    if any(rem):
        raise RingError(f"{den} does not divide {num}")
    shift = nv - dv
    return Laurent({i + shift: q for i, q in enumerate(quotient) if q})


def _dense(p: Laurent) -> list[Fraction]:
    v, d = p.valuation(), p.degree()
    out = [Fraction(0)] * (d - v + 1)
    for k, c in p.items():
        out[k - v] = c
    return out


class RingMatrix:
    """Immutable square matrix over Q[u, u^-1]."""

    __slots__ = ("dim", "_rows")

    def __init__(self, rows):
        rows = tuple(tuple(_entry(e) for e in row) for row in rows)
        dim = len(rows)
        if dim == 0 or any(len(row) != dim for row in rows):
            raise DimensionMismatch("matrix must be square and nonempty")
        self._rows = rows
        self.dim = dim

    @classmethod
    def identity(cls, dim: int) -> "RingMatrix":
        return cls([[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)])

    @classmethod
    def diagonal(cls, entries) -> "RingMatrix":
        entries = [_entry(e) for e in entries]
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, key) -> Laurent:
        i, j = key
        return self._rows[i][j]

    def rows(self):
        return self._rows

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def _require_same_dim(self, other: "RingMatrix"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimensions {self.dim} and {other.dim} differ")

    def __add__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        self._require_same_dim(other)
        return RingMatrix(
            [
                [self._rows[i][j] + other._rows[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def __sub__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        self._require_same_dim(other)
        return RingMatrix(
            [
                [self._rows[i][j] - other._rows[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def __neg__(self):
        return RingMatrix([[-e for e in row] for row in self._rows])

    def __mul__(self, other):
        if isinstance(other, RingMatrix):
            self._require_same_dim(other)
            n = self.dim
            cols = list(zip(*other._rows))
            return RingMatrix(
                [
                    [
                        sum((row[k] * col[k] for k in range(n)), start=ZERO)
                        for col in cols
                    ]
                    for row in self._rows
                ]
            )
        scalar = _coerce(other)
        if scalar is NotImplemented:
            return NotImplemented
        return RingMatrix([[e * scalar for e in row] for row in self._rows])

    def __rmul__(self, other):
        scalar = _coerce(other)
        if scalar is NotImplemented:
            return NotImplemented
        return RingMatrix([[scalar * e for e in row] for row in self._rows])

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = RingMatrix.identity(self.dim)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def transpose(self) -> "RingMatrix":
        return RingMatrix(list(zip(*self._rows)))

    def star(self) -> "RingMatrix":
        """Entrywise involution u -> u^-1."""
        return RingMatrix([[e.star() for e in row] for row in self._rows])

    def star_transpose(self) -> "RingMatrix":
        """Transpose composed with the entrywise involution; the exact adjoint."""
        return self.transpose().star()

    def trace(self) -> Laurent:
        return sum((self._rows[i][i] for i in range(self.dim)), start=ZERO)

    def apply(self, vector) -> tuple[Laurent, ...]:
        """Matrix-vector product with exact entries."""
        vec = [_entry(v) for v in vector]
        if len(vec) != self.dim:
            raise DimensionMismatch("vector length does not match matrix dimension")
        return tuple(
            sum((row[j] * vec[j] for j in range(self.dim)), start=ZERO)
            for row in self._rows
        )

    def is_identity(self) -> bool:
        return self == RingMatrix.identity(self.dim)

    # -- determinant and inverse ----------------------------------------------

    def det(self) -> Laurent:
        """Exact determinant: cofactor expansion for dim <= 5, Bareiss above."""
        if self.dim <= 5:
            return _det_cofactor(self._rows)
        return _det_bareiss(self._rows)

    def inverse(self) -> "RingMatrix":
        """Adjugate inverse; requires the determinant to be a unit of the ring."""
        d = self.det()
        if not d.is_unit():
            raise NotInvertible("not invertible over ring")
        d_inv = d.inverse()
        n = self.dim
        adj = [
            [
                _det_cofactor(_minor(self._rows, j, i))
                * ((-1) ** (i + j))
                * d_inv
                for j in range(n)
            ]
            for i in range(n)
        ]
        return RingMatrix(adj)

    # -- evaluation and serialization -----------------------------------------

    def evaluate(self, alpha: float) -> np.ndarray:
        """Numeric matrix at u = e^{i*alpha}."""
        out = np.empty((self.dim, self.dim), dtype=complex)
        for i, row in enumerate(self._rows):
            for j, e in enumerate(row):
                out[i, j] = e.evaluate(alpha)
        return out

    def substitute_one(self) -> "RingMatrix":
        """Exact matrix at u = 1."""
        return RingMatrix(
            [[Laurent.constant(e.substitute_one()) for e in row] for row in self._rows]
        )

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [[e.to_json() for e in row] for row in self._rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RingMatrix":
        try:
            dim = data["dim"]
            entries = data["entries"]
        except (TypeError, KeyError) as exc:
            raise RingError("matrix JSON needs 'dim' and 'entries'") from exc
        mat = cls([[Laurent.from_json(e) for e in row] for row in entries])
        if mat.dim != dim:
            raise RingError(f"declared dim {dim} does not match {mat.dim} rows")
        return mat

    def __repr__(self):
        body = ",\n ".join("[" + ", ".join(map(str, row)) + "]" for row in self._rows)
        return f"RingMatrix(\n {body})"


def _entry(value) -> Laurent:
    out = _coerce(value)
    if out is NotImplemented:
        raise TypeError(f"cannot use {type(value).__name__} as a matrix entry")
    return out


def _minor(rows, drop_i: int, drop_j: int):
    return [
        [e for j, e in enumerate(row) if j != drop_j]
        for i, row in enumerate(rows)
        if i != drop_i
    ]


def _det_cofactor(rows) -> Laurent:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for j, e in enumerate(rows[0]):
        if e.is_zero():
            continue
        term = e * _det_cofactor(_minor(rows, 0, j))
        total = total + term if j % 2 == 0 else total - term
    return total


def _det_bareiss(rows) -> Laurent:
    """Fraction-free elimination; every division is exact by construction."""
    n = len(rows)
    m = [list(row) for row in rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if pivot is None:
                return ZERO
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
            m[i][k] = ZERO
        prev = m[k][k]
    result = m[n - 1][n - 1]
    return result if sign == 1 else -result


def sesquilinear_value(form: RingMatrix, x, y) -> Laurent:
    """Exact H(x, y) = x^T J star(y): linear in x, star-linear in y."""
    xs = [_entry(v) for v in x]
    ys = [_entry(v) for v in y]
    if len(xs) != form.dim or len(ys) != form.dim:
        raise DimensionMismatch("vector length does not match form dimension")
    total = ZERO
    for i, xi in enumerate(xs):
        if xi.is_zero():
            continue
        for j, yj in enumerate(ys):
            if yj.is_zero():
                continue
            total = total + xi * form[i, j] * yj.star()
    return total


def char_poly(mat: RingMatrix) -> list[Laurent]:
    """Exact characteristic polynomial coefficients, constant term first.

    Returns c with det(x*I - A) = sum_k c[k] x^k and c[dim] = 1, computed by
    the trace recursion (Faddeev-LeVerrier), which only divides by integers.
    """
    n = mat.dim
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = RingMatrix.identity(n)
    for k in range(1, n + 1):
        m = mat * m
        c = exact_div(m.trace(), Laurent.constant(-k))
        # c really is integral over the base ring: trace/k divides exactly
        coeffs[n - k] = c
        m = m + RingMatrix.identity(n) * c
    return coeffs
