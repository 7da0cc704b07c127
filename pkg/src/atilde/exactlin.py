"""Exact scalar and dense matrix arithmetic over F_p or the rationals.

Matrices are immutable wrappers around numpy arrays. Over a prime field
with a small modulus the array has dtype int64 and entries are kept
reduced into ``0..p-1``; over the rationals (and for very large primes)
the array has dtype object and holds ``Fraction`` / Python ``int``
entries. No floating point is used anywhere.

Convention: a matrix of shape ``dim(target) x dim(source)`` acts on
coordinate columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Field",
    "PrimeField",
    "Rationals",
    "parse_field",
    "Mat",
    "ShapeError",
    "SingularMatrixError",
    "mat_mul",
    "rank",
    "nullspace_basis",
    "inverse",
    "sparse_nullspace",
]

DEFAULT_PRIME = 101

# int64 products stay exact while cols * (p-1)**2 < 2**63.
_INT64_PRIME_LIMIT = 2**24


class ShapeError(ValueError):
    """Raised when matrix shapes are incompatible."""


class SingularMatrixError(ArithmeticError):
    """Raised when inverting a singular matrix."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """Base class for the two supported scalar fields."""

    kind: str
    characteristic: int

    def __call__(self, value) -> object:
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def dtype(self):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, x) -> str:
        return str(x)

    def elements(self) -> Iterable:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)


@dataclass(frozen=True)
class PrimeField(Field):
    p: int = DEFAULT_PRIME

    kind = "fp"

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, value) -> int:
        if isinstance(value, Fraction):
            return (value.numerator * pow(value.denominator, -1, self.p)) % self.p
        return int(value) % self.p

    def inv(self, x) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    @property
    def dtype(self):
        return np.int64 if self.p < _INT64_PRIME_LIMIT else object

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr % self.p

    def parse(self, text: str) -> int:
        text = text.strip()
        if "/" in text:
            a, b = text.split("/")
            return self(Fraction(int(a), int(b)))
        return self(int(text))

    def elements(self):
        return range(self.p)

    def to_json(self) -> dict:
        return {"kind": "fp", "p": self.p}

    def __str__(self) -> str:
        return f"fp:{self.p}"


@dataclass(frozen=True)
class Rationals(Field):
    kind = "q"
    characteristic = 0

    def __call__(self, value) -> Fraction:
        return Fraction(value)

    def inv(self, x) -> Fraction:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    @property
    def dtype(self):
        return object

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr

    def parse(self, text: str) -> Fraction:
        return Fraction(text.strip())

    def elements(self):
        raise TypeError("the rationals cannot be enumerated")

    def to_json(self) -> dict:
        return {"kind": "q"}

    def __str__(self) -> str:
        return "q"


def parse_field(text: str) -> Field:
    """Parse ``fp:101``, ``fp`` or ``q``."""
    text = text.strip().lower()
    if text in ("q", "qq", "rational", "rationals"):
        return Rationals()
    if text.startswith("fp"):
        rest = text[2:].lstrip(":")
        return PrimeField(int(rest) if rest else DEFAULT_PRIME)
    raise ValueError(f"unknown field {text!r}")


def _array(field: Field, data, shape=None) -> np.ndarray:
    if field.dtype is object:
        arr = np.empty(shape if shape is not None else np.shape(data), dtype=object)
        flat = np.asarray(data, dtype=object).reshape(-1) if np.size(data) else []
        arr.reshape(-1)[:] = [field(x) for x in flat]
        return arr
    arr = np.asarray(data, dtype=np.int64)
    if shape is not None:
        arr = arr.reshape(shape)
    return field.reduce(arr)


class Mat:
    """An immutable exact matrix over ``field``."""

    __slots__ = ("field", "_a")

    def __init__(self, field: Field, data, shape: tuple[int, int] | None = None):
        self.field = field
        if isinstance(data, np.ndarray) and shape is None and data.ndim == 2:
            if field.dtype is object and data.dtype != object:
                data = _array(field, data.tolist(), data.shape)
            elif field.dtype is not object:
                data = field.reduce(data.astype(np.int64, copy=False))
            a = data
        else:
            if shape is None:
                rows = len(data)
                cols = len(data[0]) if rows else 0
                shape = (rows, cols)
            a = _array(field, data, shape)
        a.flags.writeable = False
        self._a = a

    @classmethod
    def _wrap(cls, field: Field, arr: np.ndarray) -> "Mat":
        m = cls.__new__(cls)
        m.field = field
        arr.flags.writeable = False
        m._a = arr
        return m

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Mat":
        if field.dtype is object:
            arr = np.empty((rows, cols), dtype=object)
            arr.fill(field.zero)
        else:
            arr = np.zeros((rows, cols), dtype=np.int64)
        return cls._wrap(field, arr)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        m = cls.zeros(field, n, n)._a.copy()
        for i in range(n):
            m[i, i] = field.one
        return cls._wrap(field, m)

    @classmethod
    def from_entries(cls, field: Field, rows: int, cols: int, entries: Sequence) -> "Mat":
        if len(entries) != rows * cols:
            raise ShapeError(f"expected {rows * cols} entries, got {len(entries)}")
        return cls(field, list(entries), (rows, cols))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying array."""
        return self._a

    def entries(self) -> list:
        return [self.field(x) for x in self._a.reshape(-1).tolist()]

    def tolist(self) -> list[list]:
        return [[self.field(x) for x in row] for row in self._a.tolist()]

    def __getitem__(self, idx):
        return self._a[idx]

    def __repr__(self) -> str:
        return f"Mat({self.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._a == other._a))

    def __hash__(self):
        return hash((self.shape, tuple(self.entries())))

    def is_zero(self) -> bool:
        return self._a.size == 0 or bool(np.all(self._a == 0))

    def _check_same(self, other: "Mat"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._wrap(self.field, self.field.reduce(self._a + other._a))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._wrap(self.field, self.field.reduce(self._a - other._a))

    def __neg__(self) -> "Mat":
        return Mat._wrap(self.field, self.field.reduce(-self._a))

    def scale(self, c) -> "Mat":
        c = self.field(c)
        if self.field.dtype is object:
            return Mat._wrap(self.field, self._a * c)
        return Mat._wrap(self.field, self.field.reduce(self._a * c))

    def __matmul__(self, other: "Mat") -> "Mat":
        return mat_mul(self, other)

    @property
    def T(self) -> "Mat":
        return Mat._wrap(self.field, self._a.T.copy())

    def power(self, k: int) -> "Mat":
        if self.rows != self.cols:
            raise ShapeError("power of a non-square matrix")
        out = Mat.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def trace(self):
        if self.rows != self.cols:
            raise ShapeError("trace of a non-square matrix")
        t = self.field.zero
        for i in range(self.rows):
            t = t + self._a[i, i]
        return self.field(t)

    def hstack(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise ShapeError("hstack row mismatch")
        return Mat._wrap(self.field, np.hstack([self._a, other._a]))

    def vstack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise ShapeError("vstack column mismatch")
        return Mat._wrap(self.field, np.vstack([self._a, other._a]))

    def columns(self, idx: Sequence[int]) -> "Mat":
        return Mat._wrap(self.field, self._a[:, list(idx)].copy())

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat._wrap(self.field, self._a[np.ix_(list(rows), list(cols))].copy())


def block_diag(field: Field, blocks: Sequence[Mat]) -> Mat:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = Mat.zeros(field, rows, cols)._a.copy()
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b._a
        r += b.rows
        c += b.cols
    return Mat._wrap(field, out)


def mat_mul(a: Mat, b: Mat) -> Mat:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    f = a.field
    if a.cols == 0:
        return Mat.zeros(f, a.rows, b.cols)
    if f.dtype is object:
        return Mat._wrap(f, _rational_matmul(a._a, b._a))
    return Mat._wrap(f, f.reduce(a._a @ b._a))


def _scaled_ints(arr: np.ndarray) -> tuple[np.ndarray, int, int]:
    """``(num, den, bound)`` with ``arr == num / den`` and ``|num| <= bound``."""
    den = 1
    for x in arr.flat:
        if x.denominator != 1:
            den = math.lcm(den, x.denominator)
    num = np.empty(arr.shape, dtype=object)
    bound = 0
    flat = num.reshape(-1)
    for i, x in enumerate(arr.flat):
        v = x.numerator * (den // x.denominator)
        flat[i] = v
        if abs(v) > bound:
            bound = abs(v)
    return num, den, bound


def _rational_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Fraction arithmetic is slow; multiply integer numerators instead
    na, da, ba = _scaled_ints(a)
    nb, db, bb = _scaled_ints(b)
    if ba * bb * a.shape[1] < 2**62:
        prod = (na.astype(np.int64) @ nb.astype(np.int64)).astype(object)
    else:
        prod = na @ nb
    den = da * db
    out = np.empty(prod.shape, dtype=object)
    flat = out.reshape(-1)
    for i, v in enumerate(prod.flat):
        flat[i] = Fraction(int(v), den) if den != 1 or not isinstance(v, int) else Fraction(v)
    return out


def _rref(field: Field, arr: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns of a copy of ``arr``."""
    a = arr.copy()
    if a.dtype != object:
        a = a.astype(np.int64)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c] != 0)[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = field.inv(a[r, c])
        a[r] = field.reduce(a[r] * inv)
        col = a[:, c].copy()
        col[r] = 0
        if np.any(col != 0):
            a = field.reduce(a - np.outer(col, a[r]))
        pivots.append(c)
        r += 1
    return a, pivots


def rref(a: Mat) -> tuple[Mat, list[int]]:
    red, piv = _rref(a.field, a._a)
    return Mat._wrap(a.field, red), piv


def rank(a: Mat) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(_rref(a.field, a._a)[1])


def nullspace_basis(a: Mat) -> list[Mat]:
    """Basis of ``{x : a x = 0}`` as column vectors.

    The vectors come from the reduced echelon form: the basis vector for
    free column ``j`` has a 1 in position ``j`` and zeros in every other
    free position, so the output is canonical.
    """
    f = a.field
    n = a.cols
    if a.rows == 0:
        red, piv = np.zeros((0, n), dtype=f.dtype), []
    else:
        red, piv = _rref(f, a._a)
    free = [j for j in range(n) if j not in set(piv)]
    basis = []
    for j in free:
        v = Mat.zeros(f, n, 1)._a.copy()
        v[j, 0] = f.one
        for i, pc in enumerate(piv):
            v[pc, 0] = f(-red[i, j])
        basis.append(Mat._wrap(f, v))
    return basis


def inverse(a: Mat) -> Mat:
    if a.rows != a.cols:
        raise ShapeError(f"inverse of non-square matrix {a.shape}")
    n = a.rows
    f = a.field
    if n == 0:
        return a
    aug = np.hstack([a._a, Mat.identity(f, n)._a])
    red, piv = _rref(f, aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return Mat._wrap(f, red[:, n:].copy())


def is_invertible(a: Mat) -> bool:
    return a.rows == a.cols and rank(a) == a.rows


def solve_left(a: Mat, b: Mat) -> Mat:
    """Return x with ``a @ x == b``, for ``a`` of full column rank."""
    f = a.field
    aug = np.hstack([a._a, b._a])
    red, piv = _rref(f, aug)
    if piv[: a.cols] != list(range(a.cols)) or any(p >= a.cols for p in piv):
        raise ValueError("system has no unique solution")
    return Mat._wrap(f, red[: a.cols, a.cols :].copy())


def sparse_nullspace(field: Field, rows: Iterable[dict[int, object]], ncols: int) -> list[list]:
    """Nullspace of a sparse system given as ``{column: coefficient}`` rows.

    Returns dense basis vectors (lists of field elements), normalized the
    same way as :func:`nullspace_basis`.
    """
    pivot_rows: dict[int, dict[int, object]] = {}
    for row in rows:
        r = {c: field(v) for c, v in row.items() if field(v) != 0}
        # pivot rows are mutually reduced, so one pass suffices
        for c in [c for c in r if c in pivot_rows]:
            coef = r.get(c)
            if not coef:
                continue
            for cc, vv in pivot_rows[c].items():
                nv = field(r.get(cc, 0) - coef * vv)
                if nv == 0:
                    r.pop(cc, None)
                else:
                    r[cc] = nv
        if not r:
            continue
        pc = min(r)
        inv = field.inv(r[pc])
        r = {c: field(v * inv) for c, v in r.items()}
        # keep the pivot set fully reduced
        for other in pivot_rows.values():
            if pc in other:
                coef = other[pc]
                for cc, vv in r.items():
                    nv = field(other.get(cc, 0) - coef * vv)
                    if nv == 0:
                        other.pop(cc, None)
                    else:
                        other[cc] = nv
        pivot_rows[pc] = r
    free = [j for j in range(ncols) if j not in pivot_rows]
    basis = []
    for j in free:
        v = [field.zero] * ncols
        v[j] = field.one
        for pc, prow in pivot_rows.items():
            if j in prow:
                v[pc] = field(-prow[j])
        basis.append(v)
    return basis
