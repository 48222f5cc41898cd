"""Exact rational matrices and the Pfaffian family of invariants."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction


class DimensionError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class SamplerError(RuntimeError):
    pass


def parse_rational(s) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int.  Zero denominators raise ``ValueError``."""
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    if not isinstance(s, str):
        raise ValueError(f"rationals must be given as strings, got {s!r}")
    text = s.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {s!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {s!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Matrix:
    """Immutable dense matrix over Q.  Entries are ``Fraction``."""

    def __init__(self, data: Iterable[Iterable]):
        rows = tuple(tuple(Fraction(x) for x in row) for row in data)
        if not rows or not rows[0]:
            raise DimensionError("matrices must have at least one row and column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows")
        self._data = rows
        self.rows = len(rows)
        self.cols = width
        self._hash = None

    @classmethod
    def _raw(cls, rows: tuple[tuple[Fraction, ...], ...]) -> "Matrix":
        m = cls.__new__(cls)
        m._data = rows
        m.rows = len(rows)
        m.cols = len(rows[0])
        m._hash = None
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls._raw(tuple((Fraction(0),) * cols for _ in range(rows)))

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        n = len(values)
        zero = Fraction(0)
        return cls._raw(tuple(tuple(Fraction(values[i]) if i == j else zero for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._data == other._data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._data)
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self._data)
        return f"Matrix([{body}])"

    def _check_same_shape(self, other: "Matrix"):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix._raw(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix._raw(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self._data))

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        c = Fraction(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self._data))

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T._data
        return Matrix._raw(tuple(tuple(sum(map(Fraction.__mul__, r, c), Fraction(0)) for c in cols) for r in self._data))

    def __pow__(self, m: int) -> "Matrix":
        if not self.is_square:
            raise DimensionError("powers need a square matrix")
        if m < 0:
            return self.inverse() ** (-m)
        result = Matrix.identity(self.rows)
        base = self
        while m:
            if m & 1:
                result = result @ base
            base = base @ base
            m >>= 1
        return result

    @cached_property
    def T(self) -> "Matrix":
        return Matrix._raw(tuple(zip(*self._data)))

    def transpose(self) -> "Matrix":
        return self.T

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        return sum((self._data[i][i] for i in range(self.rows)), Fraction(0))

    def is_antisymmetric(self) -> bool:
        return self.is_square and self == -self.T

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.T

    def det(self) -> Fraction:
        return det(self)

    def inverse(self) -> "Matrix":
        return inverse(self)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix._raw(tuple(row[c0:c1] for row in self._data[r0:r1]))

    def minor(self, keep: Sequence[int]) -> "Matrix":
        return Matrix._raw(tuple(tuple(self._data[i][j] for j in keep) for i in keep))


def direct_sum(*ms: Matrix) -> Matrix:
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    out = [[Fraction(0)] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in ms:
        for i, row in enumerate(m):
            out[r0 + i][c0:c0 + m.cols] = row
        r0 += m.rows
        c0 += m.cols
    return Matrix._raw(tuple(tuple(r) for r in out))


def _integer_rows(a: Matrix) -> tuple[list[list[int]], int]:
    """Scale each row to integers; return the rows and the product of row scales."""
    rows = []
    scale = 1
    for row in a:
        d = reduce(math.lcm, (x.denominator for x in row), 1)
        rows.append([int(x * d) for x in row])
        scale *= d
    return rows, scale


def det(a: Matrix) -> Fraction:
    """Determinant by Bareiss fraction-free elimination on a row-scaled integer copy."""
    if not a.is_square:
        raise DimensionError(f"determinant of non-square {a.shape} matrix")
    m, scale = _integer_rows(a)
    n = a.rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, row_k = m[i], m[k]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return Fraction(sign * m[n - 1][n - 1], scale)


def inverse(a: Matrix) -> Matrix:
    if not a.is_square:
        raise DimensionError(f"inverse of non-square {a.shape} matrix")
    n = a.rows
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        pivot_row = [x / p for x in aug[col]]
        aug[col] = pivot_row
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], pivot_row)]
    return Matrix._raw(tuple(tuple(row[n:]) for row in aug))


def charpoly_coeffs_from_traces(p: Sequence) -> list[Fraction]:
    """Elementary symmetric functions ``e_1..e_n`` from power sums ``p_1..p_n``.

    Uses the Newton recurrence ``m e_m = sum_{i=1}^m (-1)^(i-1) e_{m-i} p_i``;
    the last entry is the determinant when the ``p_i`` are traces of powers.
    """
    if len(p) == 0:
        raise ValueError("need at least one power sum")
    p = [Fraction(x) for x in p]
    e = [Fraction(1)]
    for m in range(1, len(p) + 1):
        acc = Fraction(0)
        for i in range(1, m + 1):
            term = e[m - i] * p[i - 1]
            acc += term if i % 2 else -term
        e.append(acc / m)
    return e[1:]


def _check_pfaffian_input(w: Matrix):
    if not w.is_square:
        raise ValueError(f"pfaffian needs a square matrix, got {w.shape}")
    if w.rows % 2:
        raise ValueError(f"pfaffian needs even dimension, got {w.rows}")


def pfaffian(w: Matrix) -> Fraction:
    """Pfaffian by first-row expansion, memoized on the remaining index set."""
    _check_pfaffian_input(w)
    if not w.is_antisymmetric():
        raise ValueError("pfaffian needs an antisymmetric matrix")
    # a common integer scale d gives pf(d W) = d^(n/2) pf(W)
    d = reduce(math.lcm, (x.denominator for row in w for x in row), 1)
    ints = [[int(x * d) for x in row] for row in w]
    return Fraction(_pf_int(ints), d ** (w.rows // 2))


def _pf_int(a: list[list[int]]) -> int:
    n = len(a)
    memo: dict[int, int] = {0: 1}

    def pf(mask: int) -> int:
        got = memo.get(mask)
        if got is not None:
            return got
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = 0
        sign = 1
        row = a[i]
        m = rest
        while m:
            low = m & -m
            j = low.bit_length() - 1
            if row[j]:
                total += sign * row[j] * pf(rest & ~low)
            sign = -sign
            m ^= low
        memo[mask] = total
        return total

    return pf((1 << n) - 1)


def pf_tilde(w: Matrix) -> Fraction:
    """``pf(W - W^t)``."""
    _check_pfaffian_input(w)
    return pfaffian(w - w.T)


def linearized_pfaffian(cs: Sequence[Matrix]) -> Fraction:
    """Coefficient of ``t_1...t_n`` in ``pf(sum t_i (C_i - C_i^t))``.

    Computed by inclusion-exclusion over subsets of the arguments, which is
    exact because the polynomial is homogeneous of degree ``n``.
    """
    n = len(cs)
    if n == 0:
        raise ValueError("need at least one matrix")
    for c in cs:
        if c.shape != (2 * n, 2 * n):
            raise ValueError(f"expected {n} matrices of size {2 * n}x{2 * n}, got shape {c.shape}")
    skews = [c - c.T for c in cs]
    # multilinear in the skew parts: a vanishing argument kills the coefficient
    zero = Matrix.zeros(2 * n)
    if any(s == zero for s in skews):
        return Fraction(0)
    total = Fraction(0)
    for size in range(1, n + 1):
        sign = 1 if (n - size) % 2 == 0 else -1
        for subset in combinations(skews, size):
            total += sign * pfaffian(reduce(Matrix.__add__, subset))
    return total


MATCHING_TABLE_MAX_N = 5


@lru_cache(maxsize=None)
def _ordered_matchings(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Edge-index rows for every perfect matching of ``2n`` points in every order.

    Edges ``(a, b)`` with ``a < b`` are numbered in lexicographic order.  The
    sign of a matching is that of the permutation ``a1 b1 a2 b2 ...``.
    """
    dim = 2 * n
    edge = {e: k for k, e in enumerate(combinations(range(dim), 2))}
    rows, signs = [], []

    def matchings(free):
        if not free:
            yield []
            return
        a = free[0]
        for i in range(1, len(free)):
            rest = free[1:i] + free[i + 1:]
            for m in matchings(rest):
                yield [(a, free[i])] + m

    for m in matchings(list(range(dim))):
        flat = [x for pair in m for x in pair]
        inversions = sum(1 for i in range(dim) for k in range(i + 1, dim) if flat[i] > flat[k])
        sign = -1 if inversions % 2 else 1
        ids = [edge[p] for p in m]
        for order in permutations(ids):
            rows.append(order)
            signs.append(sign)
    return np.array(rows, dtype=np.intp).reshape(-1, n), np.array(signs, dtype=np.int64)


class LinearizedPfaffianTable:
    """Batch ``pl`` over tuples drawn from a fixed list of matrices.

    ``pl`` is multilinear in the skew parts, so it is the sum over ordered
    perfect matchings ``(e_1, ..., e_n)`` of ``sign * prod_k W_k[e_k]``.
    Entries are scaled to integers once; each tuple is then a gather and a
    product over the matching table.
    """

    def __init__(self, mats: Sequence[Matrix]):
        if not mats:
            raise ValueError("need at least one matrix")
        dim = mats[0].rows
        if dim % 2 or any(m.shape != (dim, dim) for m in mats):
            raise DimensionError("need square matrices of one even dimension")
        self.n = dim // 2
        self.mats = list(mats)
        self._fallback = self.n > MATCHING_TABLE_MAX_N
        if self._fallback:
            return
        pairs = list(combinations(range(dim), 2))
        skew = [[m[a, b] - m[b, a] for a, b in pairs] for m in mats]
        self.scale = reduce(math.lcm, (x.denominator for row in skew for x in row), 1)
        ints = [[int(x * self.scale) for x in row] for row in skew]
        self.rows, self.signs = _ordered_matchings(self.n)
        big = max((abs(x) for row in ints for x in row), default=0)
        dtype = np.int64 if len(self.signs) * max(big, 1) ** self.n < 2**62 else object
        self.w = np.array(ints, dtype=dtype).reshape(len(mats), len(pairs))
        self.signs = self.signs.astype(dtype)

    def value(self, tup: Sequence[int]) -> Fraction:
        return self.values([tup])[0]

    def values(self, tuples, cells: int = 1 << 21) -> list[Fraction]:
        tuples = np.asarray(tuples, dtype=np.intp).reshape(-1, self.n)
        if self._fallback:
            return [linearized_pfaffian([self.mats[g] for g in t]) for t in tuples]
        denom = self.scale**self.n
        chunk = max(1, cells // len(self.signs))
        out = []
        for start in range(0, len(tuples), chunk):
            block = tuples[start:start + chunk]
            acc = np.broadcast_to(self.signs, (len(block), len(self.signs))).copy()
            for k in range(self.n):
                acc = acc * self.w[block[:, k][:, None], self.rows[:, k][None, :]]
            out.extend(Fraction(int(x), denom) for x in acc.sum(axis=1))
        return out


def block_diagonal_blocks(c: Matrix, size: int = 2) -> list[Matrix]:
    if not c.is_square or c.rows % size:
        raise ValueError(f"matrix of shape {c.shape} cannot be cut into {size}x{size} blocks")
    k = c.rows // size
    for bi in range(k):
        for bj in range(k):
            if bi != bj and any(
                c[bi * size + r, bj * size + s] != 0 for r in range(size) for s in range(size)
            ):
                raise ValueError(f"matrix is not block diagonal: block ({bi}, {bj}) is nonzero")
    return [c.block(b * size, (b + 1) * size, b * size, (b + 1) * size) for b in range(k)]


def pl_block_oracle(cs: Sequence[Matrix]) -> Fraction:
    """Linearized Pfaffian of 2x2-block-diagonal inputs by the permutation-sum formula."""
    n = len(cs)
    if n == 0:
        raise ValueError("need at least one matrix")
    blocks = []
    for c in cs:
        if c.shape != (2 * n, 2 * n):
            raise ValueError(f"expected {n} matrices of size {2 * n}x{2 * n}, got shape {c.shape}")
        blocks.append(block_diagonal_blocks(c))
    # block pf of a 2x2 matrix X is X[0,1] - X[1,0]
    pf2 = [[b[0, 1] - b[1, 0] for b in bl] for bl in blocks]
    total = Fraction(0)
    for sigma in permutations(range(n)):
        prod = Fraction(1)
        for i in range(n):
            prod *= pf2[sigma[i]][i]
            if not prod:
                break
        total += prod
    return total


def omega(dim: int) -> Matrix:
    """Standard symplectic form ``[[0, I], [-I, 0]]``."""
    if dim % 2:
        raise ValueError("symplectic form needs even dimension")
    h = dim // 2
    rows = []
    for i in range(dim):
        row = [Fraction(0)] * dim
        if i < h:
            row[i + h] = Fraction(1)
        else:
            row[i - h] = Fraction(-1)
        rows.append(row)
    return Matrix(rows)


def symplectic_adjoint(a: Matrix) -> Matrix:
    w = omega(a.rows)
    return w.inverse() @ a.T @ w


def _scalar_multiple_of_identity(m: Matrix) -> Fraction | None:
    lam = m[0, 0]
    for i in range(m.rows):
        for j in range(m.cols):
            if m[i, j] != (lam if i == j else 0):
                return None
    return lam


@dataclass(frozen=True)
class SimilitudeClass:
    kinds: frozenset
    orthogonal_lambda: Fraction | None = None
    symplectic_lambda: Fraction | None = None

    def __contains__(self, kind: str) -> bool:
        return kind in self.kinds

    @property
    def kind(self) -> str:
        for k in ("special_orthogonal", "orthogonal", "general_orthogonal", "symplectic", "general_symplectic"):
            if k in self.kinds:
                return k
        return "general_linear"

    @property
    def lam(self) -> Fraction | None:
        if self.orthogonal_lambda is not None:
            return self.orthogonal_lambda
        return self.symplectic_lambda


def classify_similitude(a: Matrix) -> SimilitudeClass:
    """Every similitude class the matrix belongs to."""
    if not a.is_square:
        raise DimensionError("classification needs a square matrix")
    d = det(a)
    if d == 0:
        raise ValueError("cannot classify a singular matrix")
    kinds = {"general_linear"}
    lam_o = _scalar_multiple_of_identity(a @ a.T)
    if lam_o is not None:
        kinds.add("general_orthogonal")
        if lam_o == 1:
            kinds.add("orthogonal")
            if d == 1:
                kinds.add("special_orthogonal")
    lam_s = None
    if a.rows % 2 == 0:
        lam_s = _scalar_multiple_of_identity(a @ symplectic_adjoint(a))
        if lam_s is not None:
            kinds.add("general_symplectic")
            if lam_s == 1:
                kinds.add("symplectic")
    return SimilitudeClass(frozenset(kinds), lam_o, lam_s)


def _random_antisymmetric(n: int, rng: random.Random, bound: int = 3) -> Matrix:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = Fraction(rng.randint(-bound, bound), rng.randint(1, 2))
            rows[i][j] = x
            rows[j][i] = -x
    return Matrix(rows)


def sample_orthogonal(n: int, special: bool = False, seed: int = 0, max_retries: int = 16) -> Matrix:
    """Exact orthogonal matrix from the Cayley transform ``(I - S)(I + S)^-1``.

    With ``special=False`` a reflection ``diag(-1, 1, ..., 1)`` is applied
    with probability one half.  Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    rng = random.Random(seed)
    eye = Matrix.identity(n)
    for _ in range(max_retries):
        s = _random_antisymmetric(n, rng)
        try:
            q = (eye - s) @ (eye + s).inverse()
        except SingularMatrixError:
            continue
        if not special and rng.random() < 0.5:
            q = Matrix.diag([-1] + [1] * (n - 1)) @ q
        return q
    raise SamplerError(f"no nonsingular I + S after {max_retries} draws")


def sample_signed_permutation(n: int, special: bool = False, seed: int = 0) -> Matrix:
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice((-1, 1)) for _ in range(n)]
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, j in enumerate(perm):
        rows[i][j] = Fraction(signs[i])
    m = Matrix(rows)
    if special and det(m) == -1:
        rows[0] = [-x for x in rows[0]]
        m = Matrix(rows)
    return m


def random_rational_matrix(n: int, rng: random.Random, bound: int = 5, cols: int | None = None) -> Matrix:
    cols = n if cols is None else cols
    return Matrix([[Fraction(rng.randint(-bound, bound), rng.randint(1, 3)) for _ in range(cols)] for _ in range(n)])


def random_antisymmetric(n: int, rng: random.Random, bound: int = 5) -> Matrix:
    return _random_antisymmetric(n, rng, bound)
