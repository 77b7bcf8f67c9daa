from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

from flax.struct import dataclass, field

from sasax.errors import LatticeError


@dataclass
class IntegerMatrix:
    """A dense matrix of arbitrary-precision integers.

    Attributes:
        rows: The number of rows.
        cols: The number of columns.
        entries: Row-major entries, length rows * cols.
    """

    rows: int = field(pytree_node=False)
    cols: int = field(pytree_node=False)
    entries: Tuple[int, ...] = field(pytree_node=False)

    def __post_init__(self):
        """Check that the shape matches the number of entries."""
        if self.rows < 0 or self.cols < 0:
            raise LatticeError(f"negative shape ({self.rows}, {self.cols})")
        if len(self.entries) != self.rows * self.cols:
            raise LatticeError(
                f"{len(self.entries)} entries do not fill a "
                f"{self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], cols: int = None
    ) -> "IntegerMatrix":
        """Build a matrix from a list of rows.

        Args:
            rows: The matrix rows. All rows must have the same length.
            cols: The number of columns, only needed when there are no rows.

        Returns:
            The corresponding IntegerMatrix.
        """
        if cols is None:
            cols = len(rows[0]) if rows else 0
        entries = []
        for row in rows:
            if len(row) != cols:
                raise LatticeError("ragged rows")
            entries.extend(int(x) for x in row)
        return cls(len(rows), cols, tuple(entries))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        """The rows x cols zero matrix."""
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        """The n x n identity matrix."""
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntegerMatrix":
        """A square matrix with the given diagonal."""
        n = len(values)
        return cls.from_rows(
            [[values[i] if i == j else 0 for j in range(n)] for i in range(n)],
            cols=n,
        )

    @property
    def shape(self) -> Tuple[int, int]:
        """The (rows, cols) shape."""
        return (self.rows, self.cols)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        """Entry at (i, j)."""
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i}, {j}) out of range {self.shape}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        """The i-th row."""
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Tuple[int, ...]:
        """The j-th column."""
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[int]]:
        """A mutable copy as a list of rows."""
        return [list(self.row(i)) for i in range(self.rows)]

    def diagonal_entries(self) -> Tuple[int, ...]:
        """Entries (i, i) for i < min(rows, cols)."""
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def transpose(self) -> "IntegerMatrix":
        """The transposed matrix."""
        return IntegerMatrix.from_rows(
            [self.column(j) for j in range(self.cols)], cols=self.rows
        )

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        """Exact matrix product."""
        if self.cols != other.rows:
            raise LatticeError(
                f"cannot multiply {self.shape} by {other.shape} matrices"
            )
        columns = [other.column(j) for j in range(other.cols)]
        return IntegerMatrix.from_rows(
            [
                [sum(a * b for a, b in zip(self.row(i), c)) for c in columns]
                for i in range(self.rows)
            ],
            cols=other.cols,
        )

    def submatrix(
        self, rows: Sequence[int], cols: Sequence[int]
    ) -> "IntegerMatrix":
        """The submatrix picking out the given row and column indices."""
        return IntegerMatrix.from_rows(
            [[self[i, j] for j in cols] for i in rows], cols=len(cols)
        )

    def hstack(self, other: "IntegerMatrix") -> "IntegerMatrix":
        """Concatenate columns of two matrices with the same number of rows."""
        if self.rows != other.rows:
            raise LatticeError("hstack requires the same number of rows")
        return IntegerMatrix.from_rows(
            [list(self.row(i)) + list(other.row(i)) for i in range(self.rows)],
            cols=self.cols + other.cols,
        )

    def is_square(self) -> bool:
        """Whether rows == cols."""
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        """Whether the matrix is square and equal to its transpose."""
        return self.is_square() and all(
            self[i, j] == self[j, i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )


@dataclass
class SmithDecomposition:
    """Smith normal form D = U·A·V with unimodular U and V.

    Attributes:
        diagonal: The diagonal matrix D, same shape as A.
        left: The unimodular row transform U.
        right: The unimodular column transform V.
    """

    diagonal: IntegerMatrix
    left: IntegerMatrix
    right: IntegerMatrix

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        """The nonzero diagonal entries d₁ | d₂ | ... of D."""
        return tuple(d for d in self.diagonal.diagonal_entries() if d != 0)


def _swap_rows(mat: List[List[int]], i: int, j: int) -> None:
    mat[i], mat[j] = mat[j], mat[i]


def _swap_cols(mat: List[List[int]], i: int, j: int) -> None:
    for row in mat:
        row[i], row[j] = row[j], row[i]


def _add_row(mat: List[List[int]], src: int, dst: int, k: int) -> None:
    """Row dst += k * row src."""
    mat[dst] = [a + k * b for a, b in zip(mat[dst], mat[src])]


def _add_col(mat: List[List[int]], src: int, dst: int, k: int) -> None:
    """Column dst += k * column src."""
    for row in mat:
        row[dst] += k * row[src]


def _smallest_pivot(mat: List[List[int]], t: int):
    best = None
    for i in range(t, len(mat)):
        for j in range(t, len(mat[i])):
            x = abs(mat[i][j])
            if x and (best is None or x < best[0]):
                best = (x, i, j)
    return None if best is None else best[1:]


def smith_normal_form(A: IntegerMatrix) -> SmithDecomposition:
    """Compute the Smith normal form of an integer matrix.

    Pivots are chosen with the smallest absolute value in the remaining
    submatrix, so intermediate entries never exceed the input entries by much.

    Args:
        A: Any m x n integer matrix.

    Returns:
        D, U, V with D = U·A·V diagonal, dᵢ ≥ 0, dᵢ | dᵢ₊₁, and trailing zeros.
    """
    m, n = A.shape
    D = A.to_rows()
    U = IntegerMatrix.identity(m).to_rows()
    V = IntegerMatrix.identity(n).to_rows()

    for t in range(min(m, n)):
        while True:
            pivot = _smallest_pivot(D, t)
            if pivot is None:
                break
            i, j = pivot
            _swap_rows(D, t, i)
            _swap_rows(U, t, i)
            _swap_cols(D, t, j)
            _swap_cols(V, t, j)
            p = D[t][t]

            clean = True
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    _add_row(D, t, i, -q)
                    _add_row(U, t, i, -q)
                clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    _add_col(D, t, j, -q)
                    _add_col(V, t, j, -q)
                clean = clean and D[t][j] == 0
            if not clean:
                continue

            # The pivot must divide the whole remaining block
            offender = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if D[i][j] % p
                ),
                None,
            )
            if offender is None:
                break
            _add_row(D, offender, t, 1)
            _add_row(U, offender, t, 1)

        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]

    return SmithDecomposition(
        diagonal=IntegerMatrix.from_rows(D, cols=n),
        left=IntegerMatrix.from_rows(U, cols=m),
        right=IntegerMatrix.from_rows(V, cols=n),
    )


def determinant(A: IntegerMatrix) -> int:
    """Exact determinant of a square matrix by fraction-free elimination."""
    if not A.is_square():
        raise LatticeError(f"determinant of non-square {A.shape} matrix")
    n = A.rows
    if n == 0:
        return 1
    M = A.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            _swap_rows(M, k, swap)
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A: IntegerMatrix) -> int:
    """Rank over the rationals."""
    return len(smith_normal_form(A).invariant_factors)


def is_unimodular(A: IntegerMatrix) -> bool:
    """Whether A is square with determinant ±1."""
    return A.is_square() and abs(determinant(A)) == 1


def cokernel(A: IntegerMatrix) -> Tuple[int, Tuple[int, ...]]:
    """The cokernel Zᵐ / A·Zⁿ as (free rank, torsion invariant factors > 1)."""
    factors = smith_normal_form(A).invariant_factors
    return A.rows - len(factors), tuple(d for d in factors if d > 1)


def signature(G: IntegerMatrix) -> Tuple[int, int, int]:
    """Signature of a symmetric integer form.

    Uses exact rational elimination with symmetric pivoting. When every
    remaining diagonal entry vanishes, a row and column addition (a unimodular
    congruence) produces the nonzero diagonal entry 2·gᵢⱼ.

    Args:
        G: A symmetric square integer matrix.

    Returns:
        The counts (positive, zero, negative) of eigenvalue signs.
    """
    if not G.is_symmetric():
        raise LatticeError("signature requires a symmetric matrix")

    M = [[Fraction(x) for x in row] for row in G.to_rows()]
    positive = negative = zero = 0
    while M:
        size = len(M)
        k = next((i for i in range(size) if M[i][i] != 0), None)
        if k is None:
            pair = next(
                (
                    (i, j)
                    for i in range(size)
                    for j in range(i + 1, size)
                    if M[i][j] != 0
                ),
                None,
            )
            if pair is None:
                zero += size
                break
            i, j = pair
            M[i] = [a + b for a, b in zip(M[i], M[j])]
            for row in M:
                row[i] += row[j]
            continue

        p = M[k][k]
        if p > 0:
            positive += 1
        else:
            negative += 1
        rest = [i for i in range(size) if i != k]
        M = [[M[i][j] - M[i][k] * M[k][j] / p for j in rest] for i in rest]

    return positive, zero, negative


def is_primitive(v: Sequence[int]) -> bool:
    """Whether an integer vector has gcd 1.

    Raises:
        LatticeError: for the zero vector, whose primitivity is indeterminate.
    """
    if not any(v):
        raise LatticeError("indeterminate primitivity of the zero vector")
    return gcd(*v) == 1


def surjects_onto_cyclic_sum(A: IntegerMatrix, moduli: Sequence[int]) -> bool:
    """Whether x ↦ Aᵀx (mod m) maps onto Z/m₁ ⊕ ... ⊕ Z/mₖ.

    Args:
        A: An r x k integer matrix; row r is the image of the r-th generator.
        moduli: The k moduli, each at least 2.

    Returns:
        True iff the columns of [Aᵀ | diag(m)] generate Zᵏ.
    """
    if any(m < 2 for m in moduli):
        raise LatticeError(f"moduli must be at least 2, got {list(moduli)}")
    if A.cols != len(moduli):
        raise LatticeError(
            f"{A.cols} columns do not match {len(moduli)} moduli"
        )
    k = len(moduli)
    if k == 0:
        return True
    block = A.transpose().hstack(IntegerMatrix.diagonal(list(moduli)))
    factors = smith_normal_form(block).invariant_factors
    return len(factors) == k and all(d == 1 for d in factors)


def mod_inverse(j: int, m: int) -> int:
    """The inverse of j modulo m, in the range [1, m)."""
    if m < 2:
        raise LatticeError(f"modulus must be at least 2, got {m}")
    if gcd(j, m) != 1:
        raise LatticeError(
            f"orbit invariant not coprime: gcd({j}, {m}) = {gcd(j, m)}"
        )
    return pow(j, -1, m)
