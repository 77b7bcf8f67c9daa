from itertools import combinations, product
from math import gcd, prod

import jax
import pytest
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from sasax.errors import LatticeError
from sasax.lattice import (
    IntegerMatrix,
    cokernel,
    determinant,
    is_primitive,
    is_unimodular,
    mod_inverse,
    rank,
    signature,
    smith_normal_form,
    surjects_onto_cyclic_sum,
)


def random_matrices(rng: jax.Array, count: int, max_dim: int, bound: int):
    """Draw small integer matrices with jax.random, as Python ints."""
    rng, shape_rng = jax.random.split(rng)
    shapes = jax.random.randint(shape_rng, (count, 2), 1, max_dim + 1).tolist()
    entries = jax.random.randint(
        rng, (count, max_dim, max_dim), -bound, bound + 1
    ).tolist()
    for (r, c), block in zip(shapes, entries):
        yield IntegerMatrix.from_rows([row[:c] for row in block[:r]], cols=c)


def determinantal_divisors(A: IntegerMatrix) -> list:
    """gcd of all k x k minors for k = 1, 2, ..."""
    divisors = []
    for k in range(1, min(A.shape) + 1):
        d = 0
        for rows in combinations(range(A.rows), k):
            for cols in combinations(range(A.cols), k):
                d = gcd(d, determinant(A.submatrix(rows, cols)))
        if d == 0:
            break
        divisors.append(d)
    return divisors


def test_smith_examples() -> None:
    """Smith normal form on a few matrices with known answers."""
    eye = IntegerMatrix.identity(3)
    snf = smith_normal_form(eye)
    assert snf.diagonal == eye
    assert snf.left == eye
    assert snf.right == eye

    snf = smith_normal_form(IntegerMatrix.from_rows([[2, 4], [6, 8]]))
    assert snf.diagonal == IntegerMatrix.diagonal([2, 4])

    snf = smith_normal_form(IntegerMatrix.diagonal([-1, -1, 1]))
    assert snf.diagonal == IntegerMatrix.identity(3)

    snf = smith_normal_form(IntegerMatrix.zeros(2, 3))
    assert snf.invariant_factors == ()


def test_smith_random() -> None:
    """SNF agrees with determinantal divisors on random matrices."""
    rng = jax.random.key(0)
    for A in random_matrices(rng, 500, 5, 9):
        snf = smith_normal_form(A)
        D = snf.diagonal
        assert snf.left @ A @ snf.right == D
        assert is_unimodular(snf.left)
        assert is_unimodular(snf.right)
        assert all(
            D[i, j] == 0
            for i in range(D.rows)
            for j in range(D.cols)
            if i != j
        )

        diag = D.diagonal_entries()
        assert all(d >= 0 for d in diag)
        factors = snf.invariant_factors
        assert diag[: len(factors)] == factors
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))

        divisors = determinantal_divisors(A)
        expected = [
            b // a for a, b in zip([1] + divisors[:-1], divisors)
        ]
        assert list(factors) == expected
        assert rank(A) == len(divisors)


def test_smith_against_sympy() -> None:
    """Invariant factors match sympy on random square matrices."""
    rng = jax.random.key(1)
    for A in random_matrices(rng, 60, 4, 9):
        if not A.is_square():
            continue
        theirs = sympy_snf(Matrix(A.to_rows()), domain=ZZ)
        expected = sorted(
            abs(int(theirs[i, i])) for i in range(A.rows) if theirs[i, i]
        )
        assert sorted(smith_normal_form(A).invariant_factors) == expected


def test_determinant() -> None:
    """Bareiss determinant against sympy."""
    rng = jax.random.key(2)
    for A in random_matrices(rng, 100, 5, 9):
        if A.is_square():
            assert determinant(A) == Matrix(A.to_rows()).det()
    with pytest.raises(LatticeError):
        determinant(IntegerMatrix.zeros(2, 3))
    assert determinant(IntegerMatrix.zeros(0, 0)) == 1


def symmetrized(A: IntegerMatrix) -> IntegerMatrix:
    """A + Aᵀ for a square matrix."""
    return IntegerMatrix.from_rows(
        [[A[i, j] + A[j, i] for j in range(A.cols)] for i in range(A.rows)]
    )


def random_unimodular(rng: jax.Array, n: int, steps: int = 10):
    """A product of random elementary integer row operations."""
    pair_rng, mult_rng = jax.random.split(rng)
    pairs = jax.random.randint(pair_rng, (steps, 2), 0, n).tolist()
    mults = jax.random.randint(mult_rng, (steps,), -3, 4).tolist()
    P = IntegerMatrix.identity(n).to_rows()
    for (i, j), c in zip(pairs, mults):
        if i == j:
            P[i] = [-x for x in P[i]]
        else:
            P[i] = [x + c * y for x, y in zip(P[i], P[j])]
    return IntegerMatrix.from_rows(P)


def test_cokernel() -> None:
    """Free rank and torsion of a cokernel."""
    A = IntegerMatrix.from_rows([[2, 0], [0, 6], [0, 0]])
    assert cokernel(A) == (1, (2, 6))
    assert cokernel(IntegerMatrix.identity(4)) == (0, ())


def test_cokernel_brute_force() -> None:
    """Finite cokernels agree with counting cosets modulo k.

    For Q = Zᵐ / A·Zⁿ, Q / kQ is (Z/k)ᵐ modulo the columns of A, and its
    size ∏ gcd(dᵢ, k) over all k | |Q| determines the invariants dᵢ.
    """
    rng = jax.random.key(6)
    checked = 0
    for A in random_matrices(rng, 400, 3, 9):
        if rank(A) != A.rows:
            continue
        order = determinantal_divisors(A)[-1]
        if order > 200 or order**A.rows > 40000:
            continue
        free, torsion = cokernel(A)
        assert free == 0
        assert prod(torsion) == order

        columns = A.transpose()
        assert order**A.rows == order * image_size(columns, [order] * A.rows)
        for k in range(2, order + 1):
            if order % k:
                continue
            cosets = k**A.rows // image_size(columns, [k] * A.rows)
            assert cosets == prod(gcd(d, k) for d in torsion)
        checked += 1
    assert checked > 100


def test_signature() -> None:
    """Signature of forms with and without diagonal pivots."""
    assert signature(IntegerMatrix.diagonal([1, -1, -1, 0])) == (1, 1, 2)
    hyperbolic = IntegerMatrix.from_rows([[0, 1], [1, 0]])
    assert signature(hyperbolic) == (1, 0, 1)
    e8_like = IntegerMatrix.from_rows(
        [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    )
    assert signature(e8_like) == (3, 0, 0)
    degenerate = IntegerMatrix.from_rows([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert signature(degenerate) == (1, 0, 2)

    with pytest.raises(LatticeError):
        signature(IntegerMatrix.from_rows([[0, 1], [2, 0]]))

    # Random symmetric forms: rank and determinant sign are consistent
    rng = jax.random.key(3)
    for A in random_matrices(rng, 100, 4, 5):
        if not A.is_square():
            continue
        G = symmetrized(A)
        pos, zero, neg = signature(G)
        assert pos + zero + neg == G.rows
        assert G.rows - zero == rank(G)
        det = determinant(G)
        if det != 0:
            assert (det > 0) == (neg % 2 == 0)


def test_signature_congruence() -> None:
    """Signature is unchanged by G -> PᵀGP with P unimodular."""
    rng = jax.random.key(5)
    rng, form_rng = jax.random.split(rng)
    forms = [A for A in random_matrices(form_rng, 200, 5, 5) if A.is_square()]
    for A, key in zip(forms, jax.random.split(rng, len(forms))):
        G = symmetrized(A)
        P = random_unimodular(key, G.rows)
        assert is_unimodular(P)
        congruent = P.transpose() @ G @ P
        assert congruent.is_symmetric()
        assert signature(congruent) == signature(G)


def test_primitive() -> None:
    """Primitivity is gcd 1 and undefined for zero."""
    assert is_primitive([1, 0, 0])
    assert not is_primitive([2, 4, 6])
    assert is_primitive([6, 10, 15])
    with pytest.raises(LatticeError, match="indeterminate primitivity"):
        is_primitive([0, 0])


def test_mod_inverse() -> None:
    """Modular inverses and their failure modes."""
    assert mod_inverse(3, 7) == 5
    assert mod_inverse(1, 2) == 1
    assert mod_inverse(-1, 5) == 4
    with pytest.raises(LatticeError, match="orbit invariant not coprime"):
        mod_inverse(2, 4)
    with pytest.raises(LatticeError):
        mod_inverse(1, 1)

    # Every residue class, including negative representatives, up to 50
    for m in range(2, 51):
        for j in range(-m, 2 * m):
            if gcd(j, m) != 1:
                with pytest.raises(LatticeError):
                    mod_inverse(j, m)
                continue
            inverse = mod_inverse(j, m)
            assert 1 <= inverse < m
            assert inverse * j % m == 1


def image_size(A: IntegerMatrix, moduli: list) -> int:
    """Size of the subgroup of ⊕ Z/mᵢ generated by the rows of A."""
    gens = [
        tuple(x % m for x, m in zip(A.row(i), moduli)) for i in range(A.rows)
    ]
    seen = {tuple(0 for _ in moduli)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % m for a, b, m in zip(v, g, moduli))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return len(seen)


def test_surjects_examples() -> None:
    """Surjectivity onto cyclic sums on small cases."""
    A = IntegerMatrix.from_rows([[1, 0], [0, 1]])
    assert surjects_onto_cyclic_sum(A, [2, 3])
    A = IntegerMatrix.from_rows([[1, 1]])
    assert surjects_onto_cyclic_sum(A, [2, 3])
    assert not surjects_onto_cyclic_sum(A, [2, 4])
    assert surjects_onto_cyclic_sum(IntegerMatrix.zeros(3, 0), [])
    with pytest.raises(LatticeError):
        surjects_onto_cyclic_sum(A, [1, 3])


def test_surjects_random() -> None:
    """Surjectivity agrees with brute-force image enumeration."""
    rng = jax.random.key(4)
    rng, mod_rng = jax.random.split(rng)
    all_moduli = jax.random.randint(mod_rng, (200, 3), 2, 22).tolist()
    for A, moduli in zip(random_matrices(rng, 200, 3, 9), all_moduli):
        moduli = moduli[: A.cols]
        if prod(moduli) > 10**4:
            continue
        expected = image_size(A, moduli) == prod(moduli)
        assert surjects_onto_cyclic_sum(A, moduli) == expected


def test_matrix_helpers() -> None:
    """Shape checks and basic algebra on IntegerMatrix."""
    A = IntegerMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert A.shape == (2, 3)
    assert A.transpose().shape == (3, 2)
    assert A.column(1) == (2, 5)
    assert (A @ IntegerMatrix.identity(3)) == A
    assert A.submatrix([1], [0, 2]).to_rows() == [[4, 6]]
    assert A.hstack(IntegerMatrix.identity(2)).shape == (2, 5)
    big = IntegerMatrix.diagonal([2**100, 3**80])
    assert determinant(big) == 2**100 * 3**80
    with pytest.raises(LatticeError):
        IntegerMatrix(2, 2, (1, 2, 3))
    with pytest.raises(LatticeError):
        IntegerMatrix.from_rows([[1, 2], [3]])
    for r, c in product(range(3), range(3)):
        assert IntegerMatrix.zeros(r, c).shape == (r, c)


if __name__ == "__main__":
    test_smith_examples()
    test_smith_random()
    test_smith_against_sympy()
    test_determinant()
    test_cokernel()
    test_cokernel_brute_force()
    test_signature()
    test_signature_congruence()
    test_primitive()
    test_mod_inverse()
    test_surjects_examples()
    test_surjects_random()
    test_matrix_helpers()
