"""
Exact integer linear algebra on numpy object arrays: a diagonal normal form
with unimodular transforms, Hermite forms of sublattices, kernels modulo
finite moduli, coset enumeration, and elimination over F_p.
"""

import itertools
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from sympy.polys.domains import GF, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors as smith_invariants


def as_matrix(rows, cols: int = None) -> np.ndarray:
    """Integer object matrix; an empty row list needs cols"""
    rows = list(rows)
    if not rows:
        return np.zeros((0, cols or 0), dtype=object)
    matrix = np.array([[int(x) for x in row] for row in rows], dtype=object)
    if matrix.ndim == 1:
        matrix = matrix.reshape(len(rows), -1)
    return matrix


def exgcd(a: int, b: int) -> np.ndarray:
    """Determinant-one M with M @ [a, b] = [gcd(a, b), 0]

    When a divides b, M[0, 1] is 0.
    """
    a_sign = -1 if a < 0 else 1
    b_sign = -1 if b < 0 else 1
    a, b = a * a_sign, b * b_sign
    work = np.array([[b, 0, 1],
                     [a, 1, 0]], dtype=object)
    while work[1, 0] != 0:
        q = work[0, 0] // work[1, 0]
        work[0] -= q * work[1]
        work = work[::-1]
    g = work[0, 0]
    M = work[:, 1:] * np.array([a_sign, b_sign], dtype=object)
    if g != 0:
        M[1] = [-b_sign * b // g, a_sign * a // g]
    else:
        M = np.eye(2, dtype=int).astype(object)
    return M


def _inverse_2x2(M: np.ndarray) -> np.ndarray:
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=object)


def normal_form(A: np.ndarray, return_inverses: bool = False) -> Tuple[np.ndarray, ...]:
    """A = S @ D @ T with D diagonal and S, T unimodular

    The diagonal carries no divisibility guarantee.
    """
    D = np.array(A, dtype=object).copy()
    m, n = D.shape
    S = np.eye(m, dtype=int).astype(object)
    T = np.eye(n, dtype=int).astype(object)
    Sinv, Tinv = S.copy(), T.copy()

    def clear_row(i: int) -> bool:
        if (D[i, i + 1:] == 0).all():
            return False
        for j in range(i + 1, n):
            M = exgcd(D[i, i], D[i, j]).T
            D[:, [i, j]] = D[:, [i, j]].dot(M)
            T[[i, j]] = _inverse_2x2(M).dot(T[[i, j]])
            Tinv[:, [i, j]] = Tinv[:, [i, j]].dot(M)
        return True

    def clear_col(i: int) -> bool:
        if (D[i + 1:, i] == 0).all():
            return False
        for j in range(i + 1, m):
            M = exgcd(D[i, i], D[j, i])
            D[[i, j]] = M.dot(D[[i, j]])
            S[:, [i, j]] = S[:, [i, j]].dot(_inverse_2x2(M))
            Sinv[[i, j]] = M.dot(Sinv[[i, j]])
        return True

    for i in range(min(m, n)):
        clear_col(i)
        while clear_row(i) and clear_col(i):
            pass

    if return_inverses:
        return S, D, T, Sinv, Tinv
    return S, D, T


def diagonal(D: np.ndarray) -> List[int]:
    return [int(D[i, i]) for i in range(min(D.shape))]


def kernel(A: np.ndarray) -> np.ndarray:
    """Matrix whose columns are a basis of the integer kernel of A"""
    A = np.array(A, dtype=object)
    _, D, _, _, Tinv = normal_form(A, return_inverses=True)
    diag = diagonal(D) + [0] * max(0, A.shape[1] - min(A.shape))
    mask = np.array([d == 0 for d in diag], dtype=bool)
    return Tinv[:, mask]


def hnf_rows(B: np.ndarray) -> np.ndarray:
    """Row Hermite normal form of the lattice spanned by the rows of B

    Pivots are positive, entries above a pivot lie in [0, pivot), zero rows
    are dropped.
    """
    A = np.array(B, dtype=object).copy()
    if A.size == 0:
        return A.reshape(0, A.shape[1] if A.ndim == 2 else 0)
    m, n = A.shape
    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i, col] != 0:
                M = exgcd(A[r, col], A[i, col])
                A[[r, i]] = M.dot(A[[r, i]])
        if A[r, col] == 0:
            continue
        if A[r, col] < 0:
            A[r] = -A[r]
        for i in range(r):
            q = A[i, col] // A[r, col]
            if q:
                A[i] = A[i] - q * A[r]
        r += 1
    return A[:r]


def pivot_columns(H: np.ndarray) -> List[int]:
    cols = []
    for row in H:
        nonzero = [j for j, x in enumerate(row) if x != 0]
        cols.append(nonzero[0])
    return cols


def reduce_vector(vector: Sequence[int], H: np.ndarray) -> Tuple[int, ...]:
    """Canonical representative of vector modulo the row lattice of H (in HNF)"""
    vec = np.array([int(x) for x in vector], dtype=object)
    for row, col in zip(H, pivot_columns(H)):
        q = vec[col] // row[col]
        if q:
            vec = vec - q * row
    return tuple(int(x) for x in vec)


def contains(H: np.ndarray, vector: Sequence[int]) -> bool:
    return not any(reduce_vector(vector, H))


def is_sublattice(A: np.ndarray, H: np.ndarray) -> bool:
    """Every row of A lies in the row lattice of H"""
    return all(contains(H, row) for row in A)


def lattice_index(H: np.ndarray) -> int:
    """Index in Z^n of a full-rank lattice given in HNF"""
    result = 1
    for row, col in zip(H, pivot_columns(H)):
        result *= int(row[col])
    return abs(result)


def kernel_mod(C: np.ndarray, moduli: Sequence[int]) -> np.ndarray:
    """Rows spanning {y in Z^s : C y = 0 in the product of Z/moduli}"""
    C = np.array(C, dtype=object)
    m = len(moduli)
    s = C.shape[1]
    if m == 0:
        return np.eye(s, dtype=int).astype(object)
    augmented = np.zeros((m, s + m), dtype=object)
    augmented[:, :s] = C
    for i, mod in enumerate(moduli):
        augmented[i, s + i] = int(mod)
    basis = kernel(augmented)
    return basis[:s, :].T.copy()


def image_order(C: np.ndarray, moduli: Sequence[int]) -> int:
    """Order of the subgroup generated by the columns of C"""
    Y = kernel_mod(C, moduli)
    return lattice_index(hnf_rows(Y))


def coset_representatives(Y: np.ndarray) -> Iterator[Tuple[int, ...]]:
    """Representatives of Z^s modulo the full-rank row lattice of Y"""
    _, D, T = normal_form(np.array(Y, dtype=object))
    sizes = [abs(d) for d in diagonal(D)]
    s = T.shape[0]
    for digits in itertools.product(*[range(size) for size in sizes]):
        vec = np.zeros(s, dtype=object)
        for j, c in enumerate(digits):
            if c:
                vec = vec + c * T[j]
        yield tuple(int(x) for x in vec)


def invariant_factors(diag: Sequence[int]) -> List[int]:
    """Invariant factors n_1 | n_2 | ... of a diagonal presentation, units dropped"""
    values = [abs(int(d)) for d in diag if abs(int(d)) > 1]
    if not values:
        return []
    k = len(values)
    presentation = DomainMatrix.from_list(
        [[values[i] if i == j else 0 for j in range(k)] for i in range(k)], ZZ)
    return [abs(int(n)) for n in smith_invariants(presentation) if abs(int(n)) > 1]


# Elimination over F_p

def gf_matrix(M: Sequence[Sequence[int]], p: int) -> DomainMatrix:
    return DomainMatrix.from_list([[int(x) % p for x in row] for row in M], GF(p))


def rank_mod_p(M: Sequence[Sequence[int]], p: int) -> int:
    rows = list(M)
    return gf_matrix(rows, p).rank() if rows else 0


def nullspace_mod_p(M: Sequence[Sequence[int]], p: int, n: int) -> List[List[int]]:
    """Basis of {x in F_p^n : M x = 0}"""
    rows = list(M)
    if not rows:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    basis = gf_matrix(rows, p).nullspace()
    return [[int(x) % p for x in row] for row in basis.to_list()]
