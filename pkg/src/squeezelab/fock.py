"""Truncated bosonic operators on an N-level Fock basis.

All operators used here are banded: the ladder operators live on a single
off-diagonal, their n-th powers on the +/-n off-diagonals, and the
commutator [a^n, a†^n] is diagonal in the number basis.  Matrix elements
are built as square roots of exact integer products, so no floating-point
drift accumulates in the sqrt(k(k-1)...) factors even at large N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse


@dataclass(frozen=True)
class FockDim:
    """Truncated Fock basis keeping levels |0> .. |size-1>."""

    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"Fock truncation must keep at least 2 levels, got {self.size}")


@dataclass(frozen=True)
class SqueezeParams:
    """Order n and (possibly complex) squeezing parameter r of U_n(r)."""

    n: int
    r: complex

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"squeezing order must be >= 1, got {self.n}")
        if not np.isfinite(self.r):
            raise ValueError("squeezing parameter must be finite")


class SparseOperator:
    """A square banded operator on a truncated Fock basis.

    Thin wrapper over a scipy CSR matrix carrying the Fock dimension and
    the set of occupied diagonals.  Instances are immutable in practice:
    every arithmetic operation returns a new object.
    """

    def __init__(self, dim: FockDim, matrix):
        mat = sparse.csr_array(matrix, dtype=complex)
        if mat.shape != (dim.size, dim.size):
            raise ValueError(f"matrix shape {mat.shape} does not match dimension {dim.size}")
        self.dim = dim
        self.matrix = mat

    @property
    def offsets(self) -> tuple[int, ...]:
        """Occupied diagonals as col - row offsets, sorted."""
        coo = self.matrix.tocoo()
        return tuple(sorted(set((coo.col - coo.row).tolist())))

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.dim, self.matrix.conj().T)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    @property
    def is_diagonal(self) -> bool:
        off = self.offsets
        return off == () or off == (0,)

    def diagonal(self) -> np.ndarray:
        if not self.is_diagonal:
            raise ValueError("operator is not diagonal in the number basis")
        return self.matrix.diagonal()

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SparseOperator(self.dim, self.matrix @ other.matrix)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SparseOperator(self.dim, self.matrix + other.matrix)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SparseOperator(self.dim, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "SparseOperator":
        return SparseOperator(self.dim, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return SparseOperator(self.dim, -self.matrix)


def _ladder_products(dim: FockDim, n: int) -> np.ndarray:
    """sqrt((k+1)(k+2)...(k+n)) for k = 0 .. size-n-1, via exact integer products."""
    out = np.empty(dim.size - n, dtype=float)
    for k in range(dim.size - n):
        prod = 1
        for i in range(1, n + 1):
            prod *= k + i
        out[k] = math.sqrt(prod)
    return out


def annihilation_matrix(dim: FockDim) -> SparseOperator:
    """The truncated annihilation operator: (k-1, k) entry sqrt(k)."""
    amps = np.sqrt(np.arange(1, dim.size, dtype=float))
    mat = sparse.diags_array([amps], offsets=[1], shape=(dim.size, dim.size))
    return SparseOperator(dim, mat)


def creation_matrix(dim: FockDim) -> SparseOperator:
    return annihilation_matrix(dim).adjoint()


def number_operator(dim: FockDim) -> SparseOperator:
    mat = sparse.diags_array([np.arange(dim.size, dtype=float)], offsets=[0])
    return SparseOperator(dim, mat)


def identity_operator(dim: FockDim) -> SparseOperator:
    return SparseOperator(dim, sparse.eye_array(dim.size))


def power(op: SparseOperator, n: int) -> SparseOperator:
    """Matrix power by repeated multiplication; power(op, 0) is the identity."""
    if n < 0:
        raise ValueError(f"power must be >= 0, got {n}")
    result = identity_operator(op.dim)
    for _ in range(n):
        result = result @ op
    return result


def lowering_power(dim: FockDim, n: int) -> SparseOperator:
    """a^n built directly on the +n diagonal from exact integer products."""
    if n == 0:
        return identity_operator(dim)
    if n >= dim.size:
        return SparseOperator(dim, sparse.csr_array((dim.size, dim.size)))
    amps = _ladder_products(dim, n)
    mat = sparse.diags_array([amps], offsets=[n], shape=(dim.size, dim.size))
    return SparseOperator(dim, mat)


def generator(params: SqueezeParams, dim: FockDim) -> SparseOperator:
    """The anti-Hermitian exponent K = r a†^n - r* a^n of U_n(r)."""
    if dim.size <= params.n:
        raise ValueError(
            f"truncation {dim.size} must exceed squeezing order {params.n}"
        )
    amps = _ladder_products(dim, params.n)
    r = complex(params.r)
    mat = sparse.diags_array(
        [r * amps, -np.conj(r) * amps],
        offsets=[-params.n, params.n],
        shape=(dim.size, dim.size),
    )
    return SparseOperator(dim, mat)


def commutator_diagonal_value(n: int, m: int) -> int:
    """Exact number-basis eigenvalue of [a^n, a†^n] at level m.

    Closed form: sum over k = 1..n of k! * C(n,k)^2 * (m)(m-1)...(m-(n-k-1)),
    with the empty product (k = n) equal to 1.  Strictly positive for all
    m >= 0, with minimum n! at m = 0.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    total = 0
    for k in range(1, n + 1):
        term = math.factorial(k) * math.comb(n, k) ** 2
        for j in range(n - k):
            term *= m - j
        total += term
    return total


def a_n_commutator_closed_form(n: int, dim: FockDim) -> SparseOperator:
    """[a^n, a†^n] as a diagonal operator, from the exact closed form."""
    diag = np.array(
        [commutator_diagonal_value(n, m) for m in range(dim.size)], dtype=float
    )
    return SparseOperator(dim, sparse.diags_array([diag], offsets=[0]))
