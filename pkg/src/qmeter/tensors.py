"""Dense complex operators and vectors on small tensor-product spaces.

Everything in this package lives on (C^d)^(x)n for small d and n (at most
16x16 matrices for the four-qubit constructions, d^2 x d^2 for the two-copy
ones), so plain dense complex128 arrays with explicit (d, n) metadata are the
whole story.  Slot 1 is the most significant tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, NotPositiveSemidefiniteError

#: absolute tolerance for identity-type checks (Hermiticity, projector tests,
#: probability-zero decisions)
TOL_ABS = 1e-10
#: relative eigenvalue cutoff for rank / support decisions
TOL_RANK = 1e-8


def _as_complex(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Operator:
    """A dense operator on (C^d)^(x)n with its tensor structure attached."""

    mat: np.ndarray
    d: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "mat", _as_complex(self.mat))
        dim = self.d ** self.n
        if self.mat.shape != (dim, dim):
            raise DimensionMismatchError(
                f"operator matrix has shape {self.mat.shape}, "
                f"expected {(dim, dim)} for d={self.d}, n={self.n}"
            )

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def dag(self) -> "Operator":
        return Operator(self.mat.conj().T, self.d, self.n)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def is_hermitian(self, tol: float = TOL_ABS) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def is_projector(self, tol: float = TOL_ABS) -> bool:
        return self.is_hermitian(tol) and bool(
            np.max(np.abs(self.mat @ self.mat - self.mat)) <= tol
        )

    def is_psd(self, tol: float = TOL_ABS) -> bool:
        if not self.is_hermitian(tol):
            return False
        w = np.linalg.eigvalsh(self.mat)
        return bool(w[0] >= -tol * max(1.0, float(w[-1])))

    def expval(self, state: "Vector") -> complex:
        """<state| self |state>."""
        self._check_same(state)
        return complex(state.vec.conj() @ (self.mat @ state.vec))

    def _check_same(self, other) -> None:
        if (self.d, self.n) != (other.d, other.n):
            raise DimensionMismatchError(
                f"operands live on different spaces: "
                f"(d={self.d}, n={self.n}) vs (d={other.d}, n={other.n})"
            )

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same(other)
        return Operator(self.mat + other.mat, self.d, self.n)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same(other)
        return Operator(self.mat - other.mat, self.d, self.n)

    def __neg__(self) -> "Operator":
        return Operator(-self.mat, self.d, self.n)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.mat * complex(scalar), self.d, self.n)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Operator":
        return Operator(self.mat / complex(scalar), self.d, self.n)

    def __matmul__(self, other: Union["Operator", "Vector"]):
        self._check_same(other)
        if isinstance(other, Vector):
            return Vector(self.mat @ other.vec, self.d, self.n)
        return Operator(self.mat @ other.mat, self.d, self.n)


@dataclass(frozen=True, eq=False)
class Vector:
    """A ket on (C^d)^(x)n."""

    vec: np.ndarray
    d: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "vec", _as_complex(self.vec))
        dim = self.d ** self.n
        if self.vec.shape != (dim,):
            raise DimensionMismatchError(
                f"vector has shape {self.vec.shape}, "
                f"expected {(dim,)} for d={self.d}, n={self.n}"
            )

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def normalized(self) -> "Vector":
        return Vector(self.vec / self.norm(), self.d, self.n)

    def inner(self, other: "Vector") -> complex:
        if (self.d, self.n) != (other.d, other.n):
            raise DimensionMismatchError("inner product between different spaces")
        return complex(self.vec.conj() @ other.vec)

    def projector(self) -> Operator:
        return Operator(np.outer(self.vec, self.vec.conj()), self.d, self.n)

    def __add__(self, other: "Vector") -> "Vector":
        if (self.d, self.n) != (other.d, other.n):
            raise DimensionMismatchError("sum of vectors from different spaces")
        return Vector(self.vec + other.vec, self.d, self.n)

    def __sub__(self, other: "Vector") -> "Vector":
        return self.__add__(-1 * other)

    def __mul__(self, scalar) -> "Vector":
        return Vector(self.vec * complex(scalar), self.d, self.n)

    __rmul__ = __mul__


def identity(d: int, n: int) -> Operator:
    return Operator(np.eye(d ** n), d, n)


def zero(d: int, n: int) -> Operator:
    return Operator(np.zeros((d ** n, d ** n)), d, n)


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; both factors must share the local dimension d."""
    if a.d != b.d:
        raise DimensionMismatchError(
            f"kron requires equal local dimensions, got {a.d} and {b.d}"
        )
    return Operator(np.kron(a.mat, b.mat), a.d, a.n + b.n)


def vkron(a: Vector, b: Vector) -> Vector:
    if a.d != b.d:
        raise DimensionMismatchError(
            f"vkron requires equal local dimensions, got {a.d} and {b.d}"
        )
    return Vector(np.kron(a.vec, b.vec), a.d, a.n + b.n)


def basis_ket(digits: Sequence[int], d: int) -> Vector:
    """Computational basis ket |digits[0] digits[1] ...> (slot 1 first)."""
    n = len(digits)
    idx = 0
    for dig in digits:
        if not 0 <= dig < d:
            raise DimensionMismatchError(f"digit {dig} out of range for d={d}")
        idx = idx * d + dig
    v = np.zeros(d ** n)
    v[idx] = 1.0
    return Vector(v, d, n)


def support_projector(
    op: Operator, tol_rank: float = TOL_RANK, tol_abs: float = TOL_ABS
) -> Operator:
    """Orthogonal projector onto the support (range) of a PSD operator.

    Parameters
    ----------
    op : Operator
        Must be Hermitian and positive semidefinite up to numerical noise.
    tol_rank : float
        Relative eigenvalue cutoff: eigenvectors with w > tol_rank * max(w)
        span the support.
    tol_abs : float
        Absolute scale below which the whole operator counts as zero, and
        relative scale of negative eigenvalues tolerated as roundoff.

    Returns
    -------
    Operator
        Projector of the same shape; the zero operator if `op` vanishes.

    Raises
    ------
    NotPositiveSemidefiniteError
        If an eigenvalue is negative beyond -tol_abs * max|w|.
    """
    herm = (op.mat + op.mat.conj().T) / 2
    if np.max(np.abs(op.mat - herm)) > tol_abs:
        raise NotPositiveSemidefiniteError("operator is not Hermitian")
    w, v = np.linalg.eigh(herm)
    lam = float(np.max(np.abs(w)))
    if lam <= tol_abs:
        return zero(op.d, op.n)
    if float(w[0]) < -tol_abs * lam:
        raise NotPositiveSemidefiniteError(
            f"negative eigenvalue {w[0]:.3e} (largest magnitude {lam:.3e})"
        )
    keep = v[:, w > tol_rank * lam]
    return Operator(keep @ keep.conj().T, op.d, op.n)


def rank(op: Operator, tol_rank: float = TOL_RANK, tol_abs: float = TOL_ABS) -> int:
    """Numerical rank of a Hermitian operator.

    Counts eigenvalues with |w| > tol_rank * max|w|; an operator whose largest
    eigenvalue magnitude is below tol_abs has rank 0.
    """
    herm = (op.mat + op.mat.conj().T) / 2
    if np.max(np.abs(op.mat - herm)) > tol_abs:
        raise NotPositiveSemidefiniteError("rank is defined here for Hermitian operators")
    w = np.linalg.eigvalsh(herm)
    lam = float(np.max(np.abs(w)))
    if lam <= tol_abs:
        return 0
    return int(np.sum(np.abs(w) > tol_rank * lam))
