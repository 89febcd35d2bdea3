"""Hypothesis operators and analytic success probabilities for comparing
sharp measurements.

Two devices measure orthonormal bases A and B of C^d.  Under the
"different" hypothesis the bases are independent Haar; under the "equal"
hypothesis B = A with A Haar.  For each observable outcome class c the pair
of averaged operators (O_c^equal, O_c^different) determines whether the
class can certify difference: a test state supported inside

    Q_c = Pi_c - support(O_c^equal)        (Pi_c = support of O_c^different)

never produces class c for equal devices, so observing c is an unambiguous
"different" verdict.  The Q_c are extracted algebraically with a single
eigendecomposition-based support primitive; nothing about them is
hard-coded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ConsistencyError,
    DimensionMismatchError,
    InvalidObservableError,
    InvalidStateError,
    UnambiguityError,
    UnsupportedDimensionError,
)
from .haar import r_operator, rbar
from .symmetry import (
    antisymmetrizer,
    basis_family,
    pair_product,
    phi_minus,
    symmetrizer,
    sym_dim,
)
from .tensors import TOL_ABS, TOL_RANK, Operator, Vector, identity, kron, support_projector
from . import haar as _haar

#: a class is conclusive iff its equal-hypothesis probability is below this
NO_ERROR_TOL = 1e-10

LABELED_CLASSES = ("same", "diff")
UNLABELED_CLASSES = ("same_same", "same_diff", "diff_same", "diff_diff")


@dataclass(frozen=True)
class Scenario:
    """Protocol selector: labeled single-shot (any d) or unlabeled two-shot (qubits)."""

    kind: str
    dim: int = 2

    def __post_init__(self):
        if self.kind not in ("labeled", "unlabeled"):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.dim < 2:
            raise UnsupportedDimensionError(f"dimension must be >= 2, got {self.dim}")
        if self.kind == "unlabeled" and self.dim != 2:
            raise UnsupportedDimensionError(
                "the unlabeled two-shot protocol is implemented for qubits (d=2); "
                f"got d={self.dim}"
            )


@dataclass(frozen=True, eq=False)
class Observable:
    """A sharp non-degenerate measurement: the orthonormal basis it projects onto.

    Column j of `basis` is the measurement vector for outcome j.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.complex128)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise InvalidObservableError(f"basis must be square, got shape {b.shape}")
        gram = b.conj().T @ b
        if np.max(np.abs(gram - np.eye(b.shape[0]))) > TOL_ABS:
            raise InvalidObservableError("basis columns are not orthonormal")

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    def effect(self, j: int) -> Operator:
        col = self.basis[:, j]
        return Operator(np.outer(col, col.conj()), self.d, 1)

    def projectors(self) -> np.ndarray:
        """Stack of outcome projectors, shape (d, d, d) indexed by outcome."""
        return np.einsum("mj,nj->jmn", self.basis, self.basis.conj())

    @classmethod
    def computational(cls, d: int) -> "Observable":
        return cls(np.eye(d))

    @classmethod
    def qubit_angle(cls, theta: float) -> "Observable":
        """Qubit basis rotated by theta from the computational one."""
        c, s = math.cos(theta), math.sin(theta)
        return cls(np.array([[c, -s], [s, c]]))

    @classmethod
    def random(cls, d: int, rng=None) -> "Observable":
        return cls(_haar.haar_unitary(d, rng))


@dataclass(frozen=True, eq=False)
class TestState:
    """Input state of a comparison protocol (two slots labeled, four unlabeled)."""

    __test__ = False  # not a pytest class, despite the name

    rho: Operator
    kind: str = "custom"

    def __post_init__(self):
        m = self.rho.mat
        if np.max(np.abs(m - m.conj().T)) > TOL_ABS:
            raise InvalidStateError("density matrix is not Hermitian")
        w = np.linalg.eigvalsh(m)
        if float(w[0]) < -TOL_ABS:
            raise InvalidStateError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TOL_ABS:
            raise InvalidStateError(f"density matrix has trace {tr!r}, expected 1")

    @property
    def d(self) -> int:
        return self.rho.d

    @property
    def n(self) -> int:
        return self.rho.n

    def pure_components(self, tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
        """Eigendecomposition (weights, vectors) keeping weights > tol.

        vectors has shape (r, dim) with row r the eigenvector of weight r.
        """
        w, v = np.linalg.eigh(self.rho.mat)
        keep = w > tol
        return w[keep], v[:, keep].T

    @classmethod
    def antisymmetric(cls, d: int) -> "TestState":
        """Normalized projector onto the antisymmetric two-slot subspace.

        The unique-up-to-choice state with zero same-outcome probability for
        every pair of equal sharp measurements; for d=2 it is the singlet.
        """
        if d < 2:
            raise UnsupportedDimensionError(f"antisymmetric state needs d >= 2, got {d}")
        proj = antisymmetrizer((1, 2), 2, d)
        dminus = d * (d - 1) // 2
        return cls(proj / dminus, kind="antisymmetric")

    @classmethod
    def pure(cls, vec: Vector, kind: str = "pure") -> "TestState":
        if abs(vec.norm() - 1.0) > TOL_ABS:
            raise InvalidStateError(f"pure test state is not normalized: {vec.norm()!r}")
        return cls(vec.projector(), kind=kind)

    @classmethod
    def from_matrix(cls, mat: np.ndarray, d: int, n: int, kind: str = "custom") -> "TestState":
        return cls(Operator(mat, d, n), kind=kind)


@dataclass(frozen=True, eq=False)
class ClassOperators:
    """Averaged operators of one outcome class under both hypotheses.

    domain = support of `different` (where the class can occur at all),
    no_error = domain - support(equal): the subspace whose states never
    yield this class for equal devices.
    """

    outcome_class: str
    equal: Operator
    different: Operator
    domain: Operator
    support_equal: Operator
    no_error: Operator


def _class_ops(name: str, equal: Operator, different: Operator,
               domain: Optional[Operator] = None) -> ClassOperators:
    if domain is None:
        domain = support_projector(different)
    sup_eq = support_projector(equal)
    q = domain - sup_eq
    if np.max(np.abs(q.mat @ q.mat - q.mat)) > TOL_RANK:
        raise ConsistencyError(
            f"no-error subspace of class {name} is not a projector; "
            "support(equal) is not contained in the class domain"
        )
    return ClassOperators(name, equal, different, domain, sup_eq, q)


@lru_cache(maxsize=None)
def labeled_class_operators(d: int) -> Mapping[str, ClassOperators]:
    """Two-slot class operators for the labeled protocol (classes same/diff)."""
    eye = identity(d, 2)
    same_eq = d * rbar("same", d).op
    diff_eq = d * rbar("diff", d).op
    # under independent Haar bases every outcome pair has probability 1/d^2
    same_ne = eye / d
    diff_ne = eye * ((d - 1) / d)
    return MappingProxyType({
        "same": _class_ops("same", same_eq, same_ne, domain=eye),
        "diff": _class_ops("diff", diff_eq, diff_ne, domain=eye),
    })


@lru_cache(maxsize=None)
def unlabeled_operators(d: int = 2) -> Mapping[str, ClassOperators]:
    """Four-slot class operators for the unlabeled two-shot protocol (qubits).

    Slots 1,2 receive the first device twice, slots 3,4 the second device
    twice.  Outcome classes record whether each side's two outcomes agree;
    they are invariant under the unknown outcome relabelings.  The
    equal-hypothesis closed forms are qubit-specific; the
    different-hypothesis family d^2 rbar_x (x) rbar_y holds for every d.
    """
    if d != 2:
        raise UnsupportedDimensionError(
            f"unlabeled two-shot operators are implemented for d=2, got d={d}"
        )
    p34 = symmetrizer((3, 4), 4, d)
    p24 = symmetrizer((2, 4), 4, d)
    p23 = symmetrizer((2, 3), 4, d)
    p12 = symmetrizer((1, 2), 4, d)
    p123 = symmetrizer((1, 2, 3), 4, d)
    p124 = symmetrizer((1, 2, 4), 4, d)
    p134 = symmetrizer((1, 3, 4), 4, d)
    p234 = symmetrizer((2, 3, 4), 4, d)
    p1234 = symmetrizer((1, 2, 3, 4), 4, d)
    eye = identity(d, 4)

    r12 = r_operator("12-34", d).op
    r13 = r_operator("13-24", d).op
    r14 = r_operator("14-23", d).op

    d4 = sym_dim(d, 4)
    # equal hypothesis: average over one Haar basis used by both devices
    eq = {
        "same_same": (d / d4) * p1234 + 2 * (r12 @ p34),
        "same_diff": 2 * ((p123 + p124) / 4 - (d / d4) * p1234),
        "diff_same": 2 * ((p134 + p234) / 4 - (d / d4) * p1234),
        "diff_diff": 2 * ((r13 @ p24) + (r14 @ p23)),
    }
    # different hypothesis: independent Haar bases factorize across the split
    rb = {"same": rbar("same", d).op, "diff": rbar("diff", d).op}
    ne = {
        "same_same": (d * d) * kron(rb["same"], rb["same"]),
        "same_diff": (d * d) * kron(rb["same"], rb["diff"]),
        "diff_same": (d * d) * kron(rb["diff"], rb["same"]),
        "diff_diff": (d * d) * kron(rb["diff"], rb["diff"]),
    }
    # domains (supports of the different-hypothesis operators) in closed form:
    # P12+ (x) P34+, P12+ (x) 1, 1 (x) P34+, identity
    dom = {
        "same_same": Operator(p12.mat @ p34.mat, d, 4),
        "same_diff": p12,
        "diff_same": p34,
        "diff_diff": eye,
    }
    return MappingProxyType({
        c: _class_ops(c, eq[c], ne[c], domain=dom[c]) for c in UNLABELED_CLASSES
    })


# ----------------------------------------------------------- labeled protocol

@dataclass(frozen=True)
class LabeledAverages:
    """Haar-averaged outcome probabilities of the labeled protocol.

    q_* are per-outcome(-pair) probabilities; p_* the class totals (the d
    equal pairs (j,j), respectively the d(d-1) unequal pairs (j,k)).
    """

    d: int
    q_same_equal: float
    q_diff_equal: float
    q_same_different: float
    q_diff_different: float

    @property
    def p_same_equal(self) -> float:
        return self.d * self.q_same_equal

    @property
    def p_diff_equal(self) -> float:
        return self.d * (self.d - 1) * self.q_diff_equal

    @property
    def p_same_different(self) -> float:
        return self.d * self.q_same_different

    @property
    def p_diff_different(self) -> float:
        return self.d * (self.d - 1) * self.q_diff_different


def _as_state(state: Union[TestState, Operator], n: int, d: Optional[int] = None) -> TestState:
    if isinstance(state, Operator):
        state = TestState(state)
    if state.n != n or (d is not None and state.d != d):
        raise DimensionMismatchError(
            f"test state lives on {state.n} slots of dimension {state.d}, "
            f"expected {n} slots" + ("" if d is None else f" of dimension {d}")
        )
    return state


def labeled_outcome_probabilities(state: Union[TestState, Operator]) -> LabeledAverages:
    """Averaged outcome probabilities q(j,k) for one shot of each labeled device.

    Under equal devices (one Haar basis) the probability of the pair (j,j) is
    tr(rho P+)/d2 for every j, and of a fixed pair (j,k), j != k,
    tr(rho (1/d - P+/d2))/(d-1).  Under independent devices every pair has
    probability 1/d^2 regardless of the state.
    """
    state = _as_state(state, n=2)
    d = state.d
    rho = state.rho.mat
    psym = symmetrizer((1, 2), 2, d).mat
    q_same_eq = float(np.trace(rho @ psym).real) / sym_dim(d, 2)
    diff_op = np.eye(d * d) / d - psym / sym_dim(d, 2)
    q_diff_eq = float(np.trace(rho @ diff_op).real) / (d - 1)
    return LabeledAverages(
        d=d,
        q_same_equal=q_same_eq,
        q_diff_equal=q_diff_eq,
        q_same_different=1.0 / d ** 2,
        q_diff_different=1.0 / d ** 2,
    )


def labeled_outcome_distribution(
    a: Observable, b: Observable, state: Union[TestState, Operator]
) -> np.ndarray:
    """Born probabilities p[j, k] for fixed devices a (slot 1) and b (slot 2)."""
    if a.d != b.d:
        raise DimensionMismatchError("devices act on different dimensions")
    state = _as_state(state, n=2, d=a.d)
    uv = np.kron(a.basis, b.basis)
    p = np.real(np.diagonal(uv.conj().T @ state.rho.mat @ uv))
    return p.reshape(a.d, a.d)


def labeled_fixed_pair_success(
    a: Observable, b: Observable, state: Union[TestState, Operator]
) -> float:
    """Probability of equal outcomes for a fixed device pair: sum_j p[j, j]."""
    return float(np.trace(labeled_outcome_distribution(a, b, state)))


# --------------------------------------------------------- unlabeled protocol

def unlabeled_outcome_distribution(
    a: Observable, b: Observable, state: Union[TestState, Operator]
) -> np.ndarray:
    """Born probabilities p[j, k, m, n] for two shots of each device.

    Device a measures slots 1 and 2 (outcomes j, k), device b slots 3 and 4
    (outcomes m, n), before any outcome relabeling is applied.
    """
    if a.d != b.d:
        raise DimensionMismatchError("devices act on different dimensions")
    d = a.d
    state = _as_state(state, n=4, d=d)
    w = np.kron(np.kron(a.basis, a.basis), np.kron(b.basis, b.basis))
    p = np.real(np.diagonal(w.conj().T @ state.rho.mat @ w))
    return p.reshape(d, d, d, d)


def unlabeled_single_use_probability(
    a: Observable, b: Observable, state: Union[TestState, Operator]
) -> np.ndarray:
    """Relabel-averaged outcome probabilities for a single use of each device.

    Averaging over the unknown labelings makes every outcome pair equally
    likely: the returned (d, d) table is constantly tr(rho)/d^2, carrying no
    information about the devices.  One use of each device is therefore
    useless for unlabeled comparison; the two-shot protocol is the smallest
    useful one.
    """
    if a.d != b.d:
        raise DimensionMismatchError("devices act on different dimensions")
    d = a.d
    state = _as_state(state, n=2, d=d)
    uv = np.kron(a.basis, b.basis)
    p = np.real(np.diagonal(uv.conj().T @ state.rho.mat @ uv)).reshape(d, d)
    avg = np.full((d, d), float(p.sum()) / d ** 2)
    return avg


def singlet_pairing_state() -> Vector:
    """Balanced superposition of the two crossed singlet pairings of four qubits.

    (|psi-_13 psi-_24> + |psi-_14 psi-_23>) / sqrt(3); the optimal test state
    of the unlabeled two-shot protocol.  It is annihilated by every
    three-slot symmetrizer and supported in P12+ (x) P34+.
    """
    s = phi_minus(0, 1)
    v = pair_product(s, (1, 3), s, (2, 4)) + pair_product(s, (1, 4), s, (2, 3))
    return (1 / math.sqrt(3)) * v


def kappa_state(j: int) -> TestState:
    """Pure test state on the j-th vector (1-based) of the kappa family."""
    fam = basis_family("kappa")
    if not 1 <= j <= len(fam):
        raise ValueError(f"kappa index must be 1..{len(fam)}, got {j}")
    return TestState.pure(fam[j - 1], kind=f"kappa_{j}")


def optimal_test_state(scenario: Scenario) -> TestState:
    """The test state maximizing unambiguous success for the scenario.

    Labeled: the normalized antisymmetric projector (success 1/d).
    Unlabeled qubits: the crossed-singlet superposition (success 4/9).
    """
    if scenario.kind == "labeled":
        return TestState.antisymmetric(scenario.dim)
    return TestState.pure(singlet_pairing_state(), kind="singlet_pairing")


# ------------------------------------------------------- success accounting

@dataclass(frozen=True)
class SuccessReport:
    """Analytic conclusive-class probabilities under the different hypothesis."""

    scenario: Scenario
    classes: Tuple[str, ...]
    per_class: Mapping[str, float]
    total: float


def _class_probability(op: Operator, state: TestState) -> float:
    return float(np.trace(state.rho.mat @ op.mat).real)


def _operators_for(scenario: Scenario) -> Mapping[str, ClassOperators]:
    if scenario.kind == "labeled":
        return labeled_class_operators(scenario.dim)
    return unlabeled_operators(scenario.dim)


def conclusive_classes(scenario: Scenario, state: Union[TestState, Operator]) -> Tuple[str, ...]:
    """Outcome classes that certify "different" for this test state.

    A class qualifies iff its equal-hypothesis probability is <= NO_ERROR_TOL
    while its different-hypothesis probability exceeds that tolerance.
    """
    ops = _operators_for(scenario)
    state = _as_state(state, n=2 if scenario.kind == "labeled" else 4,
                      d=scenario.dim if scenario.kind == "labeled" else 2)
    out = []
    for name, cls in ops.items():
        p_eq = _class_probability(cls.equal, state)
        p_ne = _class_probability(cls.different, state)
        if p_eq <= NO_ERROR_TOL < p_ne:
            out.append(name)
    return tuple(out)


def analytic_success(
    scenario: Scenario,
    state: Union[TestState, Operator, None] = None,
    claimed: Optional[Sequence[str]] = None,
) -> SuccessReport:
    """Exact success probability of the unambiguous comparison protocol.

    Success is the total different-hypothesis probability of the conclusive
    classes.  If `claimed` names the classes explicitly, each is validated:
    a claimed class with nonzero equal-hypothesis probability raises
    UnambiguityError (reporting "different" on it would be a false positive).
    """
    if state is None:
        state = optimal_test_state(scenario)
    state = _as_state(state, n=2 if scenario.kind == "labeled" else 4,
                      d=scenario.dim if scenario.kind == "labeled" else 2)
    ops = _operators_for(scenario)
    if claimed is None:
        classes = conclusive_classes(scenario, state)
    else:
        classes = tuple(claimed)
        for name in classes:
            if name not in ops:
                raise DimensionMismatchError(f"unknown outcome class {name!r}")
            p_eq = _class_probability(ops[name].equal, state)
            if p_eq > NO_ERROR_TOL:
                raise UnambiguityError(
                    f"class {name!r} has probability {p_eq:.6e} under equal devices "
                    f"(tolerance {NO_ERROR_TOL:g}); reporting it would not be unambiguous"
                )
    per_class = {name: _class_probability(ops[name].different, state) for name in classes}
    return SuccessReport(
        scenario=scenario,
        classes=classes,
        per_class=MappingProxyType(per_class),
        total=float(sum(per_class.values())),
    )


def pairwise_success_angle(theta: float) -> float:
    """Success of the optimal unlabeled test state for a fixed qubit basis pair
    at angle theta: (2/3) sin^2(2 theta)."""
    return (2.0 / 3.0) * math.sin(2.0 * theta) ** 2


def observable_pair_angle(a: Observable, b: Observable) -> float:
    """Angle between two qubit bases: arccos |<a_0|b_0>|.

    The success law is invariant under relabeling either basis (theta ->
    pi/2 - theta leaves sin^2(2 theta) unchanged).
    """
    if a.d != 2 or b.d != 2:
        raise UnsupportedDimensionError("pair angle is defined for qubit bases")
    overlap = abs((a.basis.conj().T @ b.basis)[0, 0])
    return math.acos(min(max(overlap, 0.0), 1.0))


def fixed_pair_class_probability(
    a: Observable, b: Observable, state: Union[TestState, Operator], outcome_class: str
) -> float:
    """Probability of an unlabeled outcome class for fixed devices a, b."""
    if outcome_class not in UNLABELED_CLASSES:
        raise DimensionMismatchError(f"unknown outcome class {outcome_class!r}")
    p = unlabeled_outcome_distribution(a, b, state)
    same_a = np.eye(a.d, dtype=bool)
    mask_a = same_a if outcome_class.startswith("same") else ~same_a
    mask_b = same_a if outcome_class.endswith("same") else ~same_a
    return float(p[mask_a][:, mask_b].sum())


def optimal_success_over_subspace(subspace: Operator, objective: Operator) -> float:
    """Best tr(rho objective) over states supported inside a projector.

    Verification utility for the optimality claims: the maximum is the top
    eigenvalue of Q objective Q.  Returns 0 for the zero subspace.
    """
    if (subspace.d, subspace.n) != (objective.d, objective.n):
        raise DimensionMismatchError("subspace and objective on different spaces")
    q = subspace.mat
    if np.max(np.abs(q)) <= TOL_ABS:
        return 0.0
    w = np.linalg.eigvalsh(q @ objective.mat @ q)
    return float(w[-1].real)
