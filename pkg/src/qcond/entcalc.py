"""Entropy calculus on density matrices, in bits.

Entropies are always computed from the spectra of joint and marginal states
(``S(A|B) = S(AB) - S(B)``, ``S(A:B) = S(A) + S(B) - S(AB)``). The conditional
and mutual amplitude operators are built separately; ``entropy_via_operator``
evaluates ``-Tr[rho log2 amp]`` from them as an independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linmath
from .errors import (
    ArakiLiebViolation,
    DimMismatch,
    PartitionError,
    PositivityError,
    SupportError,
    UnknownLabel,
)
from .qstate import DensityMatrix, SystemShape, check_probabilities, reduce

COMMUTE_TOL = 1e-10
REGULARIZATION = 1e-10
POSITIVITY_TOL = 1e-7
SUPPORT_WEIGHT_TOL = 1e-8
CLASSICAL_BOUND_TOL = 1e-8
ARAKI_LIEB_TOL = 1e-7
NEGATIVE_TOL = 1e-8
UNCLASSICAL_TOL = 1e-9
TROTTER_MAX_N = 2**20
DEFAULT_TROTTER_N = tuple(2**k for k in range(9))


@dataclass(frozen=True)
class Partition:
    side_a: tuple[str, ...]
    side_b: tuple[str, ...]

    def __post_init__(self):
        a = tuple(self.side_a) if not isinstance(self.side_a, str) else (self.side_a,)
        b = tuple(self.side_b) if not isinstance(self.side_b, str) else (self.side_b,)
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)
        if not a or not b:
            raise PartitionError("both sides of a partition must be nonempty")
        if len(set(a)) != len(a) or len(set(b)) != len(b):
            raise PartitionError(f"repeated label in {self}")
        if set(a) & set(b):
            raise PartitionError(f"sides overlap: {sorted(set(a) & set(b))}")

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"A|B"`` or ``"A,B|C"``."""
        sides = text.split("|")
        if len(sides) != 2:
            raise PartitionError(f"partition {text!r} must have exactly one '|'")
        a, b = ([s.strip() for s in side.split(",") if s.strip()] for side in sides)
        return cls(tuple(a), tuple(b))

    def swapped(self) -> "Partition":
        return Partition(self.side_b, self.side_a)

    def __str__(self):
        return ",".join(self.side_a) + "|" + ",".join(self.side_b)


def _as_partition(part) -> Partition:
    if isinstance(part, Partition):
        return part
    if isinstance(part, str):
        return Partition.parse(part)
    a, b = part
    return Partition(a, b)


def _joint(rho: DensityMatrix, part: Partition) -> DensityMatrix:
    """The state restricted to the labels the partition mentions."""
    try:
        rho.shape.positions(part.side_a + part.side_b)
    except UnknownLabel as exc:
        raise PartitionError(str(exc)) from None
    if set(part.side_a + part.side_b) == set(rho.labels):
        return rho
    return reduce(rho, part.side_a + part.side_b)


# --- entropies --------------------------------------------------------------

def _shannon_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def shannon_entropy(p) -> float:
    return _shannon_bits(check_probabilities(p))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    w = rho.eigenvalues()
    # eigenvalues a hair above 1 would give a round-off negative entropy
    return max(_shannon_bits(w[w > linmath.SUPPORT_CUTOFF]), 0.0)


def subsystem_entropy(rho: DensityMatrix, labels: Iterable[str]) -> float:
    labels = list(labels)
    if set(labels) == set(rho.labels):
        return von_neumann_entropy(rho)
    return von_neumann_entropy(reduce(rho, labels))


def conditional_entropy(rho: DensityMatrix, part) -> float:
    """S(A|B) = S(AB) - S(B); negative values signal entanglement."""
    part = _as_partition(part)
    joint = _joint(rho, part)
    return von_neumann_entropy(joint) - subsystem_entropy(joint, part.side_b)


def mutual_entropy(rho: DensityMatrix, part) -> float:
    part = _as_partition(part)
    joint = _joint(rho, part)
    return (
        subsystem_entropy(joint, part.side_a)
        + subsystem_entropy(joint, part.side_b)
        - von_neumann_entropy(joint)
    )


def _joint_probabilities(p_joint) -> np.ndarray:
    p = np.asarray(p_joint, dtype=float)
    if p.ndim != 2:
        raise DimMismatch("joint distribution must be a 2-D array p[i, j]")
    check_probabilities(p)
    return p


def classical_conditional_entropy(p_joint) -> float:
    """H(A|B) = -sum p_ij log2 p_{i|j} for a joint table ``p[i, j]``."""
    p = _joint_probabilities(p_joint)
    pj = p.sum(axis=0)
    i, j = np.nonzero(p > 0)
    return float(-np.sum(p[i, j] * np.log2(p[i, j] / pj[j]))) + 0.0


def classical_mutual_entropy(p_joint) -> float:
    """H(A:B) = -sum p_ij log2 (p_i p_j / p_ij)."""
    p = _joint_probabilities(p_joint)
    pi, pj = p.sum(axis=1), p.sum(axis=0)
    i, j = np.nonzero(p > 0)
    return float(-np.sum(p[i, j] * np.log2(pi[i] * pj[j] / p[i, j]))) + 0.0


# --- amplitude operators ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConditionalAmplitude:
    """Positive Hermitian operator on the joint space; not a density matrix."""

    mat: np.ndarray
    kind: str  # "conditional" | "mutual"
    method: str  # "commuting" | "exp-log"
    shape: SystemShape
    partition: Partition

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def unclassical_eigenvalues(self) -> np.ndarray:
        w = self.eigenvalues()
        return w[w > 1 + UNCLASSICAL_TOL]


def _embed(joint: DensityMatrix, labels: Sequence[str]) -> np.ndarray:
    """``rho_X (x) 1_rest`` on the joint space, in the joint label order."""
    shape = joint.shape
    keep = sorted(shape.positions(labels))
    rest = [k for k in range(len(shape.dims)) if k not in keep]
    marg = linmath.partial_trace(joint.mat, shape.dims, keep)
    d_rest = int(np.prod([shape.dims[k] for k in rest])) if rest else 1
    big = np.kron(marg, np.eye(d_rest))
    order = keep + rest
    dims = [shape.dims[k] for k in order]
    n = len(dims)
    t = big.reshape(dims + dims)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + k for k in inv])
    return t.reshape(joint.dim, joint.dim)


def _regularize(joint: DensityMatrix, eps: float) -> DensityMatrix:
    d = joint.dim
    return DensityMatrix(joint.shape, (1 - eps) * joint.mat + eps * np.eye(d) / d)


def _operands(joint: DensityMatrix, part: Partition, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """(numerator, denominator) whose limit quotient defines the operator."""
    if kind == "conditional":
        return joint.mat, _embed(joint, part.side_b)
    if kind == "mutual":
        return _embed(joint, part.side_a) @ _embed(joint, part.side_b), joint.mat
    raise ValueError(f"unknown amplitude kind {kind!r}")


def _log(m: np.ndarray) -> np.ndarray:
    return linmath.matrix_function(m, np.log)


def _exp_log_quotient(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return linmath.matrix_function(_log(num) - _log(den), np.exp)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _amplitude(rho: DensityMatrix, part, kind: str) -> ConditionalAmplitude:
    part = _as_partition(part)
    joint = _joint(rho, part)
    num, den = _operands(joint, part, kind)
    if linmath.commutator_norm(num, den) <= COMMUTE_TOL:
        pinv = linmath.matrix_function(den, lambda x: 1.0 / x, support_only=True)
        mat = _hermitize(num @ pinv)
        method = "commuting"
    else:
        num, den = _operands(_regularize(joint, REGULARIZATION), part, kind)
        mat = _hermitize(_exp_log_quotient(num, den))
        method = "exp-log"
    lo = float(np.linalg.eigvalsh(mat)[0])
    if lo < -POSITIVITY_TOL:
        raise PositivityError(f"{kind} amplitude has eigenvalue {lo:.3g}")
    return ConditionalAmplitude(mat, kind, method, joint.shape, part)


def conditional_amplitude(rho: DensityMatrix, part) -> ConditionalAmplitude:
    """The operator lim_n [rho_AB^(1/n) (1_A (x) rho_B)^(-1/n)]^n.

    Commuting joint/marginal pairs take the exact closed form
    ``rho_AB pinv(1_A (x) rho_B)``; otherwise the limit is evaluated as
    ``exp(log rho'_AB - log(1_A (x) rho'_B))`` on the slightly mixed state
    ``rho' = (1 - eps) rho + eps 1/d``.
    """
    return _amplitude(rho, part, "conditional")


def mutual_amplitude(rho: DensityMatrix, part) -> ConditionalAmplitude:
    """The operator lim_n [(rho_A (x) rho_B)^(1/n) rho_AB^(-1/n)]^n."""
    return _amplitude(rho, part, "mutual")


def entropy_via_operator(rho: DensityMatrix, amp: ConditionalAmplitude) -> float:
    """-Tr[rho_AB log2 amp], with log taken on the support of ``amp``."""
    joint = _joint(rho, amp.partition)
    if joint.shape != amp.shape:
        raise DimMismatch(f"state shape {joint.shape.parts} does not match operator {amp.shape.parts}")
    w, v = np.linalg.eigh(_hermitize(amp.mat))
    w = np.clip(w, 0.0, None)
    on = w > linmath.SUPPORT_CUTOFF
    vs = v[:, on]
    inside = float(np.trace(vs.conj().T @ joint.mat @ vs).real)
    if 1.0 - inside > SUPPORT_WEIGHT_TOL:
        raise SupportError(f"state has weight {1.0 - inside:.3g} outside the operator support")
    log_amp = (vs * np.log2(w[on])) @ vs.conj().T
    return float(-np.trace(joint.mat @ log_amp).real) + 0.0


@dataclass(frozen=True, eq=False)
class TrotterStep:
    n: int
    matrix: np.ndarray
    distance: float


def trotter_sequence(
    rho: DensityMatrix, part, n_list: Sequence[int] = DEFAULT_TROTTER_N, kind: str = "conditional"
) -> list[TrotterStep]:
    """Finite-n products [num^(1/n) den^(-1/n)]^n against the exp-log limit.

    The state is regularized as in ``conditional_amplitude``; distances are
    Frobenius norms to the exp-log form at the same regularization.
    """
    part = _as_partition(part)
    n_list = [int(n) for n in n_list]
    if any(n < 1 or n > TROTTER_MAX_N for n in n_list):
        raise ValueError(f"Trotter n must lie in [1, {TROTTER_MAX_N}], got {n_list}")
    joint = _regularize(_joint(rho, part), REGULARIZATION)
    num, den = _operands(joint, part, kind)
    limit = _exp_log_quotient(num, den)
    num_w, num_v = linmath.hermitian_eig(num)
    den_w, den_v = linmath.hermitian_eig(den)
    out = []
    for n in n_list:
        a = (num_v * num_w ** (1.0 / n)) @ num_v.conj().T
        b = (den_v * den_w ** (-1.0 / n)) @ den_v.conj().T
        t = np.linalg.matrix_power(a @ b, n)
        out.append(TrotterStep(n, t, float(np.linalg.norm(t - limit))))
    return out


# --- diagrams ---------------------------------------------------------------

@dataclass(frozen=True)
class EntropyDiagram:
    s_a_given_b: float
    s_mutual: float
    s_b_given_a: float
    s_a: float
    s_b: float
    s_ab: float

    @property
    def triple(self) -> tuple[float, float, float]:
        return (self.s_a_given_b, self.s_mutual, self.s_b_given_a)


def bipartite_diagram(rho: DensityMatrix, part) -> EntropyDiagram:
    part = _as_partition(part)
    joint = _joint(rho, part)
    s_ab = von_neumann_entropy(joint)
    s_a = subsystem_entropy(joint, part.side_a)
    s_b = subsystem_entropy(joint, part.side_b)
    return EntropyDiagram(
        s_a_given_b=s_ab - s_b,
        s_mutual=s_a + s_b - s_ab,
        s_b_given_a=s_ab - s_a,
        s_a=s_a,
        s_b=s_b,
        s_ab=s_ab,
    )


def _three(rho: DensityMatrix, labels) -> tuple[str, str, str]:
    labels = tuple(labels) if labels is not None else rho.labels
    if len(labels) != 3 or len(set(labels)) != 3:
        raise PartitionError(f"ternary quantities need three distinct labels, got {labels}")
    try:
        rho.shape.positions(labels)
    except UnknownLabel as exc:
        raise PartitionError(str(exc)) from None
    return labels


def _joint_entropies(rho: DensityMatrix, labels) -> dict[frozenset, float]:
    a, b, c = labels
    groups = [(a,), (b,), (c,), (a, b), (a, c), (b, c), (a, b, c)]
    return {frozenset(g): subsystem_entropy(rho, g) for g in groups}


def ternary_mutual_entropy(rho: DensityMatrix, labels=None) -> float:
    """S(A:B:C) = S(A)+S(B)+S(C) - S(AB)-S(AC)-S(BC) + S(ABC)."""
    a, b, c = _three(rho, labels)
    s = _joint_entropies(rho, (a, b, c))
    f = frozenset
    return (
        s[f({a})] + s[f({b})] + s[f({c})]
        - s[f({a, b})] - s[f({a, c})] - s[f({b, c})]
        + s[f({a, b, c})]
    )


@dataclass(frozen=True)
class TernaryDiagram:
    labels: tuple[str, str, str]
    # c(A|BC), c(B|AC), c(C|AB)
    conditionals: tuple[float, float, float]
    # m(A:B|C), m(A:C|B), m(B:C|A)
    conditional_mutuals: tuple[float, float, float]
    center: float
    entropies: dict  # frozenset of labels -> joint entropy

    def entropy(self, *labels: str) -> float:
        return self.entropies[frozenset(labels)]

    def regions(self) -> dict[str, float]:
        a, b, c = self.labels
        return {
            f"S({a}|{b}{c})": self.conditionals[0],
            f"S({b}|{a}{c})": self.conditionals[1],
            f"S({c}|{a}{b})": self.conditionals[2],
            f"S({a}:{b}|{c})": self.conditional_mutuals[0],
            f"S({a}:{c}|{b})": self.conditional_mutuals[1],
            f"S({b}:{c}|{a})": self.conditional_mutuals[2],
            f"S({a}:{b}:{c})": self.center,
        }


def ternary_diagram(rho: DensityMatrix, labels=None) -> TernaryDiagram:
    a, b, c = _three(rho, labels)
    s = _joint_entropies(rho, (a, b, c))
    f = frozenset
    s_abc = s[f({a, b, c})]

    def cond(x, y, z):  # S(X|YZ)
        return s_abc - s[f({y, z})]

    def cmut(x, y, z):  # S(X:Y|Z)
        return s[f({x, z})] + s[f({y, z})] - s[f({z})] - s_abc

    center = (
        s[f({a})] + s[f({b})] + s[f({c})]
        - s[f({a, b})] - s[f({a, c})] - s[f({b, c})]
        + s_abc
    )
    return TernaryDiagram(
        labels=(a, b, c),
        conditionals=(cond(a, b, c), cond(b, a, c), cond(c, a, b)),
        conditional_mutuals=(cmut(a, b, c), cmut(a, c, b), cmut(b, c, a)),
        center=center,
        entropies=s,
    )


# --- bounds and witness -----------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    s_a: float
    s_b: float
    s_ab: float
    s_a_given_b: float
    s_b_given_a: float
    s_mutual: float
    classical_mutual_bound_violated: bool
    araki_lieb_satisfied: bool
    araki_lieb_saturated: bool
    negative_conditional: tuple[bool, bool]  # (S(A|B) < 0, S(B|A) < 0)
    entanglement_witnessed: bool


def check_bounds(rho: DensityMatrix, part) -> BoundsReport:
    """Classical and quantum upper bounds on the mutual entropy.

    Raises ArakiLiebViolation if S(A:B) exceeds 2 min(S(A), S(B)); that is a
    theorem, so a violation means a numerical fault.
    """
    d = bipartite_diagram(rho, part)
    smaller = min(d.s_a, d.s_b)
    if d.s_mutual > 2 * smaller + ARAKI_LIEB_TOL:
        raise ArakiLiebViolation(
            f"S(A:B) = {d.s_mutual:.12g} > 2 min(S(A), S(B)) = {2 * smaller:.12g}"
        )
    neg = (d.s_a_given_b < -NEGATIVE_TOL, d.s_b_given_a < -NEGATIVE_TOL)
    return BoundsReport(
        s_a=d.s_a,
        s_b=d.s_b,
        s_ab=d.s_ab,
        s_a_given_b=d.s_a_given_b,
        s_b_given_a=d.s_b_given_a,
        s_mutual=d.s_mutual,
        classical_mutual_bound_violated=d.s_mutual > smaller + CLASSICAL_BOUND_TOL,
        araki_lieb_satisfied=True,
        araki_lieb_saturated=abs(d.s_mutual - 2 * smaller) <= ARAKI_LIEB_TOL,
        negative_conditional=neg,
        entanglement_witnessed=any(neg),
    )


@dataclass(frozen=True)
class WitnessResult:
    witnessed: bool
    s_a_given_b: float
    s_b_given_a: float

    @property
    def verdict(self) -> str:
        # non-negative conditionals never certify separability
        return "entangled" if self.witnessed else "inconclusive"


def entanglement_witness(rho: DensityMatrix, part) -> WitnessResult:
    part = _as_partition(part)
    ab = conditional_entropy(rho, part)
    ba = conditional_entropy(rho, part.swapped())
    return WitnessResult(ab < -NEGATIVE_TOL or ba < -NEGATIVE_TOL, ab, ba)
