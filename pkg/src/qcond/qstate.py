"""Density matrices with labelled subsystem structure.

Subsystems are always addressed by label. Every constructor validates the
density-operator invariants eagerly, so a ``DensityMatrix`` in hand is known
to be Hermitian, unit-trace and positive semidefinite (up to tolerance).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import linmath
from .errors import (
    DimMismatch,
    DuplicateIndex,
    EmptyKeep,
    InvariantError,
    LabelClash,
    LimitExceeded,
    NormError,
    ParseError,
    UnknownLabel,
)

MAX_TOTAL_DIM = 4096
TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9
NEGATIVE_TOL = 1e-9
PROB_TOL = 1e-12
FORMAT_VERSION = 1

DEFAULT_LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class SystemShape:
    parts: tuple[tuple[str, int], ...]
    max_dim: int = field(default=MAX_TOTAL_DIM, compare=False, repr=False)

    def __post_init__(self):
        parts = tuple((str(lbl), int(d)) for lbl, d in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise DimMismatch("a shape needs at least one subsystem")
        labels = [lbl for lbl, _ in parts]
        if any(not lbl for lbl in labels):
            raise LabelClash("subsystem labels must be nonempty")
        if len(set(labels)) != len(labels):
            raise LabelClash(f"duplicate labels in {labels}")
        for lbl, d in parts:
            if d < 2:
                raise DimMismatch(f"subsystem {lbl!r} has dim {d}; need >= 2")
        if self.total_dim > self.max_dim:
            raise LimitExceeded(f"total dim {self.total_dim} exceeds limit {self.max_dim}")

    @classmethod
    def qubits(cls, labels: Iterable[str] = "AB") -> "SystemShape":
        return cls(tuple((lbl, 2) for lbl in labels))

    @classmethod
    def coerce(cls, spec) -> "SystemShape":
        """Accept a SystemShape, ``[(label, dim), ...]`` or a bare list of dims."""
        if isinstance(spec, SystemShape):
            return spec
        spec = list(spec)
        if spec and all(isinstance(s, (int, np.integer)) for s in spec):
            return cls(tuple(zip(DEFAULT_LABELS, spec)))
        return cls(tuple(tuple(p) for p in spec))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.parts)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.parts)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def positions(self, labels: Iterable[str]) -> list[int]:
        out = []
        for lbl in labels:
            if lbl not in self.labels:
                raise UnknownLabel(f"unknown subsystem label {lbl!r}; have {list(self.labels)}")
            out.append(self.labels.index(lbl))
        return out

    def restrict(self, labels: Iterable[str]) -> "SystemShape":
        pos = sorted(set(self.positions(labels)))
        return SystemShape(tuple(self.parts[p] for p in pos), self.max_dim)


def check_invariants(mat: np.ndarray) -> None:
    """Raise InvariantError if ``mat`` is not a valid density matrix."""
    dim = mat.shape[0]
    herm = linmath.hermiticity_residual(mat)
    if herm > HERMITIAN_TOL * dim:
        raise InvariantError("hermiticity", herm)
    tr = np.trace(mat)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvariantError("trace", float(tr.real), f"trace = {tr.real:.12g}")
    lo = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])
    if lo < -NEGATIVE_TOL:
        raise InvariantError("positivity", lo, "negative eigenvalue")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    shape: SystemShape
    mat: np.ndarray

    def __post_init__(self):
        shape = SystemShape.coerce(self.shape)
        mat = linmath.as_matrix(self.mat).copy()
        if mat.shape != (shape.total_dim, shape.total_dim):
            raise DimMismatch(f"matrix {mat.shape} does not fit shape {shape.dims}")
        check_invariants(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "mat", mat)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.shape.labels

    @property
    def dim(self) -> int:
        return self.shape.total_dim

    def eigenvalues(self) -> np.ndarray:
        """Ascending spectrum with round-off negatives clipped to zero."""
        w = linmath.hermitian_eig(self.mat).eigenvalues
        return np.clip(w, 0.0, None)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.mat, other.mat)

    __hash__ = None


def check_probabilities(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float).ravel()
    if p.size == 0:
        raise InvariantError("probability", 0.0, "empty probability vector")
    if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
        raise InvariantError("probability", float(p.min() if p.min() < 0 else p.max()),
                             "entry outside [0, 1]")
    s = float(p.sum())
    if abs(s - 1.0) > TRACE_TOL:
        raise InvariantError("normalization", s, "probabilities do not sum to 1")
    return np.clip(p, 0.0, 1.0)


# --- constructors -----------------------------------------------------------

def from_pure(amplitudes, shape) -> DensityMatrix:
    shape = SystemShape.coerce(shape)
    psi = np.asarray(amplitudes, dtype=np.complex128).ravel()
    if psi.size != shape.total_dim:
        raise DimMismatch(f"{psi.size} amplitudes for total dim {shape.total_dim}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-9:
        raise NormError(f"state norm is {norm:.12g}, expected 1")
    return DensityMatrix(shape, np.outer(psi, psi.conj()))


_S = 2 ** -0.5
_BELL = (
    (_S, 0, 0, _S),  # Phi+
    (_S, 0, 0, -_S),  # Phi-
    (0, _S, _S, 0),  # Psi+
    (0, _S, -_S, 0),  # Psi- (singlet)
)


def bell_state(index: int, labels: Sequence[str] = ("A", "B")) -> DensityMatrix:
    if not 0 <= index < 4:
        raise IndexError(f"Bell index must be 0..3, got {index}")
    return from_pure(_BELL[index], SystemShape.qubits(labels))


def singlet(labels: Sequence[str] = ("A", "B")) -> DensityMatrix:
    return bell_state(3, labels)


def ghz_state(parties: int = 3, dim: int = 2, labels: Sequence[str] | None = None) -> DensityMatrix:
    if parties < 2:
        raise DimMismatch(f"GHZ needs at least 2 parties, got {parties}")
    if dim != 2:
        raise DimMismatch("only qubit GHZ states are supported")
    if labels is None:
        labels = DEFAULT_LABELS[:parties]
    shape = SystemShape(tuple((lbl, dim) for lbl in labels))
    if len(shape.parts) != parties:
        raise DimMismatch(f"{len(shape.parts)} labels for {parties} parties")
    psi = np.zeros(shape.total_dim)
    psi[0] = psi[-1] = _S
    return from_pure(psi, shape)


def _multi_index(idx, dims: Sequence[int]) -> tuple[int, ...]:
    if isinstance(idx, str):
        idx = tuple(int(c) for c in idx)
    elif isinstance(idx, (int, np.integer)):
        idx = (int(idx),)
    idx = tuple(int(i) for i in idx)
    if len(idx) != len(dims) or any(not 0 <= i < d for i, d in zip(idx, dims)):
        raise DimMismatch(f"basis index {idx} does not fit dims {tuple(dims)}")
    return idx


def classical_mixture(probs, basis_indices, shape) -> DensityMatrix:
    """Diagonal state with ``probs[k]`` on the computational basis ket ``basis_indices[k]``.

    Indices are multi-indices such as ``(0, 1)`` or the string ``"01"``.
    """
    shape = SystemShape.coerce(shape)
    p = check_probabilities(probs)
    idx = [_multi_index(i, shape.dims) for i in basis_indices]
    if len(idx) != p.size:
        raise DimMismatch(f"{p.size} probabilities for {len(idx)} basis indices")
    if len(set(idx)) != len(idx):
        raise DuplicateIndex(f"repeated basis index in {idx}")
    diag = np.zeros(shape.total_dim)
    for pk, multi in zip(p, idx):
        diag[np.ravel_multi_index(multi, shape.dims)] = pk
    return DensityMatrix(shape, np.diag(diag))


def product_state(factors: Sequence[DensityMatrix]) -> DensityMatrix:
    if not factors:
        raise DimMismatch("product of zero factors")
    parts = tuple(p for f in factors for p in f.shape.parts)
    labels = [lbl for lbl, _ in parts]
    if len(set(labels)) != len(labels):
        raise LabelClash(f"factor labels overlap: {labels}")
    total = math.prod(d for _, d in parts)
    if total > MAX_TOTAL_DIM:
        raise LimitExceeded(f"total dim {total} exceeds limit {MAX_TOTAL_DIM}")
    mat = factors[0].mat
    for f in factors[1:]:
        mat = linmath.kron(mat, f.mat)
    return DensityMatrix(SystemShape(parts), mat)


def maximally_mixed(shape) -> DensityMatrix:
    shape = SystemShape.coerce(shape)
    return DensityMatrix(shape, np.eye(shape.total_dim) / shape.total_dim)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_vector(dim: int, rng) -> np.ndarray:
    """Haar-random unit vector from a normalized complex Gaussian sample."""
    rng = _rng(rng)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng) -> np.ndarray:
    rng = _rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _two_level_default(shape) -> SystemShape:
    # a bare sequence of labels means qubits
    if not isinstance(shape, SystemShape) and all(isinstance(s, str) for s in shape):
        return SystemShape.qubits(shape)
    return SystemShape.coerce(shape)


def random_separable(seed, terms: int = 4, shape=("A", "B")) -> DensityMatrix:
    """Convex mixture of ``terms`` random pure product states.

    ``shape`` must have exactly two parts; a bare label pair means two qubits.
    """
    if terms < 1:
        raise DimMismatch(f"terms must be >= 1, got {terms}")
    shape = _two_level_default(shape)
    if len(shape.parts) != 2:
        raise DimMismatch("random_separable needs a two-part shape")
    rng = _rng(seed)
    da, db = shape.dims
    weights = rng.dirichlet(np.ones(terms))
    mat = np.zeros((shape.total_dim, shape.total_dim), dtype=np.complex128)
    for w in weights:
        a = random_pure_vector(da, rng)
        b = random_pure_vector(db, rng)
        ab = np.kron(a, b)
        mat += w * np.outer(ab, ab.conj())
    return DensityMatrix(shape, mat / np.trace(mat).real)


def random_mixed(seed, shape=("A", "B"), rank: int | None = None) -> DensityMatrix:
    """Random mixed state ``G G^H / Tr`` from a complex Ginibre matrix of the given rank."""
    shape = _two_level_default(shape)
    rng = _rng(seed)
    d = shape.total_dim
    k = d if rank is None else int(rank)
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(shape, m / np.trace(m).real)


def transform(rho: DensityMatrix, unitary) -> DensityMatrix:
    u = linmath.as_matrix(unitary)
    return DensityMatrix(rho.shape, u @ rho.mat @ u.conj().T)


def reduce(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    keep = list(keep)
    if not keep:
        raise EmptyKeep("reduce needs at least one label to keep")
    pos = rho.shape.positions(keep)
    mat = linmath.partial_trace(rho.mat, rho.shape.dims, pos)
    return DensityMatrix(rho.shape.restrict(keep), mat)


# --- file I/O ---------------------------------------------------------------

def _fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return format(x, ".17g")


def dumps_state(rho: DensityMatrix) -> str:
    shape = ", ".join(
        f'{{"label": {json.dumps(lbl)}, "dim": {d}}}' for lbl, d in rho.shape.parts
    )

    def rows(a):
        return ",\n    ".join("[" + ", ".join(_fmt(x) for x in row) + "]" for row in a)

    return (
        "{\n"
        f'  "version": {FORMAT_VERSION},\n'
        f'  "shape": [{shape}],\n'
        f'  "matrix_re": [\n    {rows(rho.mat.real)}\n  ],\n'
        f'  "matrix_im": [\n    {rows(rho.mat.imag)}\n  ]\n'
        "}\n"
    )


def save_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(dumps_state(rho), encoding="utf-8")


def _field(doc: dict, name: str):
    if name not in doc:
        raise ParseError("missing required field", field=name)
    return doc[name]


def _real_grid(value, name: str, dim: int) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise ParseError(f"expected {dim} rows", field=name)
    out = np.empty((dim, dim))
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"row {i} must have {dim} entries", field=name)
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"entry [{i}][{j}] is not a number", field=name)
            out[i, j] = x
    if not np.all(np.isfinite(out)):
        raise ParseError("non-finite entry", field=name)
    return out


def loads_state(text: str) -> DensityMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", line=1)
    version = _field(doc, "version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}", field="version")
    raw_shape = _field(doc, "shape")
    if not isinstance(raw_shape, list):
        raise ParseError("must be a list", field="shape")
    parts = []
    for k, part in enumerate(raw_shape):
        if not isinstance(part, dict) or "label" not in part or "dim" not in part:
            raise ParseError(f"entry {k} needs 'label' and 'dim'", field="shape")
        if not isinstance(part["dim"], int) or isinstance(part["dim"], bool):
            raise ParseError(f"entry {k} dim must be an integer", field="shape")
        parts.append((part["label"], part["dim"]))
    try:
        shape = SystemShape(tuple(parts))
    except (DimMismatch, LabelClash, LimitExceeded) as exc:
        raise ParseError(str(exc), field="shape") from None
    dim = shape.total_dim
    re = _real_grid(_field(doc, "matrix_re"), "matrix_re", dim)
    im = _real_grid(_field(doc, "matrix_im"), "matrix_im", dim)
    return DensityMatrix(shape, re + 1j * im)


def load_state(path) -> DensityMatrix:
    return loads_state(Path(path).read_text(encoding="utf-8"))
