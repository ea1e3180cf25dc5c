"""Dense state-vector and density-matrix primitives.

Conventions
-----------
* Amplitudes are stored row-major with subsystems in the order listed in
  ``dims``; the basis label ``|i j>`` of a ``(d_A, d_B)`` system sits at
  index ``i * d_B + j``.
* Entries of a bipartite unitary are read as ``a[i, j, k, l] = <ij|U|kl>``,
  i.e. ``U.matrix.reshape(d_A, d_B, d_A, d_B)``.
* States are compared up to global phase (``overlap`` close to 1), never
  component-wise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import prod
from typing import Sequence

import numpy as np

STRUCT_TOL = 1e-12
DERIVED_TOL = 1e-10
PSD_TOL = 1e-10
MAX_SUBSYSTEM_DIM = 64


class RejectedInput(ValueError):
    """Raised when an operation receives structurally invalid input."""


def _as_complex(x) -> np.ndarray:
    arr = np.array(x, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def _norm(v: np.ndarray) -> float:
    return math.sqrt(np.vdot(v, v).real)


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        amps = _as_complex(self.amplitudes).reshape(-1)
        dims = tuple(int(d) for d in self.dims) if self.dims else (amps.size,)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)
        if any(d < 1 or d > MAX_SUBSYSTEM_DIM for d in dims):
            raise RejectedInput(f"subsystem dimensions must lie in [1, {MAX_SUBSYSTEM_DIM}], got {dims}")
        if prod(dims) != amps.size:
            raise RejectedInput(f"dims {dims} do not factor {amps.size} amplitudes")
        norm = _norm(amps)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise RejectedInput(f"state norm {norm!r} deviates from 1 by more than {STRUCT_TOL}")

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int] = ()) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = _norm(amps)
        if norm == 0:
            raise RejectedInput("cannot normalize the zero vector")
        return cls(amps / norm, tuple(dims))

    @classmethod
    def basis(cls, index: int, dims: Sequence[int] | int) -> "StateVector":
        dims = (dims,) if isinstance(dims, int) else tuple(dims)
        amps = np.zeros(prod(dims), dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes of a bipartite state as a ``d_first x d_second`` matrix."""
        if len(self.dims) != 2:
            raise RejectedInput(f"expected a bipartite state, got dims {self.dims}")
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise RejectedInput(f"density operator must be square, got shape {m.shape}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > STRUCT_TOL:
            raise RejectedInput(f"density operator not Hermitian (deviation {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STRUCT_TOL:
            raise RejectedInput(f"density operator trace {tr!r} != 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -PSD_TOL:
            raise RejectedInput(f"density operator has eigenvalue {lo:.3e} < -{PSD_TOL}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class UnitaryOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise RejectedInput(f"unitary must be square, got shape {m.shape}")
        dev = np.abs(m.conj().T @ m - _identity(m.shape[0])).max()
        if dev > DERIVED_TOL:
            raise RejectedInput(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")

    @classmethod
    def identity(cls, dim: int) -> "UnitaryOperator":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T)


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_basis: np.ndarray  # one vector per row
    right_basis: np.ndarray

    @property
    def rank(self) -> int:
        return self.coefficients.size

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.coefficients, self.left_basis, self.right_basis).reshape(-1)


# --------------------------------------------------------------------------
# rng


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the task identified by ``keys``.

    Streams are derived with ``SeedSequence(seed, spawn_key=keys)``, so the
    stream a task receives depends only on the master seed and its key path,
    never on the order in which tasks are executed.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


# --------------------------------------------------------------------------
# constructors


def tensor_product(a, b):
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, UnitaryOperator) and isinstance(b, UnitaryOperator):
        return UnitaryOperator(np.kron(a.matrix, b.matrix))
    raise RejectedInput(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def haar_random_unitary(dim: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix.

    The phases of R's diagonal are pushed back into Q so the result is
    distributed uniformly rather than biased by the QR sign convention.
    """
    if dim < 1:
        raise RejectedInput("dimension must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return UnitaryOperator(q * (d / np.abs(d)))


def haar_random_state(dim: int, rng: np.random.Generator, dims: Sequence[int] = ()) -> StateVector:
    u = haar_random_unitary(dim, rng)
    return StateVector(u.matrix[:, 0], tuple(dims) or (dim,))


# --------------------------------------------------------------------------
# reductions and metrics


def partial_trace(rho: DensityOperator, dims: tuple[int, int], keep: str = "second") -> DensityOperator:
    d1, d2 = (int(d) for d in dims)
    if rho.dim != d1 * d2:
        raise RejectedInput(f"operator of dimension {rho.dim} does not factor as {d1}x{d2}")
    t = rho.matrix.reshape(d1, d2, d1, d2)
    if keep == "first":
        red = np.einsum("ijkj->ik", t)
    elif keep == "second":
        red = np.einsum("ijil->jl", t)
    else:
        raise RejectedInput(f"keep must be 'first' or 'second', got {keep!r}")
    return DensityOperator((red + red.conj().T) / 2)


def reduced_state(psi: StateVector, keep: int) -> DensityOperator:
    """Reduced operator of one subsystem of a bipartite pure state.

    Computed from the coefficient matrix directly, without forming the full
    projector.
    """
    c = psi.coefficient_matrix()
    red = c @ c.conj().T if keep == 0 else c.T @ c.conj()
    return DensityOperator((red + red.conj().T) / 2)


def _psd_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(m)
    if w[0] < -PSD_TOL:
        raise RejectedInput(f"operator has eigenvalue {w[0]:.3e} below -{PSD_TOL}")
    return np.clip(w, 0.0, None), v


def _check_pair(rho: DensityOperator, sigma: DensityOperator) -> None:
    if rho.dim != sigma.dim:
        raise RejectedInput(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Root fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))``.

    Evaluated as the nuclear norm of ``sqrt(rho) sqrt(sigma)`` (same value,
    no square root of near-zero eigenvalues of the sandwich). Pure inputs use
    ``sqrt(<psi|sigma|psi>)`` directly.
    """
    _check_pair(rho, sigma)
    wr, vr = _psd_eigh(rho.matrix)
    ws, vs = _psd_eigh(sigma.matrix)
    if wr[-1] >= 1.0 - STRUCT_TOL:
        psi = vr[:, -1]
        f = np.sqrt(max(np.vdot(psi, sigma.matrix @ psi).real, 0.0))
    elif ws[-1] >= 1.0 - STRUCT_TOL:
        psi = vs[:, -1]
        f = np.sqrt(max(np.vdot(psi, rho.matrix @ psi).real, 0.0))
    else:
        a = (np.sqrt(wr)[:, None] * (vr.conj().T @ vs)) * np.sqrt(ws)[None, :]
        f = np.linalg.svd(a, compute_uv=False).sum()
    return float(min(max(f, 0.0), 1.0))


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    _check_pair(rho, sigma)
    _psd_eigh(rho.matrix)
    _psd_eigh(sigma.matrix)
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(min(0.5 * np.abs(w).sum(), 1.0))


def overlap(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|``; the phase-insensitive equality test for pure states."""
    if a.dim != b.dim:
        raise RejectedInput(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def schmidt_decompose(psi: StateVector, dims: tuple[int, int] | None = None,
                      cutoff: float = STRUCT_TOL) -> SchmidtDecomposition:
    """SVD of the coefficient matrix; coefficients below ``cutoff`` are dropped."""
    d1, d2 = dims if dims is not None else psi.dims
    if d1 * d2 != psi.dim:
        raise RejectedInput(f"dims {(d1, d2)} do not factor a state of dimension {psi.dim}")
    u, s, vh = np.linalg.svd(psi.amplitudes.reshape(d1, d2))
    r = max(int(np.sum(s > cutoff)), 1)
    return SchmidtDecomposition(s[:r].copy(), u[:, :r].T.copy(), vh[:r].copy())


def purify(rho: DensityOperator) -> StateVector:
    """Purification ``sum_k sqrt(lam_k) |v_k> |k>`` with the ancilla second.

    Eigenvalues are taken in non-increasing order, and each eigenvector is
    rotated so its largest-magnitude entry is real and positive; this makes
    the output reproducible for a given input.
    """
    w, v = _psd_eigh(rho.matrix)
    w, v = w[::-1], v[:, ::-1]
    pivots = np.argmax(np.abs(v), axis=0)
    ph = v[pivots, np.arange(v.shape[1])]
    v = v * (ph.conj() / np.abs(ph))[None, :]
    coeffs = v * np.sqrt(w)[None, :]
    amps = coeffs.reshape(-1)
    return StateVector(amps / np.linalg.norm(amps), (rho.dim, rho.dim))


# --------------------------------------------------------------------------
# dynamics and measurement


def _check_target(psi: StateVector, target: int, dim: int) -> None:
    if not 0 <= target < len(psi.dims):
        raise RejectedInput(f"target subsystem {target} out of range for dims {psi.dims}")
    if psi.dims[target] != dim:
        raise RejectedInput(
            f"operator dimension {dim} does not match subsystem {target} of dimension {psi.dims[target]}")


def apply_local(op: UnitaryOperator, psi: StateVector, target: int = 0) -> StateVector:
    _check_target(psi, target, op.dim)
    t = psi.amplitudes.reshape(psi.dims)
    out = np.moveaxis(np.tensordot(op.matrix, t, axes=([1], [target])), 0, target)
    return StateVector(out.reshape(-1), psi.dims)


def apply_unitary(op: UnitaryOperator, psi: StateVector) -> StateVector:
    if op.dim != psi.dim:
        raise RejectedInput(f"operator dimension {op.dim} does not match state dimension {psi.dim}")
    return StateVector(op.matrix @ psi.amplitudes, psi.dims)


@lru_cache(maxsize=None)
def _identity(d: int) -> np.ndarray:
    eye = np.eye(d, dtype=np.complex128)
    eye.setflags(write=False)
    return eye


def check_orthonormal(basis, dim: int | None = None) -> np.ndarray:
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or (dim is not None and b.shape[1] != dim):
        raise RejectedInput(f"basis must be {dim} vectors of length {dim}, got shape {b.shape}")
    dev = np.abs(b.conj() @ b.T - _identity(b.shape[0])).max()
    if dev > DERIVED_TOL:
        raise RejectedInput(f"basis is not orthonormal (deviation {dev:.3e})")
    return b


def measure_projective(psi: StateVector, basis, target: int, rng: np.random.Generator
                       ) -> tuple[int, StateVector]:
    """Measure one subsystem in a complete orthonormal basis (rows of ``basis``).

    Returns the outcome index sampled with Born probabilities and the
    renormalized collapsed state of the whole register.
    """
    dims = psi.dims
    b = check_orthonormal(basis, dims[target] if 0 <= target < len(dims) else None)
    _check_target(psi, target, b.shape[0])
    d = b.shape[0]
    # view the register as (before, target, after) and contract the target axis
    before = prod(dims[:target])
    t = psi.amplitudes.reshape(before, d, -1)
    branches = np.einsum("kd,adc->kac", b.conj(), t)
    probs = (branches.real ** 2 + branches.imag ** 2).reshape(d, -1).sum(axis=1)
    u = rng.random() * probs.sum()
    k, acc = d - 1, 0.0
    for i in range(d - 1):
        acc += probs[i]
        if u < acc:
            k = i
            break
    collapsed = (branches[k] / math.sqrt(probs[k]))[:, None, :] * b[k][None, :, None]
    out = collapsed.reshape(-1)
    return k, StateVector(out / _norm(out), dims)
