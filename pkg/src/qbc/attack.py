"""Synthesis of Alice's cheating unitary.

Two constructions are provided.

``synthesize_diagonal`` builds a diagonal ``S_A`` from ratios of entries of
``U_AB``.  It needs the term-wise amplitude condition

    a[i,j,0,l] * conj(a[i,q,0,r]) == a[i,j,1,l] * conj(a[i,q,1,r])

and, when that holds, the resulting ``S_A`` does not depend on Bob's initial
state at all.

``synthesize_uhlmann`` works for any pair of bipartite states.  With ``C_b``
the coefficient matrix of ``|phi_b>``, the overlap reached by ``S (x) I`` is
``Tr(S C_0 C_1^dag)``; taking the SVD ``C_0 C_1^dag = U S V^dag`` the
maximizer is ``V U^dag`` and the maximum is the nuclear norm, which equals
the fidelity of Bob's two reduced states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qcore import RejectedInput, StateVector, UnitaryOperator
from .scheme import CommitmentScheme, commit_state

DIAGONAL = "diagonal"
UHLMANN = "uhlmann"
DIAGONAL_CONDITION_TOL = 1e-8
_ZERO_ROW_TOL = 1e-14


class ConditionFailed(Exception):
    """The term-wise concealing condition does not hold; use the Uhlmann path."""

    def __init__(self, residual: float):
        super().__init__(f"term-wise concealing condition violated (residual {residual:.3g})")
        self.residual = residual


@dataclass(frozen=True)
class AttackReport:
    s_a: UnitaryOperator
    achieved_fidelity: float
    method: str
    condition_residual: float


class ConcealingResidual(NamedTuple):
    termwise: float
    summed: float


def _basis_index(state: StateVector) -> int | None:
    k = int(np.argmax(np.abs(state.amplitudes)))
    if abs(abs(state.amplitudes[k]) - 1.0) <= 1e-12:
        return k
    return None


def branch_amplitudes(scheme: CommitmentScheme) -> tuple[np.ndarray, np.ndarray]:
    """``a[:, :, k_b, :]`` for both bits, phases of the encodings included.

    Only defined when both encodings are (phased) computational basis
    states of Alice's register.
    """
    idx = [_basis_index(scheme.encode0), _basis_index(scheme.encode1)]
    if None in idx:
        raise RejectedInput("diagonal synthesis needs computational-basis encodings")
    a = scheme.amplitude_tensor()
    return (a[:, :, idx[0], :] * scheme.encode0.amplitudes[idx[0]],
            a[:, :, idx[1], :] * scheme.encode1.amplitudes[idx[1]])


def check_concealing_condition(scheme: CommitmentScheme) -> ConcealingResidual:
    """Residuals of the amplitude condition for perfect concealment.

    ``termwise`` is the max over ``(i, j, l, q, r)`` of the violation of the
    condition stated per Alice index ``i``; ``summed`` sums over ``i`` first,
    which is exactly ``rho_0^B == rho_1^B`` for every Bob input.  The
    term-wise form is sufficient, the summed form necessary and sufficient.
    """
    a0, a1 = branch_amplitudes(scheme)
    # g_b[i, j, l, q, r] = a_b[i, j, l] * conj(a_b[i, q, r])
    g0 = np.einsum("ijl,iqr->ijlqr", a0, a0.conj())
    g1 = np.einsum("ijl,iqr->ijlqr", a1, a1.conj())
    diff = g0 - g1
    return ConcealingResidual(float(np.max(np.abs(diff))), float(np.max(np.abs(diff.sum(axis=0)))))


def verify_attack(s_a: UnitaryOperator, phi0: StateVector, phi1: StateVector,
                  dims: tuple[int, int] | None = None) -> float:
    """``|<phi_1| (S_A (x) I) |phi_0>|`` evaluated by direct matrix action."""
    dims = tuple(dims) if dims is not None else phi0.dims
    if phi0.dims != dims or phi1.dims != dims or len(dims) != 2:
        raise RejectedInput(f"states must both be bipartite with dims {dims}")
    if s_a.dim != dims[0]:
        raise RejectedInput(f"S_A has dimension {s_a.dim}, Alice's factor has {dims[0]}")
    moved = np.kron(s_a.matrix, np.eye(dims[1])) @ phi0.amplitudes
    return float(min(abs(np.vdot(phi1.amplitudes, moved)), 1.0))


def synthesize_diagonal(scheme: CommitmentScheme, bob_init: StateVector | None = None) -> AttackReport:
    """Diagonal ``S_A`` from entry ratios, one reference entry per row.

    Row ``x`` uses the largest-magnitude ``a[x, q, 1, r]`` as reference and
    sets ``s_xx = conj(a[x,q,0,r]) / conj(a[x,q,1,r])``, rescaled to unit
    modulus.  Rows whose bit-1 amplitudes all vanish get ``s_xx = 1``.

    The fidelity is reported for ``bob_init`` (default: the scheme's fixed
    Bob state, else ``|0>``), but ``S_A`` itself never looks at it.
    """
    residual = check_concealing_condition(scheme).termwise
    if residual > DIAGONAL_CONDITION_TOL:
        raise ConditionFailed(residual)
    a0, a1 = branch_amplitudes(scheme)
    diag = np.ones(scheme.d_A, dtype=np.complex128)
    for x in range(scheme.d_A):
        ref = np.unravel_index(np.argmax(np.abs(a1[x])), a1[x].shape)
        if abs(a1[x][ref]) <= _ZERO_ROW_TOL:
            continue
        s = np.conj(a0[x][ref]) / np.conj(a1[x][ref])
        diag[x] = s / abs(s)
    s_a = UnitaryOperator(np.diag(diag))
    if bob_init is None:
        bob_init = scheme.bob_state if scheme.bob_state is not None else StateVector.basis(0, scheme.d_B)
    phi0 = commit_state(scheme, 0, bob_init)
    phi1 = commit_state(scheme, 1, bob_init)
    return AttackReport(s_a, verify_attack(s_a, phi0, phi1), DIAGONAL, residual)


def synthesize_uhlmann(phi0: StateVector, phi1: StateVector,
                       dims: tuple[int, int] | None = None) -> AttackReport:
    dims = tuple(dims) if dims is not None else phi0.dims
    if len(dims) != 2 or phi0.dims != dims or phi1.dims != dims:
        raise RejectedInput(f"both states must be bipartite with dims {dims}, got {phi0.dims} and {phi1.dims}")
    c0, c1 = phi0.coefficient_matrix(), phi1.coefficient_matrix()
    u, s, vh = np.linalg.svd(c0 @ c1.conj().T)
    s_a = UnitaryOperator(vh.conj().T @ u.conj().T)
    achieved = float(min(s.sum(), 1.0))
    return AttackReport(s_a, achieved, UHLMANN, 1.0 - achieved)


def synthesize(scheme: CommitmentScheme, bob_init: StateVector) -> AttackReport:
    """Diagonal construction when its condition holds, Uhlmann otherwise."""
    try:
        return synthesize_diagonal(scheme, bob_init)
    except (ConditionFailed, RejectedInput):
        return synthesize_uhlmann(commit_state(scheme, 0, bob_init), commit_state(scheme, 1, bob_init))
