"""Simulation of a TTP-assisted non-static bit commitment protocol.

Roles: Alice (committer, holds the ancilla ``A'`` and one half ``A`` of each
singlet), the TTP (holds the other half ``T``), Bob (receives ``A``).

Per round:

1. preparing  -- a singlet is shared between A and T; the TTP measures T in
   a Haar-random basis {|f>, |f_perp>} and keeps basis and outcome secret.
   Alice's qubit is left in the opposite basis vector ``|psi>``.
2. commitment -- Alice entangles an ancilla ``|+>_{A'}`` with ``A`` through
   ``|0><0| (x) P_0 + |1><1| (x) P_1`` where ``(P_0, P_1)`` is ``(M, N)`` for
   bit 0 and ``(J, K)`` for bit 1, then sends ``A`` to Bob.
3. sustaining -- nothing happens.
4. revealing  -- Alice announces the operator label for the round, the TTP
   announces basis and outcome; Bob undoes the claimed operator, measures in
   the announced basis and accepts the round iff his outcome is opposite to
   the TTP's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .attack import AttackReport, synthesize_uhlmann
from .qcore import (
    DensityOperator,
    StateVector,
    UnitaryOperator,
    haar_random_unitary,
    measure_projective,
    reduced_state,
)
from .scheme import CommitmentScheme

_S = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class CommitOperators:
    M: UnitaryOperator
    N: UnitaryOperator
    J: UnitaryOperator
    K: UnitaryOperator

    def __getitem__(self, label: str) -> UnitaryOperator:
        return getattr(self, label)


OPERATORS = CommitOperators(
    M=UnitaryOperator(np.eye(2)),
    N=UnitaryOperator([[0, -1], [1, 0]]),
    J=UnitaryOperator(_S * np.array([[1, 1j], [1, -1j]])),
    K=UnitaryOperator(_S * np.array([[1, 1j], [-1, 1j]])),
)
LABELS_FOR_BIT = {0: ("M", "N"), 1: ("J", "K")}

_COMPUTATIONAL = np.eye(2, dtype=np.complex128)
_PLUS = StateVector([_S, _S])
_I2 = np.eye(2)


# --------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class Honest:
    bit: int = 0


@dataclass(frozen=True)
class FlipAtReveal:
    """Commit 0 honestly, then claim 1 with a uniformly random J/K label."""


@dataclass(frozen=True)
class CustomUnitaryCheat:
    """Commit 0, apply ``s`` to the ancilla before the reveal, then open as 1.

    The label announced for a round is J if the ancilla is found in ``|0>``
    and K if found in ``|1>``.
    """
    s: UnitaryOperator


Strategy = Union[Honest, FlipAtReveal, CustomUnitaryCheat]


# --------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class PreparedRound:
    ttp_basis: np.ndarray  # rows |f>, |f_perp>
    ttp_outcome: int
    alice_state: StateVector


@dataclass(frozen=True)
class RoundRecord:
    ttp_basis: np.ndarray
    ttp_outcome: int
    alice_state: StateVector
    alice_operator: str
    claimed_operator: str
    bob_outcome: int
    accepted: bool


@dataclass(frozen=True)
class ProtocolTranscript:
    rounds: list[RoundRecord] = field(repr=False)
    committed_bit: int
    claimed_bit: int
    verdict: str

    @property
    def accepted_rounds(self) -> int:
        return sum(r.accepted for r in self.rounds)


ACCEPT = "Accept"
REJECT = "Reject"


# --------------------------------------------------------------------------
# protocol pieces


def make_singlet() -> StateVector:
    return StateVector([0, _S, -_S, 0], (2, 2))


_SINGLET = make_singlet()


def check_uu_invariance(u: UnitaryOperator) -> float:
    """``|<psi-| (U (x) U) |psi->|``."""
    s = make_singlet().amplitudes
    return float(abs(np.vdot(s, np.kron(u.matrix, u.matrix) @ s)))


def ttp_prepare_round(rng: np.random.Generator, basis=None) -> PreparedRound:
    """Share a singlet and let the TTP measure its half.

    ``basis`` (rows) defaults to a Haar-random orthonormal pair.
    """
    if basis is None:
        basis = haar_random_unitary(2, rng).matrix.T
    basis = np.asarray(basis, dtype=np.complex128)
    outcome, post = measure_projective(_SINGLET, basis, 1, rng)
    alice = post.coefficient_matrix() @ basis[outcome].conj()
    return PreparedRound(basis, outcome, StateVector(alice / np.linalg.norm(alice)))


def alice_commit(b: int, psi: StateVector) -> StateVector:
    """Ancilla-controlled commitment state on ``(A', A)``."""
    p0, p1 = (OPERATORS[label].matrix for label in LABELS_FOR_BIT[b])
    v = psi.amplitudes
    amps = np.concatenate([p0 @ v, p1 @ v]) * _S
    return StateVector(amps, (2, 2))


def bob_verify_round(claimed_operator: str, received_qubit: StateVector, ttp_basis, ttp_outcome: int,
                     rng: np.random.Generator) -> tuple[bool, int]:
    """Undo the claimed operator, measure in the TTP basis, compare outcomes.

    Returns ``(accepted, bob_outcome)``.
    """
    undone = OPERATORS[claimed_operator].matrix.conj().T @ received_qubit.amplitudes
    outcome, _ = measure_projective(StateVector(undone), ttp_basis, 0, rng)
    return outcome != ttp_outcome, outcome


def _reveal(strategy: Strategy, phi: StateVector, rng: np.random.Generator
            ) -> tuple[str, str, StateVector]:
    """Alice's reveal step: (actual label, claimed label, qubit in Bob's hands)."""
    if isinstance(strategy, CustomUnitaryCheat):
        moved = np.kron(strategy.s.matrix, _I2) @ phi.amplitudes
        phi = StateVector(moved / np.linalg.norm(moved), (2, 2))
    k, post = measure_projective(phi, _COMPUTATIONAL, 0, rng)
    received = StateVector.normalized(post.coefficient_matrix()[k])
    if isinstance(strategy, Honest):
        actual = LABELS_FOR_BIT[strategy.bit][k]
        return actual, actual, received
    if isinstance(strategy, FlipAtReveal):
        return LABELS_FOR_BIT[0][k], LABELS_FOR_BIT[1][int(rng.integers(2))], received
    if isinstance(strategy, CustomUnitaryCheat):
        return "S", LABELS_FOR_BIT[1][k], received
    raise TypeError(f"unknown strategy {strategy!r}")


def committed_and_claimed(strategy: Strategy) -> tuple[int, int]:
    if isinstance(strategy, Honest):
        if strategy.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {strategy.bit!r}")
        return strategy.bit, strategy.bit
    return 0, 1


def run_round(strategy: Strategy, rng: np.random.Generator) -> RoundRecord:
    committed, _ = committed_and_claimed(strategy)
    prep = ttp_prepare_round(rng)
    phi = alice_commit(committed, prep.alice_state)
    # sustaining phase: no operation on any register
    actual, claimed, received = _reveal(strategy, phi, rng)
    accepted, bob_outcome = bob_verify_round(claimed, received, prep.ttp_basis, prep.ttp_outcome, rng)
    return RoundRecord(prep.ttp_basis, prep.ttp_outcome, prep.alice_state, actual, claimed,
                       bob_outcome, accepted)


def run_protocol(n_rounds: int, strategy: Strategy, rng: np.random.Generator,
                 stop_on_reject: bool = False) -> ProtocolTranscript:
    """Run all four phases for ``n_rounds`` rounds.

    Every round gets its own child stream (``rng.spawn``), so round ``i`` sees
    the same randomness whether or not earlier rounds were simulated.  With
    ``stop_on_reject`` the run ends at the first rejected round; the verdict is
    unchanged, only the transcript is shorter.
    """
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    committed, claimed = committed_and_claimed(strategy)
    rounds = []
    for child in rng.spawn(n_rounds):
        rec = run_round(strategy, child)
        rounds.append(rec)
        if stop_on_reject and not rec.accepted:
            break
    verdict = ACCEPT if len(rounds) == n_rounds and all(r.accepted for r in rounds) else REJECT
    return ProtocolTranscript(rounds, committed, claimed, verdict)


# --------------------------------------------------------------------------
# Bob's view and the variant without a TTP


def bob_commit_view(b: int, psi: StateVector) -> DensityOperator:
    """Bob's state of the commitment qubit before the reveal, given ``|psi>``."""
    return reduced_state(alice_commit(b, psi), keep=1)


def no_ttp_views(psi: StateVector) -> tuple[DensityOperator, DensityOperator]:
    """Bob's views for both bits when he knows ``|psi>`` (he played the TTP)."""
    return bob_commit_view(0, psi), bob_commit_view(1, psi)


@dataclass(frozen=True)
class NoTTPAttack:
    report: AttackReport
    linear_fit: np.ndarray  # [[a, b], [c, d]] with J ~ aM + bN, K ~ cM + dN
    fit_residuals: tuple[float, float]  # Frobenius residuals for J and K


def fit_linear_cheat() -> tuple[np.ndarray, tuple[float, float]]:
    """Least-squares ``J ~ aM + bN`` and ``K ~ cM + dN`` over complex coefficients."""
    basis = np.stack([OPERATORS.M.matrix.ravel(), OPERATORS.N.matrix.ravel()], axis=1)
    rows, residuals = [], []
    for target in (OPERATORS.J.matrix, OPERATORS.K.matrix):
        coef, *_ = np.linalg.lstsq(basis, target.ravel(), rcond=None)
        rows.append(coef)
        residuals.append(float(np.linalg.norm(basis @ coef - target.ravel())))
    return np.array(rows), (residuals[0], residuals[1])


def no_ttp_attack(psi: StateVector) -> NoTTPAttack:
    """Optimal ancilla-side cheat when ``|psi>`` is known to Alice."""
    report = synthesize_uhlmann(alice_commit(0, psi), alice_commit(1, psi))
    fit, residuals = fit_linear_cheat()
    return NoTTPAttack(report, fit, residuals)


def choi_nottp_scheme() -> CommitmentScheme:
    """The no-TTP protocol as a generic scheme.

    Alice's register is (bit, A') with ``|enc_b> = |b> (x) |+>``; Bob's
    register is the commitment qubit, whose initial state plays ``|psi>``.
    ``U_AB`` applies ``P_{b,x}`` to Bob's qubit controlled on bit ``b`` and
    ancilla value ``x``.
    """
    blocks = [OPERATORS[label].matrix for b in (0, 1) for label in LABELS_FOR_BIT[b]]
    u = np.zeros((8, 8), dtype=np.complex128)
    for n, block in enumerate(blocks):
        u[2 * n:2 * n + 2, 2 * n:2 * n + 2] = block
    enc = [StateVector(np.kron(np.eye(2)[b], _PLUS.amplitudes)) for b in (0, 1)]
    return CommitmentScheme(4, 2, UnitaryOperator(u), enc[0], enc[1], None, name="choi-nottp")
