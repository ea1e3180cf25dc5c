"""Constructors for named and randomly generated commitment schemes.

The named schemes are also shipped as JSON documents under ``schemes/`` and
are loaded through the same parser as user files (``load_builtin``).
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .choi import choi_nottp_scheme
from .qcore import RejectedInput, StateVector, UnitaryOperator, haar_random_state, haar_random_unitary
from .scheme import CommitmentScheme, dumps_scheme, loads_scheme

BUILTIN_NAMES = ("phase", "choi-nottp", "product", "bobcopy")

# fixed two-qubit unitary used as Bob-side dynamics in the built-ins
BOB_ROTATION = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2.0)


def dft(d: int) -> np.ndarray:
    x = np.arange(d)
    return np.exp(2j * np.pi * np.outer(x, x) / d) / np.sqrt(d)


def controlled_on_alice(bob_unitaries) -> np.ndarray:
    """``sum_x |x><x| (x) W_x``."""
    d_A = len(bob_unitaries)
    d_B = np.asarray(bob_unitaries[0]).shape[0]
    u = np.zeros((d_A * d_B, d_A * d_B), dtype=np.complex128)
    for x, w in enumerate(bob_unitaries):
        u[x * d_B:(x + 1) * d_B, x * d_B:(x + 1) * d_B] = w
    return u


def phase_scheme(bob_unitaries=None, d_A: int = 2, name: str = "phase") -> CommitmentScheme:
    """``U_AB = (sum_x |x><x| (x) W_x)(F (x) I)`` with ``F`` the DFT on Alice.

    Column 1 of ``F`` is column 0 times ``omega**x``, so
    ``a[i,j,1,l] = omega**i * a[i,j,0,l]`` and the term-wise concealing
    condition holds exactly for any choice of the ``W_x``.
    """
    if bob_unitaries is None:
        bob_unitaries = [np.eye(2), BOB_ROTATION][:d_A] if d_A <= 2 else None
    if bob_unitaries is None or len(bob_unitaries) != d_A:
        raise RejectedInput(f"need {d_A} Bob-side unitaries")
    d_B = np.asarray(bob_unitaries[0]).shape[0]
    u = controlled_on_alice(bob_unitaries) @ np.kron(dft(d_A), np.eye(d_B))
    return CommitmentScheme(d_A, d_B, UnitaryOperator(u), StateVector.basis(0, d_A),
                            StateVector.basis(1, d_A), None, name=name)


def product_scheme(alice=None, bob=None, name: str = "product") -> CommitmentScheme:
    """``U_AB = V (x) W``: Bob's view never depends on the bit."""
    v = np.eye(2) if alice is None else np.asarray(alice)
    w = BOB_ROTATION if bob is None else np.asarray(bob)
    d_A, d_B = v.shape[0], w.shape[0]
    return CommitmentScheme(d_A, d_B, UnitaryOperator(np.kron(v, w)), StateVector.basis(0, d_A),
                            StateVector.basis(1, d_A), None, name=name)


def bobcopy_scheme() -> CommitmentScheme:
    """Bob register = (control, target); if control is |1> Alice's bit is copied.

    With Bob starting in ``|1>|0>`` his two views are orthogonal.
    """
    u = np.zeros((8, 8))
    for a in range(2):
        for c in range(2):
            for t in range(2):
                u[4 * a + 2 * c + (t ^ (a & c)), 4 * a + 2 * c + t] = 1.0
    return CommitmentScheme(2, 4, UnitaryOperator(u), StateVector.basis(0, 2),
                            StateVector.basis(1, 2), None, name="bobcopy")


def build_builtin(name: str) -> CommitmentScheme:
    if name == "phase":
        return phase_scheme()
    if name == "choi-nottp":
        return choi_nottp_scheme()
    if name == "product":
        return product_scheme()
    if name == "bobcopy":
        return bobcopy_scheme()
    raise RejectedInput(f"unknown built-in scheme {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def builtin_document(name: str) -> str:
    return resources.files("qbc").joinpath("schemes", f"{name}.json").read_text()


def load_builtin(name: str) -> CommitmentScheme:
    if name not in BUILTIN_NAMES:
        raise RejectedInput(f"unknown built-in scheme {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return loads_scheme(builtin_document(name))


def write_builtin_documents(directory) -> None:
    """Regenerate the shipped JSON documents from the constructors."""
    from pathlib import Path

    for name in BUILTIN_NAMES:
        Path(directory, f"{name}.json").write_text(dumps_scheme(build_builtin(name)) + "\n")


# --------------------------------------------------------------------------
# random families


def random_scheme(rng: np.random.Generator, d_A: int = 2, d_B: int = 2) -> CommitmentScheme:
    """Haar-random dynamics with basis encodings; generally not concealing."""
    u = haar_random_unitary(d_A * d_B, rng)
    return CommitmentScheme(d_A, d_B, u, StateVector.basis(0, d_A), StateVector.basis(1, d_A), None,
                            name="random")


def random_concealing_scheme(rng: np.random.Generator, d_A: int = 2, d_B: int = 2,
                             random_encodings: bool = False) -> CommitmentScheme:
    """Random scheme with ``rho_0^B == rho_1^B`` for every Bob input.

    ``U_AB = (T (x) I) C_W (Q (x) I) (I (x) W_pre)`` where ``C_W`` applies a
    Haar ``W_x`` to Bob controlled on Alice's value ``x``, ``T`` is Haar on
    Alice, and ``Q`` maps both encodings to vectors with equal moduli in
    every coordinate.  Bob then sees ``sum_x |Q_x,enc|^2 W_x W_pre rho W_pre^dag W_x^dag``
    whichever bit was committed.

    With ``random_encodings`` the encodings are Haar-random orthonormal
    vectors of Alice's register and ``Q`` is adjusted to send them where the
    basis encodings would go.
    """
    if d_A < 2:
        raise RejectedInput("need d_A >= 2 for two distinct encodings")
    phases = lambda: np.exp(2j * np.pi * rng.random(d_A))  # noqa: E731
    q = np.diag(phases()) @ dft(d_A) @ np.diag(phases())
    t = haar_random_unitary(d_A, rng).matrix
    ws = [haar_random_unitary(d_B, rng).matrix for _ in range(d_A)]
    w_pre = haar_random_unitary(d_B, rng).matrix
    enc = np.eye(d_A, dtype=np.complex128)
    if random_encodings:
        enc = haar_random_unitary(d_A, rng).matrix
        q = q @ enc.conj().T
    u = np.kron(t, np.eye(d_B)) @ controlled_on_alice(ws) @ np.kron(q, np.eye(d_B)) @ np.kron(np.eye(d_A), w_pre)
    return CommitmentScheme(d_A, d_B, UnitaryOperator(u), StateVector(enc[:, 0]), StateVector(enc[:, 1]),
                            None, name="random-concealing")


def random_phase_scheme(rng: np.random.Generator, d_A: int = 2, d_B: int = 2) -> CommitmentScheme:
    """Phase-type scheme with Haar-random Bob-side controlled unitaries."""
    ws = [haar_random_unitary(d_B, rng).matrix for _ in range(d_A)]
    return phase_scheme(ws, d_A=d_A, name="random-phase")


def random_bob_states(rng: np.random.Generator, d_B: int, n: int) -> list[StateVector]:
    return [haar_random_state(d_B, rng) for _ in range(n)]
