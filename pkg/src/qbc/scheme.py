"""Purification-based commitment schemes and Bob's view of them.

A scheme fixes Alice's and Bob's register sizes, the joint dynamics
``U_AB``, Alice's encodings of the two bit values and how Bob's initial
state is chosen.  The committed joint state is

    |phi_b> = U_AB (|enc_b>_A (x) |bob_init>_B)

and everything Bob can learn before the reveal is in ``Tr_A |phi_b><phi_b|``.
A fixed Bob state models a static scheme; a Haar-random one models the
non-static case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import qcore
from .qcore import (
    DensityOperator,
    RejectedInput,
    StateVector,
    UnitaryOperator,
    fidelity,
    haar_random_state,
    reduced_state,
    tensor_product,
    trace_distance,
)

SCHEMA_VERSION = 1
RANDOM_HAAR = "random_haar"
FIXED = "fixed"


@dataclass(frozen=True)
class CommitmentScheme:
    d_A: int
    d_B: int
    U_AB: UnitaryOperator
    encode0: StateVector
    encode1: StateVector
    bob_state: StateVector | None = None  # None -> Haar-random Bob state
    name: str = ""

    def __post_init__(self):
        if self.U_AB.dim != self.d_A * self.d_B:
            raise RejectedInput(f"U_AB has dimension {self.U_AB.dim}, expected {self.d_A}*{self.d_B}")
        for b, enc in ((0, self.encode0), (1, self.encode1)):
            if enc.dim != self.d_A:
                raise RejectedInput(f"encode{b} has dimension {enc.dim}, expected d_A={self.d_A}")
        if self.bob_state is not None and self.bob_state.dim != self.d_B:
            raise RejectedInput(f"fixed Bob state has dimension {self.bob_state.dim}, expected {self.d_B}")

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_A, self.d_B)

    @property
    def bob_policy(self) -> str:
        return RANDOM_HAAR if self.bob_state is None else FIXED

    def encoding(self, b: int) -> StateVector:
        if b not in (0, 1):
            raise RejectedInput(f"bit must be 0 or 1, got {b!r}")
        return self.encode0 if b == 0 else self.encode1

    def amplitude_tensor(self) -> np.ndarray:
        """``a[i, j, k, l] = <ij|U_AB|kl>``."""
        d_A, d_B = self.dims
        return self.U_AB.matrix.reshape(d_A, d_B, d_A, d_B)

    def draw_bob_state(self, rng: np.random.Generator | None = None) -> StateVector:
        """Bob's initial state under the scheme's policy."""
        if self.bob_state is not None:
            return self.bob_state
        if rng is None:
            raise RejectedInput("a random-Bob scheme needs an rng to draw Bob's state")
        return haar_random_state(self.d_B, rng)


@dataclass(frozen=True)
class ConcealmentReport:
    fidelity: float
    trace_distance: float
    bob_state_used: StateVector

    @property
    def delta(self) -> float:
        return 1.0 - self.fidelity


@dataclass(frozen=True)
class ConcealmentProfile:
    """Concealment against an unknown Bob state, summarized over draws."""
    fidelities: np.ndarray
    trace_distances: np.ndarray

    @property
    def samples(self) -> int:
        return self.fidelities.size

    def summary(self) -> dict[str, Any]:
        f, d = self.fidelities, self.trace_distances
        return {
            "samples": int(f.size),
            "fidelity": {"min": float(f.min()), "mean": float(f.mean()), "max": float(f.max())},
            "trace_distance": {"min": float(d.min()), "mean": float(d.mean()), "max": float(d.max())},
        }


def _check_bob(scheme: CommitmentScheme, bob_init: StateVector) -> None:
    if bob_init.dim != scheme.d_B:
        raise RejectedInput(f"Bob state has dimension {bob_init.dim}, expected d_B={scheme.d_B}")


def commit_state(scheme: CommitmentScheme, b: int, bob_init: StateVector) -> StateVector:
    _check_bob(scheme, bob_init)
    start = tensor_product(scheme.encoding(b), StateVector(bob_init.amplitudes))
    out = scheme.U_AB.matrix @ start.amplitudes
    return StateVector(out / np.linalg.norm(out), scheme.dims)


def bob_reduced(scheme: CommitmentScheme, b: int, bob_init: StateVector) -> DensityOperator:
    return reduced_state(commit_state(scheme, b, bob_init), keep=1)


def concealment(scheme: CommitmentScheme, bob_init: StateVector) -> ConcealmentReport:
    rho0 = bob_reduced(scheme, 0, bob_init)
    rho1 = bob_reduced(scheme, 1, bob_init)
    return ConcealmentReport(fidelity(rho0, rho1), trace_distance(rho0, rho1), bob_init)


def concealment_profile(scheme: CommitmentScheme, n_samples: int, rng: np.random.Generator
                        ) -> ConcealmentProfile:
    """Concealment over ``n_samples`` Bob states drawn from the scheme's policy.

    A fixed-policy scheme yields ``n_samples`` identical entries.  Worst case
    and average are both reported because neither is privileged.
    """
    if n_samples < 1:
        raise RejectedInput("n_samples must be >= 1")
    reports = [concealment(scheme, scheme.draw_bob_state(rng)) for _ in range(n_samples)]
    return ConcealmentProfile(
        np.array([r.fidelity for r in reports]),
        np.array([r.trace_distance for r in reports]),
    )


# --------------------------------------------------------------------------
# scheme documents


def encode_complex(values) -> list:
    """Nested ``[re, im]`` pairs, row-major."""
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [encode_complex(v) for v in arr]


def decode_complex(data, ndim: int, what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise RejectedInput(f"{what}: entries must be [re, im] number pairs ({exc})") from None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise RejectedInput(f"{what}: expected a {ndim}-d array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def scheme_to_dict(scheme: CommitmentScheme) -> dict[str, Any]:
    policy: dict[str, Any] = {"kind": scheme.bob_policy}
    if scheme.bob_state is not None:
        policy["state"] = encode_complex(scheme.bob_state.amplitudes)
    return {
        "schema_version": SCHEMA_VERSION,
        "name": scheme.name,
        "d_A": scheme.d_A,
        "d_B": scheme.d_B,
        "U_AB": encode_complex(scheme.U_AB.matrix),
        "encode0": encode_complex(scheme.encode0.amplitudes),
        "encode1": encode_complex(scheme.encode1.amplitudes),
        "bob_policy": policy,
    }


def scheme_from_dict(doc: dict[str, Any]) -> CommitmentScheme:
    """Parse a scheme document; any violated invariant raises ``RejectedInput``."""
    if not isinstance(doc, dict):
        raise RejectedInput("scheme document must be a JSON object")
    missing = [k for k in ("schema_version", "d_A", "d_B", "U_AB", "encode0", "encode1", "bob_policy")
               if k not in doc]
    if missing:
        raise RejectedInput(f"scheme document missing fields: {', '.join(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise RejectedInput(f"unsupported schema_version {doc['schema_version']!r}")
    d_A, d_B = doc["d_A"], doc["d_B"]
    if not all(isinstance(d, int) and 1 <= d <= qcore.MAX_SUBSYSTEM_DIM for d in (d_A, d_B)):
        raise RejectedInput(f"d_A, d_B must be integers in [1, {qcore.MAX_SUBSYSTEM_DIM}]")
    U = UnitaryOperator(decode_complex(doc["U_AB"], 2, "U_AB"))
    enc0 = StateVector(decode_complex(doc["encode0"], 1, "encode0"))
    enc1 = StateVector(decode_complex(doc["encode1"], 1, "encode1"))
    policy = doc["bob_policy"]
    kind = policy.get("kind") if isinstance(policy, dict) else None
    if kind == FIXED:
        bob = StateVector(decode_complex(policy.get("state"), 1, "bob_policy.state"))
    elif kind == RANDOM_HAAR:
        bob = None
    else:
        raise RejectedInput(f"bob_policy.kind must be {FIXED!r} or {RANDOM_HAAR!r}, got {kind!r}")
    return CommitmentScheme(d_A, d_B, U, enc0, enc1, bob, name=str(doc.get("name", "")))


def dumps_scheme(scheme: CommitmentScheme) -> str:
    """JSON text with one matrix row per line."""
    doc = scheme_to_dict(scheme)
    lines = []
    for key, value in doc.items():
        if key == "U_AB":
            rows = ",\n    ".join(json.dumps(row) for row in value)
            lines.append(f'  "U_AB": [\n    {rows}\n  ]')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(lines) + "\n}"


def loads_scheme(text: str) -> CommitmentScheme:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RejectedInput(f"scheme file is not valid JSON: {exc}") from None
    return scheme_from_dict(doc)
