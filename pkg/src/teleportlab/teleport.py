"""Standard N-level teleportation: Bell basis, corrections, end-to-end map.

System layout during the protocol: the global state lives on A (x) a (x) b,
where A carries the input, a and b the shared pair.  The noisy channel acts
on the A factor only (it is the physical system that would traverse the
channel); the correction unitary then acts on channel-output (x) b, and
finishes with a swap so the result appears on the channel-output factor
before the ancillas are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, apply_on_factor
from .qmath import (
    assert_pure_state,
    dagger,
    embed_operator,
    maximally_entangled,
    partial_trace,
    projector,
    swap_matrix,
)


@dataclass(frozen=True)
class BellBasis:
    """The N^2 maximally entangled basis states on an N (x) N space.

    Index convention: eta = n*N + m, where n sets the phase gradient and m
    the cyclic shift between the two factors.
    """

    dim: int
    states: tuple

    @property
    def projectors(self) -> tuple:
        return tuple(projector(v) for v in self.states)


def bell_state(n: int, eta: int) -> np.ndarray:
    """Vector (1/sqrt(N)) sum_k exp(2 pi i k n_/N) |k>|(k+m) mod N>."""
    phase_idx, shift = divmod(eta, n)
    vec = np.zeros(n * n, dtype=complex)
    for k in range(n):
        vec[k * n + (k + shift) % n] = np.exp(2j * np.pi * k * phase_idx / n)
    return vec / np.sqrt(n)


def bell_basis(n: int) -> BellBasis:
    """Complete orthonormal Bell basis for local dimension n >= 2."""
    if n < 2:
        raise ValueError(f"local dimension must be >= 2, got {n}")
    return BellBasis(dim=n, states=tuple(bell_state(n, eta) for eta in range(n * n)))


def correction_unitary(n: int, eta: int) -> np.ndarray:
    """Outcome-conditioned correction on output (x) b, swap included.

    The b-side factor undoes the phase/shift of Bell outcome eta; the swap
    then moves the recovered state onto the channel-output factor so the
    ancillas can be discarded.
    """
    if not 0 <= eta < n * n:
        raise ValueError(f"outcome index must lie in 0..{n * n - 1}, got {eta}")
    phase_idx, shift = divmod(eta, n)
    undo = np.zeros((n, n), dtype=complex)
    for k in range(n):
        undo[k, (k + shift) % n] = np.exp(2j * np.pi * k * phase_idx / n)
    return swap_matrix(n, n) @ np.kron(np.eye(n), undo)


def _run(rho: np.ndarray, ch: KrausChannel, resource: np.ndarray):
    n = ch.dim
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (n, n):
        raise ValueError(f"state shape {rho.shape} does not match channel dim {n}")
    resource = np.asarray(resource, dtype=complex).reshape(-1)
    if resource.size != n * n:
        raise ValueError(
            f"resource dim {resource.size} is not bipartite with local dim {n}"
        )
    assert_pure_state(resource, tol=1e-10)

    dims = (n, n, n)
    state = np.kron(rho, projector(resource))
    bell_projectors = bell_basis(n).projectors
    out = np.zeros((n, n), dtype=complex)
    probs = []
    for eta in range(n * n):
        proj = np.kron(bell_projectors[eta], np.eye(n))
        branch = proj @ state @ proj
        branch = apply_on_factor(ch, branch, dims, which=0)
        corr = embed_operator(correction_unitary(n, eta), dims, targets=(0, 2))
        branch = corr @ branch @ dagger(corr)
        probs.append(float(np.trace(branch).real))
        out += partial_trace(branch, dims, keep=0)
    return out, np.array(probs)


def teleport(rho: np.ndarray, ch: KrausChannel) -> np.ndarray:
    """Teleport rho using a maximally entangled pair; output equals rho."""
    out, _ = _run(rho, ch, maximally_entangled(ch.dim))
    return out


def teleport_with_resource(
    rho: np.ndarray, ch: KrausChannel, resource: np.ndarray
) -> np.ndarray:
    """Run the standard protocol with an arbitrary pure entangled resource."""
    out, _ = _run(rho, ch, resource)
    return out


def teleport_detailed(
    rho: np.ndarray, ch: KrausChannel, resource: np.ndarray | None = None
):
    """Teleport and also report the Bell-outcome branch probabilities."""
    if resource is None:
        resource = maximally_entangled(ch.dim)
    return _run(rho, ch, resource)
