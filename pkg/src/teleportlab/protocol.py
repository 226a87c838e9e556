"""General resource protocols and their Choi-level control-map form.

A resource protocol consists of a shared pure ancilla pair with Schmidt
vector mu (local dimension P on each side), M sender branch operators on
A (x) a, each stored as projection times unitary, and M receiver unitaries
on B (x) b chosen by the transmitted outcome index.  Determinism requires
the branch family to resolve the identity in both operator orders and every
receiver operator to be unitary.

Index conventions, fixed once here and relied on everywhere:

* composite index on A (x) a is row-major, (r, i) -> r*P + i;
* sender blocks a[eta, i, j] are the N x N operators <i|_a L_eta |j>_a,
  receiver blocks b[eta, k, l] are <k|_b W_eta |l>_b, both in the Schmidt
  bases of the resource;
* the control operators carry the receiver block on the output factor and
  the transposed sender block on the input factor, with both ancilla
  indices running over 0..P-1 (the Schmidt index range).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channels import ChoiMatrix, KrausChannel, apply_on_factor, choi
from .qmath import (
    dagger,
    embed_operator,
    haar_unitary,
    matrix_from_pairs,
    matrix_to_pairs,
    maximally_entangled,
    partial_trace,
    projector,
)
from .teleport import bell_state, correction_unitary


@dataclass(frozen=True)
class AncillaResource:
    """Schmidt coefficients of the shared pure ancilla pair."""

    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        object.__setattr__(self, "mu", mu)
        if np.any(mu < 0):
            raise ValueError("Schmidt coefficients must be non-negative")
        dev = abs(float(np.sum(mu**2)) - 1.0)
        if dev > 1e-10:
            raise ValueError(
                f"squared Schmidt coefficients must sum to 1, deviation {dev:.3e}"
            )

    @property
    def local_dim(self) -> int:
        return int(self.mu.size)

    def state(self) -> np.ndarray:
        """Vector sum_i mu_i |i>|i> on the a (x) b pair."""
        p = self.local_dim
        vec = np.zeros(p * p, dtype=complex)
        vec[:: p + 1] = self.mu
        return vec


@dataclass(frozen=True)
class ResourceProtocol:
    """One round of: sender branch, single channel use, receiver correction."""

    n: int
    resource: AncillaResource
    sender_projections: tuple
    sender_unitaries: tuple
    receiver_unitaries: tuple
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        as_ops = lambda ops: tuple(np.asarray(o, dtype=complex) for o in ops)
        object.__setattr__(self, "sender_projections", as_ops(self.sender_projections))
        object.__setattr__(self, "sender_unitaries", as_ops(self.sender_unitaries))
        object.__setattr__(self, "receiver_unitaries", as_ops(self.receiver_unitaries))
        if not (
            len(self.sender_projections)
            == len(self.sender_unitaries)
            == len(self.receiver_unitaries)
        ):
            raise ValueError("sender and receiver operator counts must match")
        if self.validate:
            self.check_determinism()

    @property
    def m(self) -> int:
        return len(self.sender_projections)

    @property
    def local_dim(self) -> int:
        return self.resource.local_dim

    def sender_ops(self) -> tuple:
        """Branch operators L_eta = Pi_eta U_eta on A (x) a."""
        return tuple(
            p @ u for p, u in zip(self.sender_projections, self.sender_unitaries)
        )

    def check_determinism(self, tol: float = 1e-10) -> float:
        """Validate the determinism invariants; returns the worst residual."""
        d = self.n * self.local_dim
        ops = self.sender_ops()
        for op in ops:
            if op.shape != (d, d):
                raise ValueError(
                    f"sender operator shape {op.shape} does not match A x a dim {d}"
                )
        eye = np.eye(d)
        res_left = float(np.max(np.abs(sum(dagger(o) @ o for o in ops) - eye)))
        res_right = float(np.max(np.abs(sum(o @ dagger(o) for o in ops) - eye)))
        res_recv = 0.0
        for w in self.receiver_unitaries:
            if w.shape != (d, d):
                raise ValueError(
                    f"receiver operator shape {w.shape} does not match B x b dim {d}"
                )
            res_recv = max(res_recv, float(np.max(np.abs(w @ dagger(w) - eye))))
        worst = max(res_left, res_right, res_recv)
        if worst > tol:
            raise ValueError(
                "protocol is not deterministic: "
                f"sum L^dag L residual {res_left:.3e}, "
                f"sum L L^dag residual {res_right:.3e}, "
                f"receiver unitarity residual {res_recv:.3e}"
            )
        return worst


@dataclass(frozen=True)
class BlockOperators:
    """Sender/receiver operator blocks in the resource's Schmidt bases.

    a[eta, i, j] and b[eta, k, l] are N x N matrices; see the module
    docstring for the exact matrix elements they hold.
    """

    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class LambdaOperators:
    """Control operators on the output (x) input space, indexed [eta, k, l]."""

    ops: np.ndarray

    def flat(self) -> np.ndarray:
        """All operators as one (M*P*P, N^2, N^2) stack."""
        m, p, _, d, _ = self.ops.shape
        return self.ops.reshape(m * p * p, d, d)


def apply_protocol(
    proto: ResourceProtocol, ch: KrausChannel, rho: np.ndarray
) -> np.ndarray:
    """Run the protocol around one use of the channel, tracing the ancillas."""
    n, p = proto.n, proto.local_dim
    if ch.dim != n:
        raise ValueError(f"channel dim {ch.dim} does not match protocol dim {n}")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (n, n):
        raise ValueError(f"state shape {rho.shape} does not match protocol dim {n}")

    dims = (n, p, p)
    state = np.kron(rho, projector(proto.resource.state()))
    out = np.zeros((n, n), dtype=complex)
    for branch, recv in zip(proto.sender_ops(), proto.receiver_unitaries):
        full_branch = np.kron(branch, np.eye(p))
        sigma = full_branch @ state @ dagger(full_branch)
        sigma = apply_on_factor(ch, sigma, dims, which=0)
        full_recv = embed_operator(recv, dims, targets=(0, 2))
        sigma = full_recv @ sigma @ dagger(full_recv)
        out += partial_trace(sigma, dims, keep=0)
    return out


def block_operators(proto: ResourceProtocol) -> BlockOperators:
    """Extract the ancilla-indexed blocks of all sender and receiver ops."""
    n, p = proto.n, proto.local_dim
    a = np.stack(
        [op.reshape(n, p, n, p).transpose(1, 3, 0, 2) for op in proto.sender_ops()]
    )
    b = np.stack(
        [w.reshape(n, p, n, p).transpose(1, 3, 0, 2) for w in proto.receiver_unitaries]
    )
    return BlockOperators(a=a, b=b)


def lambda_operators(proto: ResourceProtocol) -> LambdaOperators:
    """Control operators Lambda[eta, k, l] = sum_i mu_i B[k,i] (x) A[l,i]^T."""
    blocks = block_operators(proto)
    mu = proto.resource.mu
    # indices: B[k,i] carries (b_out, b_in), A[l,i]^T carries (a_out, a_in)
    # with A^T[x, y] = A[y, x]; rows (b_out, a_out), cols (b_in, a_in).
    ops = np.einsum("i,ekibc,elida->eklbacd", mu, blocks.b, blocks.a)
    m, p = proto.m, proto.local_dim
    n2 = proto.n * proto.n
    return LambdaOperators(ops=ops.reshape(m, p, p, n2, n2))


def control_map(proto: ResourceProtocol, r: ChoiMatrix) -> ChoiMatrix:
    """Transform a Choi state through the protocol's control operators."""
    n = proto.n
    if r.dim_out != n or r.dim_in != n:
        raise ValueError(
            f"Choi dims {r.dim_out}x{r.dim_in} do not match protocol dim {n}"
        )
    lam = lambda_operators(proto).flat()
    out = np.einsum("jab,bc,jdc->ad", lam, r.matrix, lam.conj())
    return ChoiMatrix.from_matrix(out, dim_out=n, dim_in=n, tol=1e-8)


def effective_choi(proto: ResourceProtocol, ch: KrausChannel) -> ChoiMatrix:
    """Choi state of the end-to-end map, by direct tomography of a basis.

    Independent of the control-operator route: reconstructs the effective
    channel by running the full protocol on every basis matrix element.
    """
    n = proto.n
    out = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[i, j] = 1.0
            out += np.kron(apply_protocol(proto, ch, unit), unit) / n
    return ChoiMatrix.from_matrix(out, dim_out=n, dim_in=n, tol=1e-8)


def residual(proto: ResourceProtocol, ch: KrausChannel) -> float:
    """Frobenius distance of the controlled Choi state from the ideal target."""
    target = projector(maximally_entangled(proto.n))
    out = control_map(proto, choi(ch))
    return float(np.linalg.norm(out.matrix - target))


def target_overlap(proto: ResourceProtocol, r: ChoiMatrix) -> float:
    """Overlap of the controlled Choi state with the ideal target."""
    psi0 = maximally_entangled(proto.n)
    lam = lambda_operators(proto).flat()
    moved = lam.conj().transpose(0, 2, 1) @ psi0
    val = np.einsum("ja,ab,jb->", moved.conj(), r.matrix, moved)
    return float(np.clip(val.real, 0.0, 1.0))


def entanglement_fidelity(proto: ResourceProtocol, ch: KrausChannel) -> float:
    """Overlap of the controlled Choi state with the ideal target; 1 iff faithful."""
    return target_overlap(proto, choi(ch))


def qt_protocol(n: int) -> ResourceProtocol:
    """The teleportation protocol as a resource protocol.

    Sender branches are computational projections after the rotation that
    maps the Bell basis onto the computational basis; receivers are the
    standard outcome corrections.  Physically identical to projecting onto
    the Bell states directly, since the measured system is discarded.
    """
    mu = np.full(n, 1.0 / np.sqrt(n))
    bell_rotation = np.array([bell_state(n, eta).conj() for eta in range(n * n)])
    projections = []
    unitaries = []
    receivers = []
    for eta in range(n * n):
        pr = np.zeros((n * n, n * n), dtype=complex)
        pr[eta, eta] = 1.0
        projections.append(pr)
        unitaries.append(bell_rotation)
        receivers.append(correction_unitary(n, eta))
    return ResourceProtocol(
        n=n,
        resource=AncillaResource(mu=mu),
        sender_projections=tuple(projections),
        sender_unitaries=tuple(unitaries),
        receiver_unitaries=tuple(receivers),
    )


def bare_protocol(n: int, local_dim: int = 1, mu=None) -> ResourceProtocol:
    """Single-branch protocol that just sends the state through the channel."""
    if mu is None:
        mu = np.zeros(local_dim)
        mu[0] = 1.0
    d = n * len(np.atleast_1d(mu))
    eye = np.eye(d, dtype=complex)
    return ResourceProtocol(
        n=n,
        resource=AncillaResource(mu=np.asarray(mu, dtype=float)),
        sender_projections=(eye,),
        sender_unitaries=(eye,),
        receiver_unitaries=(eye,),
    )


def _partition_projections(dim: int, m: int) -> list:
    """Split the computational basis of `dim` into m orthogonal projectors."""
    if not 1 <= m <= dim:
        raise ValueError(f"branch count must lie in 1..{dim}, got {m}")
    bounds = np.linspace(0, dim, m + 1).astype(int)
    projections = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        pr = np.zeros((dim, dim), dtype=complex)
        pr[lo:hi, lo:hi] = np.eye(hi - lo)
        projections.append(pr)
    return projections


def random_protocol(n: int, local_dim: int, m: int, seed) -> ResourceProtocol:
    """Random deterministic protocol: Haar sender rotation followed by a
    complete projective measurement with m outcomes, Haar receivers, and a
    random Schmidt vector.  Deterministic per seed.  Requires m <= N*P.
    """
    rng = np.random.default_rng(seed)
    d = n * local_dim
    mu = np.abs(rng.standard_normal(local_dim))
    mu /= np.linalg.norm(mu)
    sender = haar_unitary(d, rng)
    projections = _partition_projections(d, m)
    receivers = tuple(haar_unitary(d, rng) for _ in range(m))
    return ResourceProtocol(
        n=n,
        resource=AncillaResource(mu=mu),
        sender_projections=tuple(projections),
        sender_unitaries=tuple(sender for _ in range(m)),
        receiver_unitaries=receivers,
    )


def protocol_to_dict(proto: ResourceProtocol) -> dict:
    """JSON-ready form with complex entries as [re, im] pairs."""
    return {
        "N": proto.n,
        "P": proto.local_dim,
        "M": proto.m,
        "mu": [float(x) for x in proto.resource.mu],
        "sender": [
            {"projection": matrix_to_pairs(p), "unitary": matrix_to_pairs(u)}
            for p, u in zip(proto.sender_projections, proto.sender_unitaries)
        ],
        "receiver": [matrix_to_pairs(w) for w in proto.receiver_unitaries],
    }


def protocol_from_dict(data: dict, validate: bool = True) -> ResourceProtocol:
    """Build a protocol from its JSON form, validating determinism by default."""
    required = {"N", "P", "M", "mu", "sender", "receiver"}
    if not isinstance(data, dict) or not required.issubset(data):
        missing = required - set(data) if isinstance(data, dict) else required
        raise ValueError(f"protocol JSON missing keys: {sorted(missing)}")
    mu = np.asarray(data["mu"], dtype=float)
    if mu.size != int(data["P"]):
        raise ValueError(
            f"mu length {mu.size} does not match declared P={data['P']}"
        )
    if len(data["sender"]) != int(data["M"]) or len(data["receiver"]) != int(data["M"]):
        raise ValueError("sender/receiver counts do not match declared M")
    return ResourceProtocol(
        n=int(data["N"]),
        resource=AncillaResource(mu=mu),
        sender_projections=tuple(
            matrix_from_pairs(entry["projection"]) for entry in data["sender"]
        ),
        sender_unitaries=tuple(
            matrix_from_pairs(entry["unitary"]) for entry in data["sender"]
        ),
        receiver_unitaries=tuple(matrix_from_pairs(w) for w in data["receiver"]),
        validate=validate,
    )


def load_protocol(path, validate: bool = True) -> ResourceProtocol:
    """Read a protocol JSON file."""
    with open(path) as fh:
        data = json.load(fh)
    return protocol_from_dict(data, validate=validate)


def save_protocol(proto: ResourceProtocol, path) -> None:
    """Write a protocol to a JSON file."""
    with open(path, "w") as fh:
        json.dump(protocol_to_dict(proto), fh, indent=2)
