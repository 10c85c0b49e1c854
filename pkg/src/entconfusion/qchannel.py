"""Quantum channels: joint and local depolarizing, generalized amplitude damping.

Channels are either explicit Kraus sets (:class:`KrausChannel`) or the affine
depolarizing map (:class:`DepolarizingSpec`), which never needs a Kraus set at
the dimensions used here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ChannelError, DimensionError, DomainError, ShapeError
from .numkernel import partial_trace
from .qstate import DensityMatrix

COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map ``rho -> sum_i K_i rho K_i^dagger``."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ChannelError("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape or k.ndim != 2 for k in ops):
            raise ShapeError("all Kraus operators must share one 2-D shape")
        total = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(total - np.eye(shape[1])))
        if err > COMPLETENESS_TOL:
            raise ChannelError(f"Kraus operators are not trace preserving (completeness error {err:.3e})")
        object.__setattr__(self, "kraus", ops)

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        out = sum(k @ mat @ k.conj().T for k in self.kraus)
        return (out + out.conj().T) / 2

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.size != self.in_dim:
            raise ShapeError(f"channel acts on dimension {self.in_dim}, state has {rho.size}")
        if self.out_dim != self.in_dim:
            raise ShapeError("only dimension-preserving channels act on bipartite states")
        return DensityMatrix(self.apply_matrix(rho.mat), rho.dims)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Composition: apply ``self`` first, then ``other``."""
        return KrausChannel(tuple(b @ a for b in other.kraus for a in self.kraus))


@dataclass(frozen=True)
class DepolarizingSpec:
    """Depolarizing parameter ``alpha`` in ``[-1/(d^2 - 1), 1]``.

    Used as a single-qudit channel inside :func:`apply_local` (acting on a
    ``d``-dimensional factor) and by :func:`depolarize_joint`, where ``d`` is
    the dimension of each of the two particles.
    """

    d: int
    alpha: float

    def __post_init__(self) -> None:
        if self.d < 2:
            raise DimensionError(f"depolarizing channel needs d >= 2, got {self.d}")
        lo = -1.0 / (self.d**2 - 1)
        if not lo - 1e-12 <= self.alpha <= 1 + 1e-12:
            raise DomainError(f"alpha={self.alpha} outside [{lo:.6g}, 1] for d={self.d}")


@dataclass(frozen=True)
class GenAmpDampSpec:
    l: float
    p: float

    def __post_init__(self) -> None:
        for name in ("l", "p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name}={v} outside [0, 1]")


LocalChannel = Union[KrausChannel, DepolarizingSpec, None]


def depolarize_joint(rho: DensityMatrix, spec: DepolarizingSpec) -> DensityMatrix:
    """Joint depolarizing of a ``d (x) d`` state; ``spec.d`` is the local dimension."""
    da, db = rho.dims
    if not (da == db == spec.d):
        raise ShapeError(f"joint depolarizing with d={spec.d} needs dims ({spec.d}, {spec.d}), got {rho.dims}")
    n = rho.size
    mat = spec.alpha * rho.mat + (1 - spec.alpha) * np.trace(rho.mat).real * np.eye(n) / n
    return DensityMatrix(mat, rho.dims)


def gen_amp_damp(spec: GenAmpDampSpec) -> KrausChannel:
    """Single-qubit generalized amplitude damping with mixing ``l`` and damping ``p``."""
    l, p = spec.l, spec.p
    a1 = np.sqrt(l) * np.array([[1, 0], [0, np.sqrt(1 - p)]])
    a2 = np.sqrt(l) * np.array([[0, np.sqrt(p)], [0, 0]])
    a3 = np.sqrt(1 - l) * np.array([[np.sqrt(1 - p), 0], [0, 1]])
    a4 = np.sqrt(1 - l) * np.array([[0, 0], [np.sqrt(p), 0]])
    return KrausChannel((a1, a2, a3, a4))


def _apply_on(mat: np.ndarray, dims: tuple[int, int], chan: LocalChannel, side: str) -> np.ndarray:
    da, db = dims
    d_sub = da if side == "A" else db
    if chan is None:
        return mat
    if isinstance(chan, DepolarizingSpec):
        if chan.d != d_sub:
            raise ShapeError(f"depolarizing channel for d={chan.d} applied to subsystem of dimension {d_sub}")
        a = chan.alpha
        if side == "A":
            rest = np.kron(np.eye(da) / da, partial_trace(mat, dims, keep="B"))
        else:
            rest = np.kron(partial_trace(mat, dims, keep="A"), np.eye(db) / db)
        return a * mat + (1 - a) * rest
    if isinstance(chan, KrausChannel):
        if chan.in_dim != d_sub or chan.out_dim != d_sub:
            raise ShapeError(f"channel on dimension {chan.in_dim} applied to subsystem of dimension {d_sub}")
        eye = np.eye(db if side == "A" else da)
        ops = [np.kron(k, eye) if side == "A" else np.kron(eye, k) for k in chan.kraus]
        return sum(k @ mat @ k.conj().T for k in ops)
    raise TypeError(f"unsupported local channel {chan!r}")


def apply_local(rho: DensityMatrix, chan_a: LocalChannel = None, chan_b: LocalChannel = None) -> DensityMatrix:
    """``(chan_a (x) chan_b)[rho]``; ``None`` stands for the identity channel."""
    mat = _apply_on(rho.mat, rho.dims, chan_a, "A")
    mat = _apply_on(mat, rho.dims, chan_b, "B")
    return DensityMatrix((mat + mat.conj().T) / 2, rho.dims)


def alpha_crit(d: int) -> float:
    """Depolarizing parameter below which ``Phi_alpha (x) phi_+`` is separable."""
    if d < 2:
        raise DimensionError(f"alpha_crit needs d >= 2, got {d}")
    return 1.0 / (d + 1)


_PAULIS = (
    np.eye(2),
    np.array([[0, 1], [1, 0]]),
    np.array([[0, -1j], [1j, 0]]),
    np.diag([1.0, -1.0]),
)


def pauli_depolarizing_two_qubit(alpha: float) -> KrausChannel:
    """Kraus form of the joint two-qubit depolarizing map."""
    if not -1 / 15 - 1e-12 <= alpha <= 1 + 1e-12:
        raise DomainError(f"alpha={alpha} outside [-1/15, 1]")
    ops = []
    for i, pa in enumerate(_PAULIS):
        for j, pb in enumerate(_PAULIS):
            w = (1 - alpha) / 16 + (alpha if i == j == 0 else 0.0)
            if w > 0:
                ops.append(np.sqrt(w) * np.kron(pa, pb))
    return KrausChannel(tuple(ops))


def bell_dephasing(q: float, white: float = 0.0) -> KrausChannel:
    """Two-qubit noise that flips ``phi_+ <-> phi_-`` with probability ``q``.

    ``white`` adds joint depolarizing with parameter ``1 - white`` after the
    phase flip.  Pure dephasing only drives the concurrence to zero
    asymptotically; any ``white > 0`` gives a finite zero crossing.
    """
    if not 0 <= q <= 1:
        raise DomainError(f"q={q} outside [0, 1]")
    flip = KrausChannel((np.sqrt(1 - q) * np.eye(4), np.sqrt(q) * np.kron(_PAULIS[3], np.eye(2))))
    if white == 0:
        return flip
    return flip.then(pauli_depolarizing_two_qubit(1 - white))


def bell_dephasing_concurrence(n: float, q: float, white: float) -> float:
    """Closed-form concurrence of ``bell_dephasing(q, white)^n [phi_+]``.

    The output is Bell diagonal with largest weight
    ``a (1 + c)/2 + (1 - a)/4``, ``a = (1 - white)^n``, ``c = (1 - 2q)^n``.
    """
    a = (1 - white) ** n
    c = (1 - 2 * q) ** n
    return max(0.0, a * (0.5 + c) - 0.5)


def bell_dephasing_zero(q: float, white: float) -> float:
    """Continuous step count where :func:`bell_dephasing_concurrence` reaches 0."""
    from scipy.optimize import brentq

    if white <= 0:
        return float("inf")
    f = lambda n: (1 - white) ** n * (0.5 + (1 - 2 * q) ** n) - 0.5
    hi = 1.0
    while f(hi) > 0:
        hi *= 2
    return float(brentq(f, 0.0, hi, xtol=1e-12))


def channel_to_json(spec: Union[DepolarizingSpec, GenAmpDampSpec]) -> str:
    if isinstance(spec, DepolarizingSpec):
        return json.dumps({"kind": "depolarizing", "d": spec.d, "alpha": spec.alpha})
    if isinstance(spec, GenAmpDampSpec):
        return json.dumps({"kind": "gad", "l": spec.l, "p": spec.p})
    raise TypeError(f"cannot serialize {spec!r}")


def channel_from_json(text: str) -> Union[DepolarizingSpec, GenAmpDampSpec]:
    doc = json.loads(text)
    kind = doc.get("kind")
    if kind == "depolarizing":
        return DepolarizingSpec(int(doc["d"]), float(doc["alpha"]))
    if kind == "gad":
        return GenAmpDampSpec(float(doc["l"]), float(doc["p"]))
    raise DomainError(f"unknown channel kind {kind!r}")


def repeat(chan: KrausChannel, rho: DensityMatrix, n: int) -> DensityMatrix:
    mat = rho.mat
    for _ in range(n):
        mat = chan.apply_matrix(mat)
    return DensityMatrix(mat, rho.dims)

