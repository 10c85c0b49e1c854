"""Bipartite density matrices, canonical fixture states and fidelities."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, FixtureError, NormError, ShapeError, StateError

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = -1e-8


def _validate_matrix(mat: np.ndarray, dims: tuple[int, int]) -> None:
    """Raise :class:`StateError` naming the first violated invariant."""
    n = dims[0] * dims[1]
    if mat.shape != (n, n):
        raise StateError(f"shape: matrix is {mat.shape}, dims {dims} require ({n}, {n})")
    if not np.all(np.isfinite(mat)):
        raise StateError("finite: matrix contains NaN or Inf entries")
    herm_err = np.max(np.abs(mat - mat.conj().T))
    if herm_err > HERMITIAN_TOL:
        raise StateError(f"hermitian: max |rho - rho^dag| = {herm_err:.3e} exceeds {HERMITIAN_TOL}")
    tr = np.trace(mat).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise StateError(f"trace: trace is {tr:.12g}, expected 1")
    wmin = np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0]
    if wmin < PSD_TOL:
        raise StateError(f"psd: minimum eigenvalue {wmin:.3e} below {PSD_TOL}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Bipartite state ``rho`` on ``C^{d_A} (x) C^{d_B}``.

    Construction validates Hermiticity, unit trace and positivity; pass
    ``validate=False`` only for intermediate results you check yourself.
    """

    mat: np.ndarray
    dims: tuple[int, int]
    validate: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        mat = np.array(self.mat, dtype=complex)
        dims = tuple(int(x) for x in self.dims)
        if len(dims) != 2:
            raise ShapeError(f"dims must have two entries, got {dims}")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)
        if self.validate:
            _validate_matrix(mat, dims)
        mat.setflags(write=False)

    @property
    def size(self) -> int:
        return self.dims[0] * self.dims[1]

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        return cls(np.outer(psi.vec, psi.vec.conj()), psi.dims)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.mat, self.mat)))

    def conjugate(self, u: np.ndarray) -> "DensityMatrix":
        """``U rho U^dagger`` for a unitary on the full space."""
        out = u @ self.mat @ u.conj().T
        return DensityMatrix((out + out.conj().T) / 2, self.dims)

    def conjugate_local(self, ua: np.ndarray, ub: np.ndarray) -> "DensityMatrix":
        return self.conjugate(np.kron(ua, ub))

    def to_json(self) -> str:
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.mat]
        return json.dumps({"dims": list(self.dims), "matrix": rows})

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StateError(f"json: {exc}") from exc
        if not isinstance(doc, dict) or "dims" not in doc or "matrix" not in doc:
            raise StateError("schema: expected an object with 'dims' and 'matrix'")
        try:
            arr = np.asarray(doc["matrix"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise StateError(f"schema: matrix is not a rectangular array of [re, im] pairs ({exc})") from exc
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise StateError(f"schema: matrix must have shape (n, n, 2), got {arr.shape}")
        dims = doc["dims"]
        if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) and x >= 1 for x in dims)):
            raise StateError(f"schema: dims must be two positive integers, got {dims!r}")
        return cls(arr[..., 0] + 1j * arr[..., 1], tuple(dims))


@dataclass(frozen=True, eq=False)
class PureState:
    vec: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self) -> None:
        vec = np.array(self.vec, dtype=complex).ravel()
        dims = tuple(int(x) for x in self.dims)
        if vec.size != dims[0] * dims[1]:
            raise ShapeError(f"vector length {vec.size} does not match dims {dims}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-9:
            raise NormError(f"pure state must be normalized, norm is {norm:.12g}")
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "dims", dims)

    def projector(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)


def max_entangled(d: int) -> PureState:
    """``(1/sqrt d) sum_i |i>|i>``."""
    if d < 2:
        raise DimensionError(f"maximally entangled state needs d >= 2, got {d}")
    vec = np.zeros(d * d, dtype=complex)
    vec[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return PureState(vec, (d, d))


def bell_minus() -> PureState:
    """``(|00> - |11>)/sqrt 2``."""
    return PureState(np.array([1, 0, 0, -1]) / np.sqrt(2), (2, 2))


def max_mixed(da: int, db: int) -> DensityMatrix:
    n = da * db
    return DensityMatrix(np.eye(n) / n, (da, db))


def isotropic(d: int, alpha: float) -> DensityMatrix:
    """Depolarized maximally entangled state ``alpha phi + (1 - alpha) 1/d^2``."""
    lo = -1.0 / (d * d - 1)
    if not lo - 1e-12 <= alpha <= 1 + 1e-12:
        raise FixtureError(f"alpha={alpha} outside [{lo:.6g}, 1] for d={d}")
    phi = max_entangled(d).vec
    mat = alpha * np.outer(phi, phi.conj()) + (1 - alpha) * np.eye(d * d) / d**2
    return DensityMatrix(mat, (d, d))


def classical_quantum() -> DensityMatrix:
    """Two-qutrit separable state ``(1/3) sum_i |i><i| (x) |chi_i><chi_i|``."""
    chis = np.array([[1, 1, -1], [1, -1, 1], [-1, 1, 1]]) / np.sqrt(3)
    mat = np.zeros((9, 9), dtype=complex)
    for i, chi in enumerate(chis):
        e = np.zeros(3)
        e[i] = 1
        mat += np.kron(np.outer(e, e), np.outer(chi, chi))
    return DensityMatrix(mat / 3, (3, 3))


def horodecki_ppt(a: float) -> DensityMatrix:
    """Horodecki two-qutrit family, entangled with positive partial transpose for 0 < a < 1."""
    if not 0 < a < 1:
        raise FixtureError(f"horodecki_ppt requires 0 < a < 1, got {a}")
    m = np.zeros((9, 9))
    for i in (0, 4, 8):
        for j in (0, 4, 8):
            m[i, j] = a
    for i in (1, 2, 3, 5, 7):
        m[i, i] = a
    c = np.sqrt(1 - a * a) / 2
    m[6, 6] = m[8, 8] = (1 + a) / 2
    m[6, 8] = m[8, 6] = c
    return DensityMatrix(m / (8 * a + 1), (3, 3))


def canonical_state(name: str, params: Sequence[float] = ()) -> DensityMatrix:
    """Named fixture state.

    ``"cq"``, ``"horodecki_ppt"`` with ``[a]``, ``"isotropic"`` with
    ``[d, alpha]`` and ``"max_mixed"`` with ``[d_A, d_B]``.
    """
    params = list(params)
    try:
        if name == "cq":
            return classical_quantum()
        if name == "horodecki_ppt":
            (a,) = params
            return horodecki_ppt(float(a))
        if name == "isotropic":
            d, alpha = params
            if int(d) != d or d < 2:
                raise FixtureError(f"isotropic needs integer d >= 2, got {d}")
            return isotropic(int(d), float(alpha))
        if name == "max_mixed":
            da, db = params
            return max_mixed(int(da), int(db))
    except ValueError as exc:
        raise FixtureError(f"bad parameters {params} for fixture {name!r}: {exc}") from exc
    raise FixtureError(f"unknown fixture state {name!r}")


def fidelity_with_pure(rho: DensityMatrix, phi: PureState) -> float:
    """``<phi|rho|phi>`` clipped to ``[0, 1]``."""
    if tuple(rho.dims) != tuple(phi.dims):
        raise ShapeError(f"dims differ: state {rho.dims}, vector {phi.dims}")
    f = np.vdot(phi.vec, rho.mat @ phi.vec).real
    return float(np.clip(f, 0.0, 1.0))


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random state from a complex Ginibre matrix (Hilbert-Schmidt measure at full rank)."""
    n = int(dims[0]) * int(dims[1])
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    mat = g @ g.conj().T
    return DensityMatrix(mat / np.trace(mat).real, tuple(dims))
