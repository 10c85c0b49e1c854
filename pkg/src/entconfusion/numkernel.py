"""Dense complex-matrix numerics used throughout the package.

Everything here is a pure function of its arguments.  Random sampling always
takes an explicit :class:`numpy.random.Generator`; use :func:`derive_rng` to
obtain reproducible per-task streams from a base seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    DomainError,
    NormError,
    ShapeError,
    SymmetryError,
    UnitarityError,
)

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-9
NORM_TOL = 1e-6

Subsystem = str  # "A" or "B"


@dataclass(frozen=True)
class HermitianEig:
    """Eigen-decomposition ``H = V diag(w) V^dagger`` with ascending ``w``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt decomposition ``sum_i h_i |a_i>|b_i>`` of a bipartite vector.

    ``basis_a[:, i]`` and ``basis_b[:, i]`` are the i-th Schmidt vectors.
    """

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        a, b = self.basis_a, self.basis_b
        return np.einsum("i,ai,bi->ab", self.coefficients, a, b).ravel()


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator keyed by ``(seed, *keys)``.

    Streams for distinct key tuples are statistically independent, so parallel
    tasks can each draw from ``derive_rng(seed, task_index)``.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary.

    QR-decomposes a complex Ginibre matrix (real and imaginary parts standard
    normal) and fixes the phases of ``R``'s diagonal so that the result is
    distributed according to the Haar measure rather than QR's convention.
    """
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    phases = diag / np.abs(diag)
    return q * phases


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def _check_bipartite(rho: np.ndarray, dims: Sequence[int]) -> tuple[int, int]:
    da, db = (int(x) for x in dims)
    n = da * db
    if rho.ndim != 2 or rho.shape != (n, n):
        raise ShapeError(f"expected a {n}x{n} matrix for dims {(da, db)}, got shape {rho.shape}")
    return da, db


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Subsystem = "A") -> np.ndarray:
    """Reduced matrix of subsystem ``keep`` ("A" or "B")."""
    da, db = _check_bipartite(rho, dims)
    t = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(rho: np.ndarray, dims: Sequence[int], on: Subsystem = "B") -> np.ndarray:
    """Transpose the indices of subsystem ``on`` ("A" or "B")."""
    da, db = _check_bipartite(rho, dims)
    t = rho.reshape(da, db, da, db)
    if on == "A":
        t = t.transpose(2, 1, 0, 3)
    elif on == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"on must be 'A' or 'B', got {on!r}")
    return t.reshape(da * db, da * db)


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.allclose(h, h.conj().T, rtol=0, atol=tol)


def hermitian_eig(h: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianEig:
    if not is_hermitian(h, tol):
        raise SymmetryError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return HermitianEig(w, v)


_MatrixFunc = Union[str, Callable[[np.ndarray], np.ndarray]]


def hermitian_matrix_function(h: np.ndarray, func: _MatrixFunc, beta: float = 1.0) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    ``func`` is ``"exp"``, ``"log"``, ``"exp_scaled"`` (computes
    ``exp(beta * H)``; pass ``-beta`` for a Gibbs weight) or any vectorized
    callable acting on the eigenvalues.
    ``"log"`` requires a positive definite input.
    """
    eig = hermitian_eig(h)
    w = eig.eigenvalues
    if func == "exp":
        fw = np.exp(w)
    elif func == "exp_scaled":
        fw = np.exp(beta * w)
    elif func == "log":
        if w[0] <= 0:
            raise DomainError(f"log requires a positive definite matrix (min eigenvalue {w[0]:.3e})")
        fw = np.log(w)
    elif callable(func):
        fw = np.asarray(func(w))
    else:
        raise ValueError(f"unknown matrix function {func!r}")
    v = eig.eigenvectors
    out = (v * fw) @ v.conj().T
    return (out + out.conj().T) / 2


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=tol)


def unitary_principal_log(w: np.ndarray) -> np.ndarray:
    """Hermitian ``Ht = i ln W`` on the principal branch, so ``expm(-i Ht) = W``.

    Eigenphases are taken in ``(-pi, pi]``.  A complex Schur form is used
    because it returns an orthonormal eigenbasis even for degenerate spectra.
    """
    if not is_unitary(w):
        raise UnitarityError("matrix is not unitary within tolerance")
    t, z = scipy.linalg.schur(w, output="complex")
    theta = np.angle(np.diag(t))
    theta = np.where(theta <= -np.pi, theta + 2 * np.pi, theta)
    h = -(z * theta) @ z.conj().T
    return (h + h.conj().T) / 2


def schmidt_decompose(v: np.ndarray, dims: Sequence[int]) -> SchmidtForm:
    da, db = (int(x) for x in dims)
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != da * db:
        raise ShapeError(f"vector of length {v.size} does not match dims {(da, db)}")
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise NormError("cannot Schmidt-decompose the zero vector")
    u, s, vh = np.linalg.svd(v.reshape(da, db), full_matrices=False)
    # SVD already gives real nonnegative descending coefficients
    return SchmidtForm(s, u, vh.T)


def _first_column_unitary(x: np.ndarray) -> np.ndarray:
    """Deterministic unitary whose first column is the unit vector ``x``.

    Built from one Householder reflection that swaps ``x`` with
    ``e^{i phi} e_0`` followed by a phase on ``e_0``.
    """
    n = x.size
    phase = np.exp(1j * np.angle(x[0])) if abs(x[0]) > 0 else 1.0
    u = np.zeros(n, dtype=complex)
    u[0] = phase
    w = x - u
    wn = np.vdot(w, w).real
    if wn < 1e-30:
        refl = np.eye(n, dtype=complex)
    else:
        refl = np.eye(n, dtype=complex) - 2.0 * np.outer(w, w.conj()) / wn
    col_phase = np.ones(n, dtype=complex)
    col_phase[0] = phase
    return refl * col_phase


def complete_to_unitary(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Unitary ``W`` with ``W @ src == dst`` for unit vectors of equal length."""
    src = np.asarray(src, dtype=complex).ravel()
    dst = np.asarray(dst, dtype=complex).ravel()
    if src.size != dst.size:
        raise ShapeError(f"vector lengths differ: {src.size} vs {dst.size}")
    for name, vec in (("src", src), ("dst", dst)):
        if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
            raise NormError(f"{name} is not normalized (norm {np.linalg.norm(vec):.6g})")
    return _first_column_unitary(dst) @ _first_column_unitary(src).conj().T


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    """Square root of a PSD matrix; negative round-off eigenvalues clip to 0."""
    return hermitian_matrix_function(h, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    w = np.linalg.eigvalsh((a - b + (a - b).conj().T) / 2)
    return 0.5 * float(np.abs(w).sum())
