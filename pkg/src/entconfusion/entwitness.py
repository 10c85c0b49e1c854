"""Analytic entanglement oracles: Wootters concurrence and the PPT criterion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .numkernel import partial_transpose, psd_sqrt
from .qstate import DensityMatrix

PPT_TOL = -1e-8

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class ConcurrenceReport:
    value: float
    nu: np.ndarray  # decreasing


@dataclass(frozen=True)
class PptReport:
    min_eigenvalue: float
    negativity: float
    is_ppt: bool


def _require_two_qubits(rho: DensityMatrix) -> None:
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"concurrence is defined here for two qubits only, got dims {rho.dims}")


def _report(nu: np.ndarray) -> ConcurrenceReport:
    nu = np.sort(np.clip(nu, 0.0, None))[::-1]
    return ConcurrenceReport(float(max(0.0, nu[0] - nu[1:].sum())), nu)


def concurrence(rho: DensityMatrix) -> ConcurrenceReport:
    """Wootters concurrence of a two-qubit state.

    The spin-flip spectrum is obtained as the singular values of
    ``A^T (sigma_y (x) sigma_y) A`` with ``rho = A A^dagger``.  These coincide
    with the eigenvalues of ``sqrt(sqrt(rho) rho_tilde sqrt(rho))`` but avoid
    taking square roots of round-off noise, so pure states come out exact.
    """
    _require_two_qubits(rho)
    w, v = np.linalg.eigh(rho.mat)
    a = v * np.sqrt(np.clip(w, 0.0, None))
    tau = a.T @ _YY @ a
    return _report(np.linalg.svd(tau, compute_uv=False))


def concurrence_sqrt_form(rho: DensityMatrix) -> ConcurrenceReport:
    """Same quantity through the nested square roots ``R = sqrt(sqrt(rho) rho~ sqrt(rho))``."""
    _require_two_qubits(rho)
    s = psd_sqrt(rho.mat)
    flipped = _YY @ rho.mat.conj() @ _YY
    m = s @ flipped @ s
    r = psd_sqrt((m + m.conj().T) / 2)
    return _report(np.linalg.eigvalsh(r))


def ppt_check(rho: DensityMatrix) -> PptReport:
    """Spectrum of the partial transpose on B.

    ``is_ppt=False`` certifies entanglement in any dimension; ``is_ppt=True``
    certifies separability only when ``d_A d_B <= 6``.
    """
    pt = partial_transpose(rho.mat, rho.dims, on="B")
    w = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    neg = float(np.clip(-w[w < 0].sum(), 0.0, None))
    return PptReport(float(w[0]), neg, bool(w[0] >= PPT_TOL))


def negativity(rho: DensityMatrix) -> float:
    return ppt_check(rho).negativity


def is_entangled(rho: DensityMatrix, tol: float = 1e-9) -> bool | None:
    """Oracle verdict: ``True``/``False`` when decidable by PPT, ``None`` otherwise."""
    rep = ppt_check(rho)
    if rep.negativity > tol:
        return True
    if rho.dims[0] * rho.dims[1] <= 6:
        return False
    return None
