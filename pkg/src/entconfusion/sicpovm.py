"""Weyl-Heisenberg SIC-POVMs and the state <-> probability-vector encoding.

A bipartite state ``rho`` is encoded as ``p[i * d_B**2 + j] = Tr[rho E_A^i (x) E_B^j]``
(index of subsystem A major).  The encoding is a linear bijection, so states
are recovered exactly by inverting a fixed ``K x K`` matrix, ``K = d_A^2 d_B^2``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConstructionError, DataError, DimensionError, ShapeError
from .qstate import DensityMatrix

SIC_OVERLAP_TOL = 1e-8
SIC_COMPLETENESS_TOL = 1e-9

# Fiducials for d = 2, 3 are the textbook ones.  The commonly printed real
# vector (sqrt(2 + sqrt 5), 1, 1, 1) / sqrt(5 + sqrt 5) for d = 4 is *not* a
# Weyl-Heisenberg fiducial (overlaps range from 0 to 0.71); the d = 4 entry
# below was obtained by least-squares on the fiducial conditions and polished
# to machine precision.  build_sic re-verifies every fiducial on construction.
_FIDUCIALS = {
    2: np.array([np.sqrt(3 + np.sqrt(3)), np.exp(1j * np.pi / 4) * np.sqrt(3 - np.sqrt(3))]) / np.sqrt(6),
    3: np.array([0, 1, -1]) / np.sqrt(2),
    4: np.array(
        [
            0.40084839132434086 + 0.0j,
            -0.15440391488017483 - 0.12898169793524525j,
            -0.557833840897345 + 0.5017457233224641j,
            -0.311389364453179 + 0.37276402538721903j,
        ]
    ),
}

PRINTED_FIDUCIAL_D4 = np.array([np.sqrt(2 + np.sqrt(5)), 1, 1, 1]) / np.sqrt(5 + np.sqrt(5))


def shift_operator(d: int) -> np.ndarray:
    """``X|j> = |j + 1 mod d>``."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_operator(d: int) -> np.ndarray:
    """``Z|j> = omega^j |j>``, ``omega = exp(2 pi i / d)``."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def displacement(n1: int, n2: int, d: int) -> np.ndarray:
    """Weyl-Heisenberg displacement ``(-e^{i pi/d})^{n1 n2} X^{n1} Z^{n2}``."""
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    if not (0 <= n1 < d and 0 <= n2 < d):
        raise IndexError(f"displacement indices ({n1}, {n2}) out of range for d={d}")
    x = np.linalg.matrix_power(shift_operator(d), n1)
    z = np.linalg.matrix_power(clock_operator(d), n2)
    return (-np.exp(1j * np.pi / d)) ** (n1 * n2) * (x @ z)


@dataclass(frozen=True, eq=False)
class SicPovm:
    d: int
    effects: np.ndarray  # (d*d, d, d), effect n1*d + n2
    fiducial: np.ndarray

    def overlap_residual(self) -> float:
        d = self.d
        gram = np.einsum("jab,kba->jk", self.effects, self.effects).real
        target = (d * np.eye(d * d) + 1) / ((d + 1) * d * d)
        return float(np.max(np.abs(gram - target)))

    def completeness_residual(self) -> float:
        return float(np.max(np.abs(self.effects.sum(axis=0) - np.eye(self.d))))

    def probabilities(self, mat: np.ndarray) -> np.ndarray:
        """Single-system probabilities ``Tr[rho E^j]``."""
        return np.einsum("ab,jba->j", mat, self.effects).real


def fiducial_overlaps(psi: np.ndarray, d: int) -> np.ndarray:
    """``|<psi|D_n|psi>|^2`` for all ``n``, in ``n1 * d + n2`` order."""
    return np.array(
        [abs(np.vdot(psi, displacement(a, b, d) @ psi)) ** 2 for a in range(d) for b in range(d)]
    )


def sic_from_fiducial(psi: np.ndarray, d: int) -> SicPovm:
    """Orbit ``E_n = D_n |psi><psi| D_n^dagger / d``, validated."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    effects = []
    for a in range(d):
        for b in range(d):
            v = displacement(a, b, d) @ psi
            effects.append(np.outer(v, v.conj()) / d)
    sic = SicPovm(d, np.array(effects), psi)
    ov, comp = sic.overlap_residual(), sic.completeness_residual()
    if ov > SIC_OVERLAP_TOL or comp > SIC_COMPLETENESS_TOL:
        raise ConstructionError(
            f"fiducial does not generate a SIC for d={d}: overlap residual {ov:.3e}, completeness {comp:.3e}"
        )
    return sic


@lru_cache(maxsize=None)
def build_sic(d: int) -> SicPovm:
    if d not in _FIDUCIALS:
        raise DimensionError(f"SIC-POVM available for d in {sorted(_FIDUCIALS)}, got {d}")
    return sic_from_fiducial(_FIDUCIALS[d], d)


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    probs: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float).ravel()
        k = self.dims[0] ** 2 * self.dims[1] ** 2
        if p.size != k:
            raise ShapeError(f"probability vector has {p.size} entries, dims {self.dims} need {k}")
        if np.any(p < -1e-12):
            raise DataError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1) > 1e-9:
            raise DataError(f"probabilities sum to {p.sum():.12g}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "dims", tuple(self.dims))


class BornMap:
    """Linear map between bipartite density matrices and SIC probabilities."""

    def __init__(self, sic_a: SicPovm, sic_b: SicPovm):
        self.sic_a, self.sic_b = sic_a, sic_b
        self.dims = (sic_a.d, sic_b.d)
        joint = np.einsum("iab,jcd->ijacbd", sic_a.effects, sic_b.effects)
        n = sic_a.d * sic_b.d
        joint = joint.reshape(sic_a.d**2 * sic_b.d**2, n, n)
        # Tr[rho E] = sum_ab rho_ab E_ba
        self.matrix = joint.transpose(0, 2, 1).reshape(joint.shape[0], n * n)
        self.inverse = np.linalg.inv(self.matrix)

    def encode(self, mats: np.ndarray) -> np.ndarray:
        """Probabilities for one ``(n, n)`` matrix or a stack ``(N, n, n)``."""
        mats = np.asarray(mats)
        flat = mats.reshape(*mats.shape[:-2], -1)
        return (flat @ self.matrix.T).real

    def decode(self, p: np.ndarray) -> np.ndarray:
        n = self.dims[0] * self.dims[1]
        mat = (self.inverse @ np.asarray(p, dtype=complex)).reshape(n, n)
        return (mat + mat.conj().T) / 2


@lru_cache(maxsize=None)
def born_map(sic_a: SicPovm, sic_b: SicPovm) -> BornMap:
    return BornMap(sic_a, sic_b)


def sics_for(dims) -> tuple[SicPovm, SicPovm]:
    return build_sic(int(dims[0])), build_sic(int(dims[1]))


def born_probabilities(rho: DensityMatrix, sic_a: SicPovm, sic_b: SicPovm) -> ProbabilityVector:
    if tuple(rho.dims) != (sic_a.d, sic_b.d):
        raise ShapeError(f"state dims {rho.dims} do not match SIC dims {(sic_a.d, sic_b.d)}")
    p = born_map(sic_a, sic_b).encode(rho.mat)
    p = np.clip(p, 0.0, None)
    return ProbabilityVector(p / p.sum(), rho.dims)


def project_to_state(mat: np.ndarray) -> np.ndarray:
    """Nearest-by-clipping density matrix: zero negative eigenvalues, renormalize."""
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    if w[0] >= 0:
        return mat / np.trace(mat).real
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return out / w.sum()


def reconstruct(p: ProbabilityVector | np.ndarray, sic_a: SicPovm, sic_b: SicPovm) -> DensityMatrix:
    """Linear-inversion estimate of the state behind SIC probabilities or frequencies."""
    probs = p.probs if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=float)
    bm = born_map(sic_a, sic_b)
    if probs.size != bm.matrix.shape[0]:
        raise ShapeError(f"probability vector has {probs.size} entries, expected {bm.matrix.shape[0]}")
    return DensityMatrix(project_to_state(bm.decode(probs)), bm.dims)


@dataclass(frozen=True, eq=False)
class ShotRecord:
    counts: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self) -> None:
        c = np.asarray(self.counts)
        if c.ndim != 1 or np.any(c < 0) or not np.issubdtype(c.dtype, np.integer):
            raise DataError("counts must be a 1-D array of nonnegative integers")
        object.__setattr__(self, "counts", c.astype(np.int64))

    @property
    def n_shots(self) -> int:
        return int(self.counts.sum())

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_shots

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "count"])
        w.writerows(enumerate(self.counts.tolist()))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, dims) -> "ShotRecord":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["index", "count"]:
            raise DataError("counts CSV must start with header 'index,count'")
        body = [(int(i), int(c)) for i, c in rows[1:]]
        counts = np.zeros(len(body), dtype=np.int64)
        for i, c in body:
            counts[i] = c
        return cls(counts, tuple(dims))


def sample_counts(p: ProbabilityVector, n_shots: int, rng: np.random.Generator) -> ShotRecord:
    if n_shots < 1:
        raise DataError(f"n_shots must be >= 1, got {n_shots}")
    probs = p.probs / p.probs.sum()
    return ShotRecord(rng.multinomial(n_shots, probs), p.dims)
