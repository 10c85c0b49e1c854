"""Parametrized state families and the labeled datasets built from them.

Every dataset point is an (SIC probability vector, gamma) pair.  Points are
built from per-point random streams spawned from the caller's generator, so a
dataset depends only on that generator's seed, never on evaluation order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkernel as nk
from .errors import DataError, DimensionError, DomainError
from .qchannel import DepolarizingSpec, GenAmpDampSpec, KrausChannel, apply_local, gen_amp_damp
from .qstate import DensityMatrix, PureState, max_entangled
from .sicpovm import born_map, project_to_state, sics_for

MIN_POINTS = 10
BETA_MAX = 1e4
REGULARIZE_EPS = 1e-9
DEFAULT_CURVE_POINTS = 1000

DEPOLARIZING_N_VALUES = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9)
GAD_T_VALUES = (0.1, 0.25, 0.5, 0.83, 1.5, -0.1, -0.25, -0.5, -0.83, -1.5)


@dataclass(eq=False)
class LabeledDataset:
    """Ordered ``(probability vector, gamma)`` pairs.

    ``probs`` has shape ``(N, K)``.  ``states`` (exact density matrices) and
    ``counts`` (finite-shot records) are kept when the builder has them; they
    are diagnostics only and never written to the dataset CSV.
    """

    probs: np.ndarray
    gammas: np.ndarray
    dims: tuple[int, int]
    meta: dict = field(default_factory=dict)
    states: np.ndarray | None = None
    counts: np.ndarray | None = None
    params: np.ndarray | None = None  # per-point channel parameters, when defined

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=float)
        self.gammas = np.asarray(self.gammas, dtype=float)
        self.dims = tuple(int(x) for x in self.dims)
        k = self.dims[0] ** 2 * self.dims[1] ** 2
        if self.probs.ndim != 2 or self.probs.shape[1] != k:
            raise DataError(f"probability array must have shape (N, {k}), got {self.probs.shape}")
        if len(self.gammas) != len(self.probs):
            raise DataError("gammas and probabilities differ in length")
        if len(self.gammas) < MIN_POINTS:
            raise DataError(f"datasets need at least {MIN_POINTS} points, got {len(self.gammas)}")
        if np.any(np.diff(self.gammas) < 0):
            raise DataError("gammas must be nondecreasing")
        if np.any(self.probs < -1e-12) or np.any(np.abs(self.probs.sum(axis=1) - 1) > 1e-9):
            raise DataError("rows must be probability vectors")

    def __len__(self) -> int:
        return len(self.gammas)

    @property
    def points(self):
        return list(zip(self.probs, self.gammas))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma"] + [f"p_{k}" for k in range(self.probs.shape[1])])
        for g, row in zip(self.gammas, self.probs):
            w.writerow([repr(float(g))] + [repr(float(v)) for v in row])
        return buf.getvalue()

    def meta_json(self) -> str:
        return json.dumps({"dims": list(self.dims), **self.meta}, indent=2, sort_keys=True)

    @classmethod
    def from_csv(cls, text: str, dims: Sequence[int] | None = None, meta: dict | None = None) -> "LabeledDataset":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:1] != ["gamma"]:
            raise DataError("dataset CSV must start with a 'gamma,p_0,...' header")
        k = len(rows[0]) - 1
        if any(len(r) != k + 1 for r in rows[1:]):
            raise DataError("inconsistent row widths in dataset CSV")
        data = np.array([[float(v) for v in r] for r in rows[1:]])
        if dims is None:
            d = int(round(k ** 0.25))
            if d**4 != k:
                raise DataError(f"cannot infer dims from {k} columns; pass dims explicitly")
            dims = (d, d)
        return cls(data[:, 1:], data[:, 0], tuple(dims), dict(meta or {}))


def _encode(mats: np.ndarray, dims) -> np.ndarray:
    sic_a, sic_b = sics_for(dims)
    p = np.clip(born_map(sic_a, sic_b).encode(mats), 0.0, None)
    return p / p.sum(axis=1, keepdims=True)


def _randomize(mat: np.ndarray, dims, rng: np.random.Generator) -> np.ndarray:
    u = np.kron(nk.haar_unitary(dims[0], rng), nk.haar_unitary(dims[1], rng))
    out = u @ mat @ u.conj().T
    return (out + out.conj().T) / 2


def _randomized_stack(mats: Sequence[np.ndarray], dims, rng: np.random.Generator) -> np.ndarray:
    point_rngs = rng.spawn(len(mats))
    return np.array([_randomize(m, dims, r) for m, r in zip(mats, point_rngs)])


def _require_sic_dim(d: int) -> None:
    if d not in (2, 3, 4):
        raise DimensionError(f"supported dimensions are 2, 3, 4; got {d}")


def depolarizing_alphas(d: int, n: int) -> np.ndarray:
    """Even grid over the depolarizing domain ``[-1/(d^2 - 1), 1]``."""
    lo = -1.0 / (d * d - 1)
    return lo + np.arange(n) / (n - 1) * (1 - lo)


def depolarizing_dataset(d: int, n: int, rng: np.random.Generator, keep_states: bool = False) -> LabeledDataset:
    """Depolarized ``phi_+^d`` with fresh local Haar unitaries at every point; ``gamma = alpha``."""
    _require_sic_dim(d)
    if n < MIN_POINTS:
        raise DataError(f"need N >= {MIN_POINTS}, got {n}")
    alphas = depolarizing_alphas(d, n)
    phi = max_entangled(d).vec
    proj = np.outer(phi, phi.conj())
    eye = np.eye(d * d) / d**2
    mats = [a * proj + (1 - a) * eye for a in alphas]
    states = _randomized_stack(mats, (d, d), rng)
    meta = {"trajectory": "depolarizing", "d": d, "n": n}
    return LabeledDataset(_encode(states, (d, d)), alphas, (d, d), meta, states if keep_states else None)


@dataclass(frozen=True)
class CurveSpec:
    """A curve through two-parameter channel space.

    ``family`` is ``"local_depolarizing"`` (``shape`` is the exponent ``n``)
    or ``"gad"`` (``shape`` is the signed exponent ``t``).
    """

    family: str
    shape: float
    samples: int = DEFAULT_CURVE_POINTS

    def __post_init__(self) -> None:
        if self.family not in ("local_depolarizing", "gad"):
            raise DomainError(f"unknown curve family {self.family!r}")
        if self.samples < 2:
            raise DomainError("a curve needs at least two samples")
        if self.family == "local_depolarizing" and self.shape <= 0:
            raise DomainError(f"curve exponent n must be positive, got {self.shape}")
        if self.family == "gad" and self.shape == 0:
            raise DomainError("gad curve exponent t must be nonzero")

    @property
    def label(self) -> str:
        return f"{self.family}:{self.shape:g}"


def local_depolarizing_curve(n: float, t: np.ndarray) -> np.ndarray:
    """``(alpha_1, alpha_2)`` at curve parameter ``t in [0, pi/2]``.

    Curves with ``n > 1`` are traversed so that every curve starts at
    ``(1, 1)`` and ends at ``(-1/3, -1/3)``.
    """
    t = np.asarray(t, dtype=float)
    c, s = np.cos(t), np.sin(t)
    if n <= 1:
        e = 2.0 / n
        a1 = 4 / 3 * np.abs(c) ** e - 1 / 3
        a2 = -4 / 3 * np.abs(s) ** e + 1
    else:
        e = 2.0 / (n - 1)
        a1 = -4 / 3 * np.abs(s) ** e + 1
        a2 = 4 / 3 * np.abs(c) ** e - 1 / 3
    return np.stack([a1, a2], axis=-1)


def gad_curve(t: float, p: np.ndarray) -> np.ndarray:
    """``(l, p)`` with ``l = 1/2 +- (1/2) (p (1 - p))^|t|``, sign of ``t``."""
    p = np.asarray(p, dtype=float)
    l = 0.5 + np.sign(t) * 0.5 * (p * (1 - p)) ** abs(t)
    return np.stack([l, p], axis=-1)


def curve_parameter_grid(spec: CurveSpec, samples: int | None = None) -> np.ndarray:
    """Raw curve parameter (``t`` or ``p``) at every sample."""
    m = spec.samples if samples is None else samples
    if spec.family == "local_depolarizing":
        return np.linspace(0.0, np.pi / 2, m)
    return np.linspace(0.0, 1.0, m + 2)[1:-1]


def curve_points(spec: CurveSpec, samples: int | None = None) -> np.ndarray:
    """Channel parameter pairs along the curve, shape ``(samples, 2)``."""
    s = curve_parameter_grid(spec, samples)
    pts = local_depolarizing_curve(spec.shape, s) if spec.family == "local_depolarizing" else gad_curve(spec.shape, s)
    if spec.family == "local_depolarizing":
        if np.any(pts < -1 / 3 - 1e-12) or np.any(pts > 1 + 1e-12):
            raise DomainError(f"curve {spec.label} leaves the depolarizing domain")
        pts = np.clip(pts, -1 / 3, 1)
    elif np.any(pts[:, 0] < 0) or np.any(pts[:, 0] > 1):
        raise DomainError(f"curve {spec.label} leaves l in [0, 1]")
    return pts


def curve_gammas(spec: CurveSpec, samples: int | None = None) -> np.ndarray:
    """Curve parameter rescaled to ``[0, 1]`` (``t / (pi/2)`` or ``p``)."""
    s = curve_parameter_grid(spec, samples)
    return s / (np.pi / 2) if spec.family == "local_depolarizing" else s


def curve_point_at(spec: CurveSpec, gamma: float) -> np.ndarray:
    """Channel parameters at normalized position ``gamma`` on the curve."""
    if spec.family == "local_depolarizing":
        return local_depolarizing_curve(spec.shape, np.array([gamma * np.pi / 2]))[0]
    return gad_curve(spec.shape, np.array([gamma]))[0]


def channel_output(spec: CurveSpec, pair: Sequence[float]) -> DensityMatrix:
    """Channel at ``pair`` applied to ``phi_+^2`` (before randomization)."""
    phi = max_entangled(2).projector()
    if spec.family == "local_depolarizing":
        a1, a2 = (float(np.clip(x, -1 / 3, 1)) for x in pair)
        return apply_local(phi, DepolarizingSpec(2, a1), DepolarizingSpec(2, a2))
    l, p = (float(np.clip(x, 0, 1)) for x in pair)
    return apply_local(phi, gen_amp_damp(GenAmpDampSpec(l, p)), None)


def ppt_crossing(spec: CurveSpec, scan: int = 2001) -> float:
    """Normalized position where the channel output first becomes PPT.

    Oracle for two-qubit curves: the smallest partial-transpose eigenvalue of
    the (unrandomized) output is scanned along the curve and its first sign
    change refined with Brent's method.
    """
    from scipy.optimize import brentq

    def min_pt_eig(g: float) -> float:
        mat = channel_output(spec, curve_point_at(spec, g)).mat
        return float(np.linalg.eigvalsh(nk.partial_transpose(mat, (2, 2)))[0])

    grid = np.linspace(0.0, 1.0, scan)
    vals = np.array([min_pt_eig(g) for g in grid])
    change = np.flatnonzero((vals[:-1] < 0) & (vals[1:] >= 0))
    if change.size == 0:
        raise DomainError(f"curve {spec.label} never crosses the PPT boundary")
    k = change[0]
    return float(brentq(min_pt_eig, grid[k], grid[k + 1], xtol=1e-12))


def two_param_dataset(spec: CurveSpec, n: int | None, rng: np.random.Generator,
                      keep_states: bool = False) -> LabeledDataset:
    """Locally randomized channel outputs along ``spec``; ``gamma`` in ``[0, 1]``."""
    m = spec.samples if n is None else n
    if m < MIN_POINTS:
        raise DataError(f"need N >= {MIN_POINTS}, got {m}")
    pts = curve_points(spec, m)
    mats = [channel_output(spec, pair).mat for pair in pts]
    states = _randomized_stack(mats, (2, 2), rng)
    meta = {"trajectory": "two_param", "family": spec.family, "shape": spec.shape, "n": m}
    return LabeledDataset(_encode(states, (2, 2)), curve_gammas(spec, m), (2, 2), meta,
                          states if keep_states else None, params=pts)


def gell_mann_basis(d: int) -> np.ndarray:
    """Identity followed by the ``d^2 - 1`` generalized Gell-Mann matrices, ``Tr[L_i L_j] = d delta_ij``."""
    if d < 2:
        raise DimensionError(f"Gell-Mann basis needs d >= 2, got {d}")
    mats = [np.eye(d, dtype=complex)]
    scale = np.sqrt(d / 2)
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k], anti[k, j] = -1j, 1j
            mats += [scale * sym, scale * anti]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(scale * np.sqrt(2 / (l * (l + 1))) * np.diag(diag).astype(complex))
    return np.array(mats)


@dataclass(frozen=True, eq=False)
class ThermalPathContext:
    """Precomputed pieces of the thermal path through ``rho_in``."""

    rho_in: DensityMatrix
    h_in: np.ndarray
    h_loc: np.ndarray
    h_nonloc: np.ndarray
    coeffs: np.ndarray  # h_{i,j}
    g: PureState
    phi: PureState
    h_tilde: np.ndarray
    delta: float
    regularized: bool
    ground_gap: float
    _h_tilde_eig: nk.HermitianEig = field(repr=False)

    @property
    def ground_degenerate(self) -> bool:
        return self.ground_gap < 1e-8

    def steering(self, theta: float) -> np.ndarray:
        """``exp(-i H_tilde theta)``."""
        e = self._h_tilde_eig
        return (e.eigenvectors * np.exp(-1j * theta * e.eigenvalues)) @ e.eigenvectors.conj().T


def regularize(rho: DensityMatrix, eps: float = REGULARIZE_EPS) -> tuple[DensityMatrix, bool]:
    """Mix in ``eps`` of the maximally mixed state when ``rho`` is (near) singular."""
    if rho.eigenvalues()[0] >= 1e-9:
        return rho, False
    n = rho.size
    return DensityMatrix((1 - eps) * rho.mat + eps * np.eye(n) / n, rho.dims), True


def split_hamiltonian(h: np.ndarray, dims) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local / non-local parts of ``h`` in the product Gell-Mann basis, plus coefficients."""
    da, db = dims
    la, lb = gell_mann_basis(da), gell_mann_basis(db)
    basis = np.einsum("iab,jcd->ijacbd", la, lb).reshape(da * da, db * db, da * db, da * db)
    coeffs = np.einsum("ab,ijba->ij", h, basis).real / (da * db)
    local = coeffs.copy()
    local[1:, 1:] = 0
    nonlocal_ = coeffs - local
    h_loc = np.einsum("ij,ijab->ab", local, basis)
    h_nonloc = np.einsum("ij,ijab->ab", nonlocal_, basis)
    return h_loc, h_nonloc, coeffs


def thermal_context(rho_in: DensityMatrix, delta: float = 0.01, eps: float = REGULARIZE_EPS) -> ThermalPathContext:
    rho, regularized = regularize(rho_in, eps)
    if rho.eigenvalues()[0] <= 0:
        raise DomainError("input state is singular; increase the regularization")
    h_in = -nk.hermitian_matrix_function(rho.mat, "log")
    h_loc, h_nonloc, coeffs = split_hamiltonian(h_in, rho.dims)
    eig = nk.hermitian_eig(h_nonloc)
    g_vec = eig.eigenvectors[:, 0]
    gap = float(eig.eigenvalues[1] - eig.eigenvalues[0])
    sch = nk.schmidt_decompose(g_vec, rho.dims)
    n = min(rho.dims)
    phi_vec = sum(np.kron(sch.basis_a[:, i], sch.basis_b[:, i]) for i in range(n)) / np.sqrt(n)
    w = nk.complete_to_unitary(g_vec, phi_vec)
    h_tilde = nk.unitary_principal_log(w)
    return ThermalPathContext(
        rho, h_in, h_loc, h_nonloc, coeffs,
        PureState(g_vec, rho.dims), PureState(phi_vec, rho.dims),
        h_tilde, delta, regularized, gap, nk.hermitian_eig(h_tilde),
    )


def beta_of(lam: float) -> float:
    """Inverse temperature ``cot(pi lambda / 2)``: infinite at 0, 1 at 1/2, 0 at 1 (clamped)."""
    if lam >= 1:
        return 0.0
    if lam <= 0:
        return BETA_MAX
    return float(min(1.0 / np.tan(np.pi * lam / 2), BETA_MAX))


def switch_local(lam: float, delta: float) -> float:
    return 1.0 - 2.0 / (1.0 + np.exp(lam / delta))


def switch_nonlocal(lam: float, delta: float) -> float:
    return 2.0 / (1.0 + np.exp((lam - 1.0) / delta)) - 1.0


def effective_time(lam: float, delta: float) -> float:
    return 2.0 / (1.0 + np.exp(lam / delta))


def path_hamiltonian(ctx: ThermalPathContext, lam: float) -> np.ndarray:
    u = ctx.steering(effective_time(lam, ctx.delta))
    h = switch_local(lam, ctx.delta) * ctx.h_loc + switch_nonlocal(lam, ctx.delta) * (u @ ctx.h_nonloc @ u.conj().T)
    return (h + h.conj().T) / 2


def thermal_state_at(ctx: ThermalPathContext, lam: float) -> DensityMatrix:
    """``exp(-beta(lambda) H(lambda)) / Z``."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda={lam} outside [0, 1]")
    beta = beta_of(lam)
    eig = nk.hermitian_eig(path_hamiltonian(ctx, lam))
    w = eig.eigenvalues
    weights = np.exp(-beta * (w - w[0]))
    weights /= weights.sum()
    v = eig.eigenvectors
    return DensityMatrix((v * weights) @ v.conj().T, ctx.rho_in.dims)


def classification_lambdas(n: int) -> np.ndarray:
    return np.linspace(0.1, 0.9, n)


def classification_dataset(rho_in: DensityMatrix, n: int, rng: np.random.Generator,
                           keep_states: bool = False, delta: float = 0.01) -> LabeledDataset:
    """States on the thermal path at ``lambda`` evenly spread over ``[0.1, 0.9]``, locally randomized."""
    for d in rho_in.dims:
        _require_sic_dim(d)
    if n < MIN_POINTS:
        raise DataError(f"need N >= {MIN_POINTS}, got {n}")
    ctx = thermal_context(rho_in, delta)
    lams = classification_lambdas(n)
    mats = [thermal_state_at(ctx, float(l)).mat for l in lams]
    states = _randomized_stack(mats, rho_in.dims, rng)
    meta = {
        "trajectory": "thermal",
        "n": n,
        "regularized": ctx.regularized,
        "ground_gap": ctx.ground_gap,
        "ground_degenerate": ctx.ground_degenerate,
    }
    return LabeledDataset(_encode(states, rho_in.dims), lams, rho_in.dims, meta, states if keep_states else None)


def decoherence_states(noise: KrausChannel, n_max: int) -> np.ndarray:
    """``noise^N [phi_+^2]`` for ``N = 0..n_max``."""
    if noise.in_dim != 4 or noise.out_dim != 4:
        raise DimensionError("decoherence noise must act on two qubits")
    mat = max_entangled(2).projector().mat
    out = [mat]
    for _ in range(n_max):
        mat = noise.apply_matrix(mat)
        out.append(mat)
    return np.array(out)


def synthetic_decoherence_dataset(noise: KrausChannel, n_max: int, shots: int | None,
                                  rng: np.random.Generator, keep_states: bool = False) -> LabeledDataset:
    """Repeated noise on ``phi_+``, encoded by finite-shot SIC frequencies; ``gamma = N``.

    ``shots=None`` gives exact probabilities.
    """
    if n_max + 1 < MIN_POINTS:
        raise DataError(f"need n_max >= {MIN_POINTS - 1}, got {n_max}")
    states = decoherence_states(noise, n_max)
    exact = _encode(states, (2, 2))
    meta = {"trajectory": "decoherence", "n_max": n_max, "shots": shots}
    counts = None
    probs = exact
    if shots is not None:
        point_rngs = rng.spawn(len(exact))
        counts = np.array([r.multinomial(shots, p) for r, p in zip(point_rngs, exact)])
        probs = counts / shots
    return LabeledDataset(probs, np.arange(n_max + 1, dtype=float), (2, 2), meta,
                          states if keep_states else None, counts)


def counts_to_csv(gammas: np.ndarray, counts: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma"] + [f"count_{k}" for k in range(counts.shape[1])])
    for g, row in zip(gammas, counts):
        w.writerow([repr(float(g))] + [int(c) for c in row])
    return buf.getvalue()


def counts_from_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse ``gamma,count_0,...`` rows into ``(gammas, counts)``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:1] != ["gamma"]:
        raise DataError("counts CSV must start with a 'gamma,count_0,...' header")
    width = len(rows[0])
    body = [r for r in rows[1:] if r]
    if any(len(r) != width for r in body):
        raise DataError("inconsistent row widths in counts CSV")
    gammas = np.array([float(r[0]) for r in body])
    counts = np.array([[int(float(v)) for v in r[1:]] for r in body], dtype=np.int64)
    if np.any(counts < 0):
        raise DataError("negative counts")
    if np.any(counts.sum(axis=1) == 0):
        raise DataError("a row has zero total counts")
    return gammas, counts


def bootstrap_datasets(gammas: np.ndarray, counts: np.ndarray, n_datasets: int, rng: np.random.Generator,
                       dims=(2, 2)) -> list[LabeledDataset]:
    """Resampled datasets from tomographic reconstructions of measured counts.

    The first dataset is the measured frequencies themselves; each further one
    redraws the same number of shots from the Born probabilities of the
    linear-inversion estimate at every gamma.
    """
    freqs = counts / counts.sum(axis=1, keepdims=True)
    base = LabeledDataset(freqs, gammas, dims, {"trajectory": "measured"})
    out = [base]
    if n_datasets <= 1:
        return out
    sic_a, sic_b = sics_for(dims)
    bm = born_map(sic_a, sic_b)
    recon = np.array([project_to_state(bm.decode(f)) for f in freqs])
    exact = np.clip(bm.encode(recon), 0, None)
    exact /= exact.sum(axis=1, keepdims=True)
    shots = counts.sum(axis=1)
    for k, r in enumerate(rng.spawn(n_datasets - 1), start=1):
        draws = np.array([r.multinomial(s, p) for s, p in zip(shots, exact)])
        out.append(LabeledDataset(draws / shots[:, None], gammas, dims, {"trajectory": "bootstrap", "index": k}))
    return out
