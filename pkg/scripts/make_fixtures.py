"""Regenerate the golden records under src/entconfusion/golden/.

Derived values are computed here with plain numpy/scipy and deliberately do
not import the package, so the tests compare the library against an
independent implementation.  Run from the repository root:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

OUT = Path(__file__).resolve().parents[1] / "src" / "entconfusion" / "golden"


def entry(value, source: str, tolerance: float = 0.0) -> dict:
    return {"value": value, "source": source, "tolerance": tolerance}


def write(name: str, description: str, expected: dict, inputs: dict | None = None,
          generator: dict | None = None) -> None:
    doc = {
        "name": name,
        "description": description,
        "inputs": inputs or {},
        "expected": expected,
        "generator": generator or {"script": "scripts/make_fixtures.py"},
    }
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# --- small independent oracles -------------------------------------------------

def pt_b(mat: np.ndarray, da: int, db: int) -> np.ndarray:
    return mat.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)


def phi_plus(d: int) -> np.ndarray:
    v = np.zeros(d * d)
    v[:: d + 1] = 1 / np.sqrt(d)
    return np.outer(v, v)


def horodecki(a: float) -> np.ndarray:
    # Standard 3x3 bound entangled family written out directly.
    b = (1 + a) / 2
    c = np.sqrt(1 - a * a) / 2
    m = np.array(
        [
            [a, 0, 0, 0, a, 0, 0, 0, a],
            [0, a, 0, 0, 0, 0, 0, 0, 0],
            [0, 0, a, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, a, 0, 0, 0, 0, 0],
            [a, 0, 0, 0, a, 0, 0, 0, a],
            [0, 0, 0, 0, 0, a, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, b, 0, c],
            [0, 0, 0, 0, 0, 0, 0, a, 0],
            [a, 0, 0, 0, a, 0, c, 0, b],
        ],
        dtype=float,
    )
    return m / (8 * a + 1)


def gad_output(l: float, p: float) -> np.ndarray:
    ks = [
        np.sqrt(l) * np.array([[1, 0], [0, np.sqrt(1 - p)]]),
        np.sqrt(l) * np.array([[0, np.sqrt(p)], [0, 0]]),
        np.sqrt(1 - l) * np.array([[np.sqrt(1 - p), 0], [0, 1]]),
        np.sqrt(1 - l) * np.array([[0, 0], [np.sqrt(p), 0]]),
    ]
    rho = phi_plus(2)
    return sum(np.kron(k, np.eye(2)) @ rho @ np.kron(k, np.eye(2)).T for k in ks)


def local_depolarized(a1: float, a2: float) -> np.ndarray:
    # Bloch picture: phi_+ has correlation tensor diag(1, -1, 1); local depolarizing scales it by a1 a2.
    s = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    t = np.diag([1.0, -1.0, 1.0]) * a1 * a2
    m = np.kron(s[0], s[0]).astype(complex)
    for i in range(3):
        m = m + t[i, i] * np.kron(s[i + 1], s[i + 1])
    return m / 4


def min_pt(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(pt_b(mat, 2, 2))[0])


def depol_curve(n: float, t: float) -> tuple[float, float]:
    if n <= 1:
        return 4 / 3 * np.cos(t) ** (2 / n) - 1 / 3, -4 / 3 * np.sin(t) ** (2 / n) + 1
    e = 2 / (n - 1)
    return -4 / 3 * np.sin(t) ** e + 1, 4 / 3 * np.cos(t) ** e - 1 / 3


def gad_curve(t: float, p: float) -> tuple[float, float]:
    return 0.5 + np.sign(t) * 0.5 * (p * (1 - p)) ** abs(t), p


def first_root(f, lo=0.0, hi=1.0, scan=2001) -> float:
    g = np.linspace(lo, hi, scan)
    v = np.array([f(x) for x in g])
    k = np.flatnonzero((v[:-1] < 0) & (v[1:] >= 0))[0]
    return float(brentq(f, g[k], g[k + 1], xtol=1e-13))


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    write(
        "alpha_crit",
        "Critical depolarizing parameter 1/(d+1) of maximally entangled d x d states.",
        {str(d): entry(1 / (d + 1), "published", 1e-12) for d in (2, 3, 4)},
    )

    for d in (2, 3, 4):
        write(
            f"sic_overlap_d{d}",
            f"Hilbert-Schmidt overlaps Tr[E_j E_k] = (d delta_jk + 1) / ((d+1) d^2) at d={d}.",
            {
                "diagonal": entry((d + 1) / ((d + 1) * d * d), "published", 1e-8),
                "off_diagonal": entry(1 / ((d + 1) * d * d), "published", 1e-8),
                "completeness": entry(0.0, "published", 1e-9),
            },
            inputs={"d": d},
        )

    presets = {
        "table1_2x2": (16, 32, 1e-3, 1e-4, 1400, 50),
        "table1_3x3": (81, 162, 1e-3, 1e-5, 1400, 50),
        "table1_4x4": (256, 512, 1e-5, 1e-5, 1400, 50),
        "table2": (16, 64, 2e-3, 2e-5, 1000, 50),
        "table3_2x2": (16, 32, 1e-3, 1e-3, 1400, 100),
        "table3_3x3": (81, 162, 1e-2, 1e-4, 1400, 100),
        "table4": (16, 16, 2e-4, 2e-3, 500, 50),
    }
    for name, (k, h, lr, wd, n, b) in presets.items():
        write(
            name,
            f"Network size and optimizer settings of preset {name}.",
            {
                "input": entry(k, "published"),
                "hidden": entry(h, "published"),
                "output": entry(2, "published"),
                "lr": entry(lr, "published"),
                "decay": entry(wd, "published"),
                "data": entry(n, "published"),
                "batch": entry(b, "published"),
                "epochs": entry(100, "published"),
            },
        )

    n_values = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9]
    t_values = [0.1, 0.25, 0.5, 0.83, 1.5, -0.1, -0.25, -0.5, -0.83, -1.5]
    ends = {}
    for n in n_values:
        ends[f"local_depolarizing:{n:g}:start"] = entry(list(depol_curve(n, 0.0)), "published", 1e-12)
        ends[f"local_depolarizing:{n:g}:end"] = entry(list(depol_curve(n, np.pi / 2)), "published", 1e-12)
    for t in t_values:
        ends[f"gad:{t:g}:start"] = entry(list(gad_curve(t, 0.0)), "published", 1e-12)
        ends[f"gad:{t:g}:end"] = entry(list(gad_curve(t, 1.0)), "published", 1e-12)
    write(
        "curve_endpoints",
        "Channel parameters at both ends of every preset curve.",
        ends,
        inputs={"n_values": n_values, "t_values": t_values},
    )

    depol_cross, gad_cross = {}, {}
    for n in n_values:
        f = lambda g: min_pt(local_depolarized(*depol_curve(n, g * np.pi / 2)))
        g = first_root(f)
        a1, a2 = depol_curve(n, g * np.pi / 2)
        depol_cross[f"{n:g}"] = entry({"gamma": g, "params": [a1, a2], "product": a1 * a2}, "derived", 1e-8)
    for t in t_values:
        f = lambda p: min_pt(gad_output(*gad_curve(t, p)))
        g = first_root(f, 1e-9, 1 - 1e-9)
        gad_cross[f"{t:g}"] = entry({"gamma": g, "params": list(gad_curve(t, g))}, "derived", 1e-8)
    write(
        "ppt_crossings",
        "Normalized curve position where the unrandomized channel output becomes PPT.",
        {"local_depolarizing": depol_cross, "gad": gad_cross},
        generator={"script": "scripts/make_fixtures.py", "scan": 2001, "root": "brentq xtol 1e-13"},
    )

    alphas = np.linspace(-1 / 3, 1, 21)
    write(
        "isotropic_concurrence",
        "Concurrence max(0, (3 alpha - 1)/2) of two-qubit isotropic states.",
        {f"{a:.12g}": entry(max(0.0, (3 * a - 1) / 2), "derived", 1e-8) for a in alphas},
        inputs={"alphas": alphas.tolist()},
    )

    hor = {}
    for a in np.round(np.arange(0.1, 1.0, 0.1), 10):
        m = horodecki(a)
        hor[f"{a:g}"] = entry(
            {
                "min_eigenvalue": float(np.linalg.eigvalsh(m)[0]),
                "min_pt_eigenvalue": float(np.linalg.eigvalsh(pt_b(m, 3, 3))[0]),
                "trace": float(np.trace(m)),
            },
            "derived",
            1e-10,
        )
    write(
        "horodecki_ppt",
        "Spectrum checks for the Horodecki family: PSD, unit trace and positive partial transpose.",
        hor,
    )

    q, target = 0.005, 165.0
    def n_star(w: float) -> float:
        f = lambda n: (1 - w) ** n * (0.5 + (1 - 2 * q) ** n) - 0.5
        return brentq(f, 0.0, 1e5, xtol=1e-12)

    white = brentq(lambda w: n_star(w) - target, 1e-6, 0.05, xtol=1e-15)
    write(
        "bell_dephasing",
        "Bell dephasing noise with a small white-noise admixture whose concurrence vanishes after N* steps.",
        {"white": entry(white, "derived", 1e-12), "n_star": entry(n_star(white), "derived", 1e-6)},
        inputs={"q": q, "target_n_star": target, "n_max": 500, "shots": 8192},
    )

    write(
        "published_examples",
        "Scalar facts quoted with the method and used directly by the tests.",
        {
            "bell_concurrence": entry(1.0, "published", 1e-8),
            "wshape_peak_d2": entry(1 / 3, "published", 0.07),
            "wshape_peak_d3": entry(1 / 4, "published", 0.07),
            "wshape_peak_d4": entry(1 / 5, "published", 0.07),
            "split_train_fraction": entry(0.7, "published"),
            "dataset_size": entry(1400, "published"),
            "ideal_wshape_at_crit": entry(1.0, "published", 1e-12),
            "ideal_wshape_at_start": entry(1.0, "published", 1e-12),
            "tie_decision_label": entry(0, "published"),
            "classification_isotropic_2_0.9": entry("entangled", "published"),
            "classification_isotropic_2_0.2": entry("separable", "published"),
            "classification_cq": entry("separable", "published"),
            "classification_horodecki_0.2": entry("entangled", "published"),
            "decoherence_peak_hardware": entry(165, "published"),
            "decoherence_n_max": entry(500, "published"),
            "decoherence_shots": entry(8192, "published"),
        },
    )
    print(f"wrote {len(list(OUT.glob('*.json')))} records to {OUT}")


if __name__ == "__main__":
    main()
