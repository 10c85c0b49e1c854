"""Command-line entry point: ``entconfusion <command> [flags]``.

Commands
--------
wshape                W shape for depolarized maximally entangled states
phase-diagram         critical points along preset curves of a two-parameter channel
classify              entangled/separable verdict for a state read from JSON
ingest                confusion run plus tomography diagnostics on measured counts
simulate-decoherence  synthetic counts for repeated Bell dephasing of phi_+
diagnose              SIC, oracle and tomography self-checks

Exit codes: 0 success, 2 no peak, 3 inconclusive verdict, 64 usage error,
65 invalid input data, 1 internal failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import confusion, entwitness, ffnn, qchannel, qstate, sicpovm, trajectory
from .errors import DataError, EntConfusionError, FixtureError, NoPeakError, StateError
from .numkernel import derive_rng

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_NO_PEAK = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_DATA = 65

log = logging.getLogger("entconfusion")

FAMILIES = {"local-depolarizing": "local_depolarizing", "gad": "gad"}

# Per-command defaults; the preset supplies network settings and data size.
DEFAULTS = {
    "wshape": {"dim": 2, "preset": None, "gamma_points": 21, "repeats": 5, "seed": 0,
               "margin": confusion.DEFAULT_MARGIN, "split": confusion.DEFAULT_SPLIT, "workers": 1},
    "phase-diagram": {"family": "local-depolarizing", "preset": "table2", "gamma_points": 15, "repeats": 5,
                      "seed": 0, "margin": confusion.DEFAULT_MARGIN, "split": confusion.DEFAULT_SPLIT,
                      "workers": 1},
    "classify": {"preset": None, "gamma_points": 21, "repeats": 5, "seed": 0,
                 "margin": confusion.DEFAULT_MARGIN, "split": confusion.DEFAULT_SPLIT, "workers": 1},
    "ingest": {"dim": 2, "preset": "table4", "gamma_points": 21, "repeats": 5, "bootstrap": 5, "seed": 0,
               "margin": confusion.DEFAULT_MARGIN, "split": confusion.DEFAULT_SPLIT, "workers": 1},
    "simulate-decoherence": {"q": 0.005, "white": None, "n_star": 165.0, "n_max": 500, "shots": 8192,
                             "seed": 0},
    "diagnose": {"seed": 0},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, train: bool = True) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--config", type=Path, default=None,
                   help="JSON config (or a previous run's metadata.json); flags override it")
    if train:
        p.add_argument("--n", type=int, default=None, help="dataset size (default: preset data size)")
        p.add_argument("--preset", default=None, choices=sorted(ffnn.PRESETS))
        p.add_argument("--gamma-points", dest="gamma_points", type=int, default=None)
        p.add_argument("--repeats", type=int, default=None)
        p.add_argument("--margin", type=float, default=None, help="fraction of the grid ignored at each end")
        p.add_argument("--split", type=float, default=None, help="training fraction")
        p.add_argument("--workers", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entconfusion", description="Learning-by-confusion entanglement experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("wshape", help="W shape of depolarized maximally entangled states")
    p.add_argument("--dim", type=int, default=None, choices=(2, 3, 4))
    _common(p)

    p = sub.add_parser("phase-diagram", help="critical points along preset channel curves")
    p.add_argument("--family", default=None, choices=sorted(FAMILIES))
    _common(p)

    p = sub.add_parser("classify", help="entanglement verdict for a state in JSON")
    p.add_argument("--state", type=Path, default=None)
    _common(p)

    p = sub.add_parser("ingest", help="confusion run on measured SIC counts")
    p.add_argument("--counts", type=Path, default=None)
    p.add_argument("--dim", type=int, default=None, choices=(2, 3, 4))
    p.add_argument("--bootstrap", type=int, default=None, help="number of datasets including the measured one")
    _common(p)

    p = sub.add_parser("simulate-decoherence", help="synthetic counts for repeated Bell dephasing")
    p.add_argument("--q", type=float, default=None, help="phase-flip probability per step")
    p.add_argument("--white", type=float, default=None, help="white-noise admixture per step")
    p.add_argument("--n-star", dest="n_star", type=float, default=None,
                   help="choose the white noise so that concurrence vanishes after this many steps")
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--shots", type=int, default=None)
    _common(p, train=False)

    p = sub.add_parser("diagnose", help="SIC, oracle and tomography self-checks")
    _common(p, train=False)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Command defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS[args.command])
    train_overrides = {}
    if args.config is not None:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config {args.config}: {exc}") from exc
        doc = doc.get("config", doc)
        train_overrides = dict(doc.pop("train", None) or {})
        unknown = set(doc) - set(cfg) - {"out", "state", "counts", "n", "dim", "family", "command"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k: v for k, v in doc.items() if k != "command"})
    for key, val in vars(args).items():
        if key in ("command", "config", "verbose") or val is None:
            continue
        cfg[key] = val
    for key in ("out", "state", "counts"):
        if cfg.get(key) is not None:
            cfg[key] = str(cfg[key])
    if train_overrides:
        cfg["train"] = train_overrides
    return cfg


def train_config(cfg: dict, default_preset: str) -> ffnn.TrainConfig:
    name = cfg.get("preset") or default_preset
    cfg["preset"] = name
    tc = ffnn.preset(name)
    if cfg.get("train"):
        tc = tc.with_(**cfg["train"])
    if cfg.get("n"):
        tc = tc.with_(data_size=int(cfg["n"]))
    return tc


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_csv(text: str, header: list[str]) -> None:
    """Header prefix, rectangular rows, numeric cells outside the ``curve_id`` column."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][: len(header)] != header:
        raise RuntimeError(f"output CSV header {rows[:1]} does not start with {header}")
    names = rows[0]
    for r in rows[1:]:
        if len(r) != len(names):
            raise RuntimeError("output CSV has ragged rows")
        for name, v in zip(names, r):
            if name != "curve_id" and v != "":
                float(v)


class Outputs:
    """Collects files for one run and writes them atomically once validated."""

    def __init__(self, out: str | None):
        if out is None:
            raise UsageError("--out is required")
        self.root = Path(out)
        self.files: list[str] = []

    def write(self, rel: str, text: str, header: list[str] | None = None) -> Path:
        if header is not None:
            _check_csv(text, header)
        path = self.root / rel
        _atomic_write(path, text)
        self.files.append(rel)
        return path


def _metadata(command: str, cfg: dict, seeds: dict, started: float, outputs: Outputs, extra: dict | None = None) -> str:
    doc = {
        "command": command,
        "config": {k: v for k, v in cfg.items()},
        "seeds": seeds,
        "versions": {
            "entconfusion": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": round(time.time() - started, 3),
        "outputs": list(outputs.files),
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


WSHAPE_HEADER = ["gamma", "acc_mean", "acc_min", "acc_max"]


def _finish_curve(out: Outputs, rel: str, curve: confusion.WShapeCurve) -> None:
    out.write(rel, curve.to_csv(), WSHAPE_HEADER)


def cmd_wshape(cfg: dict) -> int:
    started = time.time()
    d = int(cfg["dim"])
    tc = train_config(cfg, {2: "table1_2x2", 3: "table1_3x3", 4: "table1_4x4"}[d])
    n = int(tc.data_size or 1400)
    out = Outputs(cfg.get("out"))
    seed = int(cfg["seed"])
    data = trajectory.depolarizing_dataset(d, n, derive_rng(seed, 0))
    grid = confusion.default_grid(data, int(cfg["gamma_points"]))
    curve = confusion.sweep(data, grid, tc, int(cfg["repeats"]), derive_rng(seed, 1), split=float(cfg["split"]),
                            margin_fraction=float(cfg["margin"]), workers=int(cfg["workers"]))
    out.write("dataset.csv", data.to_csv(), ["gamma"])
    _finish_curve(out, "wshape.csv", curve)
    extra = {"critical": curve.critical, "critical_error": curve.critical_error, "expected": qchannel.alpha_crit(d),
             "train": tc.to_dict()}
    out.write("metadata.json", _metadata("wshape", cfg, {"dataset": [seed, 0], "sweep": [seed, 1]}, started, out, extra))
    if curve.critical is None:
        print(f"no peak: {curve.critical_error}", file=sys.stderr)
        return EXIT_NO_PEAK
    print(f"critical gamma {curve.critical:.6g} (expected {qchannel.alpha_crit(d):.6g})")
    return EXIT_OK


def _preset_specs(family: str) -> list[trajectory.CurveSpec]:
    values = trajectory.DEPOLARIZING_N_VALUES if family == "local_depolarizing" else trajectory.GAD_T_VALUES
    return [trajectory.CurveSpec(family, v) for v in values]


def _safe(label: str) -> str:
    return label.replace(":", "_").replace("-", "m")


def cmd_phase_diagram(cfg: dict) -> int:
    started = time.time()
    family = FAMILIES[cfg["family"]]
    tc = train_config(cfg, "table2")
    out = Outputs(cfg.get("out"))
    seed = int(cfg["seed"])
    specs = _preset_specs(family)
    pd = confusion.phase_diagram(family, specs, tc, int(cfg["repeats"]), derive_rng(seed, 0),
                                 grid_points=int(cfg["gamma_points"]), n=tc.data_size, workers=int(cfg["workers"]),
                                 margin_fraction=float(cfg["margin"]))
    for spec, curve in pd.curves:
        if curve.critical is None:
            log.warning("curve %s: %s", spec.label, curve.critical_error)
        _finish_curve(out, f"curves/{_safe(spec.label)}.csv", curve)
    out.write("diagram.csv", pd.to_csv(), ["curve_id"])
    out.write("heatmap.csv", pd.heatmap_csv(), ["curve_id"])
    failures = {s.label: c.critical_error for s, c in pd.curves if c.critical is None}
    out.write("metadata.json", _metadata("phase-diagram", cfg, {"diagram": [seed, 0]}, started, out,
                                         {"failed_curves": failures, "train": tc.to_dict()}))
    print(f"{len(specs) - len(failures)}/{len(specs)} curves with a peak")
    return EXIT_OK


def cmd_classify(cfg: dict) -> int:
    started = time.time()
    if not cfg.get("state"):
        raise UsageError("--state is required")
    try:
        text = Path(cfg["state"]).read_text()
    except OSError as exc:
        raise DataError(f"cannot read state file: {exc}") from exc
    rho = qstate.DensityMatrix.from_json(text)
    d = rho.dims[0]
    tc = train_config(cfg, "table3_2x2" if rho.dims == (2, 2) else "table3_3x3")
    out = Outputs(cfg.get("out"))
    seed = int(cfg["seed"])
    v = confusion.classify(rho, tc, int(cfg["repeats"]), derive_rng(seed, 0), n=tc.data_size,
                           grid_points=int(cfg["gamma_points"]), workers=int(cfg["workers"]),
                           margin_fraction=float(cfg["margin"]))
    curve_path = out.write("curve.csv", v.curve.to_csv(), WSHAPE_HEADER)
    out.write("verdict.json", v.to_json(str(curve_path)) + "\n")
    out.write("metadata.json", _metadata("classify", cfg, {"classify": [seed, 0]}, started, out,
                                         {"verdict": v.verdict, "lambda_star": v.lambda_star,
                                          "critical_error": v.curve.critical_error, "train": tc.to_dict(),
                                          "dims": [d, rho.dims[1]]}))
    print(v.to_json(str(curve_path)))
    return EXIT_INCONCLUSIVE if v.verdict == "inconclusive" else EXIT_OK


def diagnostics_csv(gammas: np.ndarray, freqs: np.ndarray, dims) -> str:
    """Per-point tomography: reconstructed concurrence and Bell fidelities."""
    sic_a, sic_b = sicpovm.sics_for(dims)
    phi_p, phi_m = qstate.max_entangled(2), qstate.bell_minus()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "concurrence", "fidelity_phi_plus", "fidelity_phi_minus"])
    for g, f in zip(gammas, freqs):
        rho = sicpovm.reconstruct(f, sic_a, sic_b)
        w.writerow([repr(float(g)), repr(entwitness.concurrence(rho).value),
                    repr(qstate.fidelity_with_pure(rho, phi_p)), repr(qstate.fidelity_with_pure(rho, phi_m))])
    return buf.getvalue()


def cmd_ingest(cfg: dict) -> int:
    started = time.time()
    if not cfg.get("counts"):
        raise UsageError("--counts is required")
    try:
        text = Path(cfg["counts"]).read_text()
    except OSError as exc:
        raise DataError(f"cannot read counts file: {exc}") from exc
    d = int(cfg["dim"])
    dims = (d, d)
    out = Outputs(cfg.get("out"))
    seed = int(cfg["seed"])
    tc = train_config(cfg, "table4")
    header = next(csv.reader(io.StringIO(text)), [])
    if len(header) > 1 and header[1].startswith("p_"):
        data = trajectory.LabeledDataset.from_csv(text, dims)
        datasets, gammas, freqs = [data], data.gammas, data.probs
    else:
        gammas, counts = trajectory.counts_from_csv(text)
        if counts.shape[1] != d**4:
            raise DataError(f"counts CSV has {counts.shape[1]} bins; dims {dims} need {d ** 4}")
        datasets = trajectory.bootstrap_datasets(gammas, counts, int(cfg["bootstrap"]), derive_rng(seed, 0), dims)
        freqs = datasets[0].probs
    grid = confusion.default_grid(datasets[0], int(cfg["gamma_points"]))
    curve = confusion.sweep(datasets, grid, tc, int(cfg["repeats"]), derive_rng(seed, 1), split=float(cfg["split"]),
                            margin_fraction=float(cfg["margin"]), workers=int(cfg["workers"]))
    _finish_curve(out, "wshape.csv", curve)
    if dims == (2, 2):
        out.write("diagnostics.csv", diagnostics_csv(gammas, freqs, dims), ["gamma"])
    out.write("metadata.json", _metadata("ingest", cfg, {"bootstrap": [seed, 0], "sweep": [seed, 1]}, started, out,
                                         {"critical": curve.critical, "critical_error": curve.critical_error,
                                          "train": tc.to_dict()}))
    if curve.critical is None:
        print(f"no peak: {curve.critical_error}", file=sys.stderr)
        return EXIT_NO_PEAK
    print(f"critical gamma {curve.critical:.6g}")
    return EXIT_OK


def white_for_zero(q: float, n_star: float) -> float:
    """White-noise level that makes Bell-dephasing concurrence vanish after ``n_star`` steps."""
    from scipy.optimize import brentq

    return float(brentq(lambda w: qchannel.bell_dephasing_zero(q, w) - n_star, 1e-9, 0.5, xtol=1e-15))


def cmd_simulate_decoherence(cfg: dict) -> int:
    started = time.time()
    out = Outputs(cfg.get("out"))
    q = float(cfg["q"])
    white = cfg.get("white")
    white = white_for_zero(q, float(cfg["n_star"])) if white is None else float(white)
    cfg["white"] = white
    seed = int(cfg["seed"])
    noise = qchannel.bell_dephasing(q, white)
    data = trajectory.synthetic_decoherence_dataset(noise, int(cfg["n_max"]), int(cfg["shots"]), derive_rng(seed, 0))
    out.write("counts.csv", trajectory.counts_to_csv(data.gammas, data.counts), ["gamma"])
    zero = qchannel.bell_dephasing_zero(q, white)
    out.write("metadata.json", _metadata("simulate-decoherence", cfg, {"shots": [seed, 0]}, started, out,
                                         {"concurrence_zero": zero}))
    print(f"analytic concurrence zero at N = {zero:.6g}")
    return EXIT_OK


def run_diagnostics(seed: int = 0) -> list[tuple[str, bool, str]]:
    """Self-check suite; returns ``(name, passed, detail)`` rows."""
    rows = []
    for d in (2, 3, 4):
        sic = sicpovm.build_sic(d)
        ov, comp = sic.overlap_residual(), sic.completeness_residual()
        rows.append((f"sic d={d} overlap residual", ov < 1e-8, f"{ov:.2e}"))
        rows.append((f"sic d={d} completeness residual", comp < 1e-9, f"{comp:.2e}"))
    gram = np.einsum("jab,kba->jk", sicpovm.build_sic(2).effects, sicpovm.build_sic(2).effects).real
    diag, off = gram[0, 0], gram[0, 1]
    rows.append(("sic d=2 overlaps (1/4, 1/12)", abs(diag - 1 / 4) < 1e-8 and abs(off - 1 / 12) < 1e-8,
                 f"{diag:.6f}, {off:.6f}"))
    c = entwitness.concurrence(qstate.DensityMatrix.from_pure(qstate.max_entangled(2))).value
    rows.append(("concurrence of phi_+", abs(c - 1) < 1e-8, f"{c:.10f}"))
    err = max(abs(entwitness.concurrence(qstate.isotropic(2, a)).value - max(0, (3 * a - 1) / 2))
              for a in np.linspace(-1 / 3, 1, 21))
    rows.append(("isotropic concurrence closed form", err < 1e-8, f"max err {err:.1e}"))
    rng = derive_rng(seed, 7)
    agree = 0
    for _ in range(200):
        rho = qstate.random_density((2, 2), rng)
        agree += (entwitness.concurrence(rho).value > 1e-9) == (not entwitness.ppt_check(rho).is_ppt)
    rows.append(("concurrence/PPT agreement (200 states)", agree == 200, f"{agree}/200"))
    for d in (2, 3, 4):
        sic_a = sic_b = sicpovm.build_sic(d)
        worst = 0.0
        for _ in range(20):
            rho = qstate.random_density((d, d), rng)
            back = sicpovm.reconstruct(sicpovm.born_probabilities(rho, sic_a, sic_b), sic_a, sic_b)
            worst = max(worst, float(np.linalg.norm(back.mat - rho.mat)))
        rows.append((f"tomography round trip ({d},{d})", worst < 1e-8, f"{worst:.1e}"))
    return rows


def cmd_diagnose(cfg: dict) -> int:
    rows = run_diagnostics(int(cfg["seed"]))
    width = max(len(r[0]) for r in rows)
    for name, ok, detail in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    if cfg.get("out"):
        out = Outputs(cfg["out"])
        out.write("diagnose.json", json.dumps([{"check": n, "pass": bool(ok), "detail": d} for n, ok, d in rows],
                                              indent=2) + "\n")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_INTERNAL


COMMANDS = {
    "wshape": cmd_wshape,
    "phase-diagram": cmd_phase_diagram,
    "classify": cmd_classify,
    "ingest": cmd_ingest,
    "simulate-decoherence": cmd_simulate_decoherence,
    "diagnose": cmd_diagnose,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (DataError, StateError, FixtureError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NoPeakError as exc:
        print(f"no peak: {exc}", file=sys.stderr)
        return EXIT_NO_PEAK
    except (EntConfusionError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
