"""Experiment configs, the experiment catalog and the run folder that collects artifacts"""

import csv
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field, asdict
from datetime import datetime
from itertools import product
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from . import continuum, hardy, jacobi, sequences, spectrum, szego
from .errors import ConfigParseError, JacobiLabError

log = logging.getLogger(__name__)

OUTPUT_ENV = "JACOBI_LAB_OUTPUT"
DEFAULT_OUTPUT = Path.home() / "Jacobi Lab Runs"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2

DEFAULT_TOLERANCES = {
    "tail_tol": 1e-15,          # coefficient tail acceleration target
    "eig_atol": 1e-12,          # bisection width for eigenvalues outside [-2, 2]
    "szego_delta": 0.02,        # minimal Z increase per doubling for "divergent"
    "szego_shrink": 1.5,        # |dZ| shrink per doubling for "convergent"
    "szego_decay": 0.95,        # steady |dZ| ratio that still counts as "convergent"
    "szego_floor": 1e-12,       # |dZ| below this is quadrature noise
    "szego_node_ratio": 1.0,    # quadrature nodes per horizon site
    "prufer_rtol": 1e-8,        # local error target of the phase integrator
    "form_gap_tol": 1e-10,      # form gaps above -tol pass
    "sbp_slack": 1e-12,         # summation-by-parts bound slack
    "hardy_slack": 1e-12,       # Hardy inequality slack
    "symmetry_tol": 1e-12,      # sign-flip spectrum negation, relative to max(1, ||J||)
}

SEQUENCE_FIELDS = {"kind": "free", "alpha": 0.0, "beta": 0.0, "gamma": 1.0, "eta": math.pi,
                   "table_path": None}
POTENTIAL_FIELDS = {"kind": "sin-power", "beta": 1.5, "alpha": 1.0, "gamma": 0.25, "cutoff": 1.0,
                    "amplitude": 1.0, "table_path": None}


@dataclass(frozen=True)
class ExperimentInfo:
    name: str
    description: str
    exercises: str
    family: str  # sequence | potential | none


CATALOG = {
    info.name: info for info in (
        ExperimentInfo("spectrum-scan",
                       "Counts eigenvalues outside [-2, 2] along growing sections",
                       "finiteness of the bound states for summable oscillatory perturbations "
                       "and the 1/4 inverse-square threshold (Chihara values grow)",
                       "sequence"),
        ExperimentInfo("szego-scan",
                       "Szegő integral of eventually free truncations along growing horizons",
                       "Szegő condition for n^-gamma oscillatory coefficients, borderline gamma = 1/2",
                       "sequence"),
        ExperimentInfo("hardy-suite",
                       "Discrete Hardy inequality, its optimal potential and near optimizers",
                       "discrete Hardy inequality with optimal constant 1/4",
                       "none"),
        ExperimentInfo("sharpness-search",
                       "Trial forms for a_n = 1 + gamma_a/n^2, b_n = gamma_b/n^2 on an (ell, L) grid",
                       "sharpness of the 2 gamma_a + gamma_b = 1/4 threshold",
                       "none"),
        ExperimentInfo("coupling-scan",
                       "Zero counts N(lambda V) of half-line Schrödinger operators and their slope",
                       "coupling-constant law N(lambda V) ~ lambda^(1/beta) for sin r/(1+r)^beta, "
                       "Weyl law lambda^(1/2) for beta > 2",
                       "potential"),
        ExperimentInfo("verify-inequalities",
                       "Operator and comparison inequalities on parameter grids",
                       "divergence-form comparison bound, summation-by-parts lemma, sign-flip symmetry, "
                       "Hardy, Calogero, Bargmann and Chadan-Martin bounds",
                       "none"),
    )
}

INEQUALITY_CHECKS = ("form_gap", "comparison", "sbp", "symmetry", "hardy", "calogero", "bargmann", "cm")

DEFAULT_GRIDS = {
    "spectrum-scan": {"sizes": [1000, 10000, 100000, 1000000]},
    "szego-scan": {"horizons": [1000, 2000, 4000, 8000, 16000, 32000], "quad_nodes": 2048},
    "hardy-suite": {"trials": 1000, "hardy_n_max": 1000000, "optimizer_sizes": [1000, 10000, 100000]},
    "sharpness-search": {"gamma_a": [0.0, 0.05], "gamma_b": [1.25, 0.1],
                         "ells": list(hardy.DEFAULT_ELLS), "log_widths": list(hardy.DEFAULT_LOG_WIDTHS)},
    "coupling-scan": {"lambdas": [100.0, 1000.0, 10000.0, 100000.0], "r_max_exponent": None},
    "verify-inequalities": {"alphas": [0.0, 0.05, 0.3], "betas": [0.3, 1.0, 1.5], "gammas": [0.6, 1.0],
                            "size": 500, "margin": jacobi.DEFAULT_MARGIN, "trials": 1000,
                            "checks": list(INEQUALITY_CHECKS)},
}

DEFAULT_FAMILIES = {
    "spectrum-scan": {"kind": "free"},
    "szego-scan": {"kind": "alternating", "beta": 1.0, "gamma": 0.6},
    "coupling-scan": {"kind": "sin-power", "beta": 1.5},
}


@dataclass
class ExperimentConfig:
    """
    One experiment with its family, grid, tolerances and seed.

    Missing grid entries, tolerances and family fields are filled from the
    defaults on construction, so serialize/parse round trips are exact.
    """
    experiment: str
    family: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str = ""

    def __post_init__(self):
        if self.experiment not in CATALOG:
            raise ConfigParseError(f"unknown experiment '{self.experiment}', expected one of {sorted(CATALOG)}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigParseError(f"unknown tolerance(s) {sorted(unknown)}")
        grid_defaults = DEFAULT_GRIDS[self.experiment]
        unknown = set(self.grid) - set(grid_defaults)
        if unknown:
            raise ConfigParseError(f"unknown grid entr(ies) {sorted(unknown)} for {self.experiment}")
        self.grid = {**grid_defaults, **self.grid}
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}

        kind = CATALOG[self.experiment].family
        if kind == "none":
            self.family = {}
        else:
            defaults = SEQUENCE_FIELDS if kind == "sequence" else POTENTIAL_FIELDS
            unknown = set(self.family) - set(defaults) - {"table"}
            if unknown:
                raise ConfigParseError(f"unknown family field(s) {sorted(unknown)}")
            self.family = {**defaults, **DEFAULT_FAMILIES.get(self.experiment, {}), **self.family}
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigParseError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'ExperimentConfig':
        if not isinstance(data, dict) or "experiment" not in data:
            raise ConfigParseError("config must be a JSON object with an 'experiment' entry")
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        extra = set(data) - set(known)
        if extra:
            raise ConfigParseError(f"unknown config key(s) {sorted(extra)}")
        return cls(**known)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> 'ExperimentConfig':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigParseError(f"invalid JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> 'ExperimentConfig':
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigParseError(f"cannot read config {path}: {e}") from e
        config = cls.from_json(text)
        log.info("[CONFIG] Loaded %s from %s", config.experiment, path)
        return config

    def save(self, path):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2)

    def sequence(self) -> sequences.CoefficientSequence:
        return sequences.CoefficientSequence.from_dict(self.family)

    def potential(self) -> continuum.Potential1D:
        return continuum.Potential1D.from_dict(self.family)


def list_experiments() -> List[dict]:
    """Static catalog, one entry per experiment"""
    return [asdict(info) for info in CATALOG.values()]


@dataclass
class ExperimentResult:
    verdict: str
    key_numbers: dict
    header: List[str]
    rows: List[list]


# ----------------------------------------------------------------------------
# experiments
# ----------------------------------------------------------------------------

def _run_spectrum_scan(config: ExperimentConfig, threads: int) -> ExperimentResult:
    seq = config.sequence()
    scan = spectrum.count_scan(seq, config.grid["sizes"], threads=threads)
    rows = [[r.n, r.count_above, r.count_below, r.lt_half, scan.verdict] for r in scan.rows]
    key = {"totals": scan.totals, "lt_half": [r.lt_half for r in scan.rows]}
    if seq.kind == "inverse-square":
        key["threshold"] = sequences.threshold_profile(seq, config.grid["sizes"][-1]).to_dict()
    return ExperimentResult(scan.verdict, key, ["n", "count_above", "count_below", "lt_half", "verdict"], rows)


def _run_szego_scan(config: ExperimentConfig, threads: int) -> ExperimentResult:
    seq = config.sequence()
    tol = config.tolerances
    scan = szego.szego_scan(seq, config.grid["horizons"], quad_nodes=config.grid["quad_nodes"],
                            node_ratio=tol["szego_node_ratio"], delta=tol["szego_delta"],
                            shrink=tol["szego_shrink"], floor=tol["szego_floor"],
                            decay=tol["szego_decay"])
    increments = [math.nan] + scan.increments
    rows = [[e.n, e.quad_nodes, e.z_value, dz, int(e.edge_flag), scan.verdict]
            for e, dz in zip(scan.estimates, increments)]
    hypotheses = sequences.check_hypotheses(seq, config.grid["horizons"][-1])
    key = {"z_values": [e.z_value for e in scan.estimates], "increments": scan.increments,
           "prediction": hypotheses.prediction}
    return ExperimentResult(scan.verdict, key, ["horizon", "M", "Z", "dZ", "edge_flag", "verdict"], rows)


def _run_hardy_suite(config: ExperimentConfig, threads: int) -> ExperimentResult:
    grid, tol = config.grid, config.tolerances
    rng = np.random.default_rng(config.seed)
    rows = []

    worst = math.inf
    for _ in range(grid["trials"]):
        u = np.abs(rng.standard_normal(int(rng.integers(1, 200))))
        lhs, rhs = hardy.hardy_check(u)
        worst = min(worst, rhs - lhs)
    rows.append(["random-vectors", grid["trials"], worst, -tol["hardy_slack"],
                 "ok" if worst >= -tol["hardy_slack"] else "violated"])

    n = np.arange(2, grid["hardy_n_max"] + 1, dtype=np.float64)
    scaled = n * n * np.abs(hardy.hardy_potential(n))
    excess = float(np.max(np.maximum(0.25 - scaled, scaled - 0.25 - 0.25 / n ** 2)))
    rows.append(["potential-band", grid["hardy_n_max"], excess, 0.0, "ok" if excess <= 1e-15 else "violated"])

    sites = np.arange(1, grid["hardy_n_max"] + 2, dtype=np.float64)
    u0 = np.sqrt(sites)
    J0u = np.concatenate([[0.0], u0[:-2]]) + u0[1:]
    residual = J0u - (2.0 + hardy.hardy_potential(sites[:-1])) * u0[:-1]
    # the absolute residual grows like sqrt(n) from rounding alone; the verdict uses the relative one
    defect = float(np.max(np.abs(residual / u0[:-1])))
    defect_abs = float(np.max(np.abs(residual)))
    log.info("[HARDY] positive solution defect %.3g relative, %.3g absolute", defect, defect_abs)
    rows.append(["positive-solution", grid["hardy_n_max"], defect, 1e-12, "ok" if defect <= 1e-12 else "violated"])

    ratios = []
    for size in grid["optimizer_sizes"]:
        lhs, rhs = hardy.hardy_check(hardy.near_optimizer(size).values)
        ratios.append(rhs / lhs)
        rows.append(["near-optimizer", size, rhs / lhs, 1.0, "ok" if rhs >= lhs else "violated"])
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))

    violated = any(row[-1] == "violated" for row in rows)
    verdict = "violated" if violated else ("passed" if decreasing else "inconclusive")
    key = {"worst_slack": worst, "band_excess": excess, "identity_defect": defect,
           "identity_defect_abs": defect_abs, "optimizer_ratios": ratios}
    return ExperimentResult(verdict, key, ["check", "parameter", "value", "bound", "verdict"], rows)


def _run_sharpness_search(config: ExperimentConfig, threads: int) -> ExperimentResult:
    grid = config.grid
    Ls = [math.exp(s) for s in grid["log_widths"]]
    rows = []
    consistent, violated = True, False
    minima = []
    for gamma_a, gamma_b in zip(grid["gamma_a"], grid["gamma_b"]):
        search = hardy.sharpness_search(gamma_a, gamma_b, grid["ells"], Ls, threads=threads)
        criterion = 2 * gamma_a + gamma_b
        verdict = "negative-found" if search.any_negative else "positive"
        if criterion < 0.25 and search.any_negative:
            violated = True
        if criterion > 0.25 and not search.any_negative:
            consistent = False
        minima.append(search.minimum[2])
        for ell, L, value in search.values:
            rows.append([gamma_a, gamma_b, ell, math.log(L), value,
                         hardy.sharpness_predictor(criterion, L), verdict])
    overall = "violated" if violated else ("consistent" if consistent else "inconclusive")
    return ExperimentResult(overall, {"minima": minima},
                            ["gamma_a", "gamma_b", "ell", "log_L", "value", "predictor", "verdict"], rows)


def _run_coupling_scan(config: ExperimentConfig, threads: int) -> ExperimentResult:
    V = config.potential()
    scan = continuum.coupling_scan(V, config.grid["lambdas"], config.grid["r_max_exponent"],
                                   rtol=config.tolerances["prufer_rtol"], threads=threads)
    rows = []
    for i, r in enumerate(scan.results):
        slope = scan.slope if i == len(scan.results) - 1 else ""
        rows.append([r.lam, r.r_max, r.zero_count, r.final_theta, int(r.tail_bound_ok), slope])
    target = 1.0 / V.beta if V.beta < 2 else 0.5
    key = {"slope": scan.slope, "target_slope": target, "counts": [r.zero_count for r in scan.results]}
    if V.kind == "sin-power":
        key["dirichlet_lower_bounds"] = [continuum.dirichlet_lower_bound(V.beta, lam)
                                         for lam in config.grid["lambdas"]]
    if V.kind in ("sin-power", "power-law") and V.beta > 2:
        key["weyl_ratios"] = continuum.weyl_ratios(V, scan)
    verdict = "fitted" if math.isfinite(scan.slope) else "inconclusive"
    return ExperimentResult(verdict, key, ["lambda", "r_max", "zero_count", "final_theta", "tail_ok", "slope"], rows)


def _check_row(check: str, parameters: str, value: float, bound: float, ok: bool) -> list:
    return [check, parameters, value, bound, "ok" if ok else "violated"]


def _verify_form_gap(config, rng) -> List[list]:
    grid, tol = config.grid, config.tolerances["form_gap_tol"]
    rows = []
    for alpha, beta, gamma in product(grid["alphas"], grid["betas"], grid["gammas"]):
        seq = sequences.CoefficientSequence(kind="alternating", alpha=alpha, beta=beta, gamma=gamma)
        dec = sequences.decompose(seq, grid["size"] + 1, config.tolerances["tail_tol"])
        W = jacobi.potential_W(dec, grid["size"])
        gap = jacobi.form_gap(jacobi.truncate(seq, grid["size"]), W, grid["margin"])
        rows.append(_check_row("form_gap", f"alpha={alpha} beta={beta} gamma={gamma}", gap, -tol, gap >= -tol))
    return rows


def _verify_comparison(config, rng) -> List[list]:
    grid, tol = config.grid, config.tolerances["form_gap_tol"]
    rows = []
    for beta, gamma in product(grid["betas"], grid["gammas"]):
        seq = sequences.CoefficientSequence(kind="alternating", beta=beta, gamma=gamma)
        dec = sequences.decompose(seq, grid["size"] + 1, config.tolerances["tail_tol"])
        Jplus, _ = jacobi.comparison_operators(dec.f, grid["size"])
        gap = jacobi.form_gap(jacobi.truncate(seq, grid["size"]), Jplus.diag, grid["margin"])
        rows.append(_check_row("comparison", f"beta={beta} gamma={gamma}", gap, -tol, gap >= -tol))
    return rows


def _verify_sbp(config, rng) -> List[list]:
    slack = config.tolerances["sbp_slack"]
    worst = math.inf
    for _ in range(config.grid["trials"]):
        m = int(rng.integers(1, 60))
        u = rng.standard_normal(m)
        f = rng.standard_normal(m + 1)
        lhs, rhs = jacobi.sbp_bound_check(u, f)
        worst = min(worst, rhs - lhs)
    return [_check_row("sbp", f"trials={config.grid['trials']}", worst, -slack, worst >= -slack)]


def _verify_symmetry(config, rng) -> List[list]:
    tol = config.tolerances["symmetry_tol"]
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 151))
        J = jacobi.TruncatedJacobi(rng.standard_normal(n), rng.uniform(0.1, 2.0, n - 1))
        flipped = spectrum.dense_oracle(jacobi.flip_sign(J))
        original = spectrum.dense_oracle(J)
        worst = max(worst, float(np.max(np.abs(flipped + original[::-1]))) / max(1.0, J.norm_bound()))
    return [_check_row("symmetry", "sections=50", worst, tol, worst <= tol)]


def _verify_hardy(config, rng) -> List[list]:
    slack = config.tolerances["hardy_slack"]
    worst = math.inf
    for _ in range(config.grid["trials"]):
        u = np.abs(rng.standard_normal(int(rng.integers(1, 200))))
        lhs, rhs = hardy.hardy_check(u)
        worst = min(worst, rhs - lhs)
    return [_check_row("hardy", f"trials={config.grid['trials']}", worst, -slack, worst >= -slack)]


MONOTONE_SAMPLE = (
    ("power-law", {"amplitude": -1.0, "beta": 3.0}),
    ("power-law", {"amplitude": -10.0, "beta": 3.0}),
    ("power-law", {"amplitude": -20.0, "beta": 2.5}),
    ("power-law", {"amplitude": -50.0, "beta": 4.0}),
    ("table", {"table": ((math.pi, -1.0),)}),
    ("table", {"table": ((math.pi, -4.0),)}),
)
COMPARISON_RADIUS = 1000.0


def _comparison_rows(config, name: str, bound_fn: Callable) -> List[list]:
    rows = []
    for kind, params in MONOTONE_SAMPLE:
        V = continuum.Potential1D(kind=kind, **params)
        count = continuum.prufer_count(V, 1.0, COMPARISON_RADIUS, config.tolerances["prufer_rtol"]).zero_count
        bound = bound_fn(V, COMPARISON_RADIUS)
        label = ", ".join(f"{k}={v}" for k, v in params.items() if k != "table") or "well"
        rows.append(_check_row(name, f"{kind} {label}", count, bound + 1, count <= bound + 1))
    return rows


def _verify_calogero(config, rng) -> List[list]:
    return _comparison_rows(config, "calogero", continuum.calogero_bound)


def _verify_bargmann(config, rng) -> List[list]:
    return _comparison_rows(config, "bargmann", continuum.bargmann_bound)


CM_CUTOFF_RADIUS = 2000.0


def _verify_cm(config, rng) -> List[list]:
    rows = []
    rtol = config.tolerances["prufer_rtol"]
    for beta, lam in product((1.5,), (30.0, 100.0)):
        V = continuum.Potential1D(kind="sin-power", beta=beta)
        R = lam ** (1.0 / beta)
        left, right = continuum.cm_inequality_check(continuum.divergence_split(V, R), lam, rtol=rtol)
        rows.append(_check_row("cm", f"beta={beta} lambda={lam} R={R:.6g}", left, right, left <= right))
    # sin r / r past a smooth cutoff: finitely many bound states only for small lambda
    split = continuum.divergence_split(continuum.Potential1D(kind="sin-cutoff", alpha=1.0), 2.0)
    for lam in (0.5, 2.0):
        left, right = continuum.cm_inequality_check(split, lam, CM_CUTOFF_RADIUS, rtol)
        rows.append(_check_row("cm", f"sin-cutoff alpha=1 lambda={lam} R=2 r_max={CM_CUTOFF_RADIUS:g}",
                               left, right, left <= right))
    return rows


VERIFIERS = {
    "form_gap": _verify_form_gap,
    "comparison": _verify_comparison,
    "sbp": _verify_sbp,
    "symmetry": _verify_symmetry,
    "hardy": _verify_hardy,
    "calogero": _verify_calogero,
    "bargmann": _verify_bargmann,
    "cm": _verify_cm,
}


def _run_verify_inequalities(config: ExperimentConfig, threads: int) -> ExperimentResult:
    unknown = set(config.grid["checks"]) - set(VERIFIERS)
    if unknown:
        raise ConfigParseError(f"unknown check(s) {sorted(unknown)}, expected a subset of {INEQUALITY_CHECKS}")
    rng = np.random.default_rng(config.seed)
    rows = []
    for check in config.grid["checks"]:
        block = VERIFIERS[check](config, rng)
        failed = sum(1 for row in block if row[-1] == "violated")
        log.info("[VERIFY] %s: %d row(s), %d violated", check, len(block), failed)
        rows.extend(block)
    failures = [row for row in rows if row[-1] == "violated"]
    verdict = "violated" if failures else "passed"
    key = {"checks": list(config.grid["checks"]), "violations": len(failures), "rows": len(rows)}
    return ExperimentResult(verdict, key, ["check", "parameters", "value", "bound", "verdict"], rows)


RUNNERS = {
    "spectrum-scan": _run_spectrum_scan,
    "szego-scan": _run_szego_scan,
    "hardy-suite": _run_hardy_suite,
    "sharpness-search": _run_sharpness_search,
    "coupling-scan": _run_coupling_scan,
    "verify-inequalities": _run_verify_inequalities,
}


# ----------------------------------------------------------------------------
# run folder
# ----------------------------------------------------------------------------

def default_output_folder() -> Path:
    env = os.environ.get(OUTPUT_ENV)
    return Path(env).expanduser() if env else DEFAULT_OUTPUT


def _csv_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return value


class ExperimentRun:
    """
    Manages a single experiment run:
    - Run folder (explicit output path, or a timestamped folder under the output root)
    - Dispatch to the experiment
    - CSV data and summary.json
    """

    def __init__(self, config: ExperimentConfig, output_root: Optional[Path] = None, threads: int = 1):
        self.config = config
        self.output_root = Path(output_root) if output_root else default_output_folder()
        self.threads = max(1, int(threads))
        self.run_folder: Optional[Path] = None
        self.result: Optional[ExperimentResult] = None
        self.runtime_ms = 0.0

    def create_run_folder(self) -> Path:
        """Create the output folder for this run"""
        if self.config.output_path:
            self.run_folder = Path(self.config.output_path).expanduser()
        else:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            self.run_folder = self.output_root / f"run_{timestamp}"
        self.run_folder.mkdir(parents=True, exist_ok=True)
        return self.run_folder

    @property
    def csv_path(self) -> Path:
        return self.run_folder / f"{self.config.experiment}.csv"

    @property
    def summary_path(self) -> Path:
        return self.run_folder / "summary.json"

    def execute(self) -> int:
        """Run the experiment and write its artifacts. Returns the exit status."""
        if not self.run_folder:
            self.create_run_folder()
        name = self.config.experiment
        log.info("[RUN] %s -> %s", name, self.run_folder)
        start = time.perf_counter()
        try:
            self.result = RUNNERS[name](self.config, self.threads)
        except (JacobiLabError, OSError, ValueError) as e:
            log.error("[RUN] Failed %s: %s", name, e)
            return EXIT_ERROR
        self.runtime_ms = (time.perf_counter() - start) * 1000.0

        self.write_csv()
        self.save_summary()
        log.info("[RUN] %s verdict: %s (%.0f ms)", name, self.result.verdict, self.runtime_ms)
        if name == "verify-inequalities" and self.result.verdict == "violated":
            return EXIT_VIOLATED
        return EXIT_OK

    def write_csv(self):
        with open(self.csv_path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.result.header)
            for row in self.result.rows:
                writer.writerow([_csv_cell(v) for v in row])

    def save_summary(self):
        summary = {
            "verdict": self.result.verdict,
            "key_numbers": _jsonable(self.result.key_numbers),
            "runtime_ms": round(self.runtime_ms, 3),
            "config_echo": self.config.to_dict(),
        }
        with open(self.summary_path, 'w') as f:
            json.dump(summary, f, indent=2)


def _jsonable(value):
    """NaN and numpy scalars become JSON-safe values"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value
