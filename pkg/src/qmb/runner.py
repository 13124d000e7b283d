"""Named experiments: parameter parsing, execution, CSV/SVG/manifest output."""

from dataclasses import dataclass, field
import math
import os
from pathlib import Path
import re
import tempfile

import numpy as np

from . import fundamental_limits as fl
from . import interferometer as mz
from . import mass_position as mp
from . import qubit_metrology as qm
from . import timing as tm
from .errors import ConfigError, DomainError
from .fundamental_limits import HBAR
from .rng import MASK64, MonteCarloPlan
from .svgplot import line_plot

MANIFEST = "manifest.txt"
DEFAULT_OUTPUT_DIR = "qmb_output"

# -- value parsers --------------------------------------------------------------

_RANGE = re.compile(r"^(\d+)\.\.(\d+)(?::(odd|even|geom(\d+)|step(\d+)))?$")


def parse_nlist(text):
    """Parse resource lists: ``"3..41:odd"``, ``"4..1024:geom10"``, ``"16..256:step16"``,
    ``"2..8"`` or ``"1,4,100"``."""
    text = str(text).strip()
    m = _RANGE.match(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad range {text!r}")
        mode = m.group(3)
        if mode is None:
            return list(range(lo, hi + 1))
        if mode == "odd":
            return [n for n in range(lo, hi + 1) if n % 2]
        if mode == "even":
            return [n for n in range(lo, hi + 1) if n % 2 == 0]
        if mode.startswith("step"):
            step = int(m.group(5))
            if step < 1:
                raise ConfigError(f"bad step in {text!r}")
            return list(range(lo, hi + 1, step))
        k = int(m.group(4))
        if k < 2:
            raise ConfigError(f"geom needs at least 2 points in {text!r}")
        pts = sorted({int(round(v)) for v in np.geomspace(lo, hi, k)})
        if len(pts) != k:
            raise ConfigError(f"{text!r} does not give {k} distinct integers")
        return pts
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse N list {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise ConfigError(f"N list must contain positive integers, got {text!r}")
    return vals


def _float(text):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {text!r}")
    return v


def _pos_float(text):
    v = _float(text)
    if v <= 0:
        raise ConfigError(f"expected a positive number, got {text!r}")
    return v


def _pos_int(text):
    try:
        v = int(str(text))
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise ConfigError(f"expected an integer >= 1, got {text!r}")
    return v


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ConfigError(f"expected one of {options}, got {text!r}")
        return text

    return parse


def parse_seed(text):
    try:
        v = int(str(text), 0)
    except ValueError:
        raise ConfigError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v <= MASK64:
        raise ConfigError(f"seed must fit in 64 bits unsigned, got {text!r}")
    return v


@dataclass(frozen=True)
class Param:
    name: str
    parse: object
    default: object  # raw string, or None for "derived / optional"
    help: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict
    seed: int = 0
    output_dir: str = DEFAULT_OUTPUT_DIR

    def __post_init__(self):
        spec = EXPERIMENTS.get(self.experiment)
        if spec is None:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        unknown = set(self.params) - {p.name for p in spec.params}
        if unknown:
            raise ConfigError(f"unknown parameter(s) for {self.experiment}: {', '.join(sorted(unknown))}")


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)
    footer: list = field(default_factory=list)
    plot: str = None


@dataclass(frozen=True)
class Experiment:
    name: str
    params: tuple
    func: object
    help: str = ""


# -- CSV ----------------------------------------------------------------------------


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    s = str(v)
    if any(ch in s for ch in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def render_csv(table):
    lines = [",".join(table.columns)]
    lines += [",".join(format_value(v) for v in row) for row in table.rows]
    lines += [f"# {k}={format_value(v)}" for k, v in table.footer]
    return "\n".join(lines) + "\n"


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- experiments ---------------------------------------------------------------


def _slope_footer(fit, label):
    return [(f"slope[{label}]", fit.exponent), (f"intercept[{label}]", fit.intercept), (f"residual[{label}]", fit.residual)]


def _mz_scaling(p, seed):
    strategy = mz.normalize_strategy(p["strategy"])
    ns = p["n"] or parse_nlist({"coherent": "4..1024:geom10", "coherent+squeezed": "16..256:geom9", "entangled": "3..41:odd"}[strategy])
    cfg = mz.ScalingConfig(
        fd_step=p["fd_step"], squeeze_points=p["squeeze_points"], max_cutoff=p["max_cutoff"], cross_check=p["cross_check"] == "on"
    )
    fit = mz.scaling_experiment(strategy, ns, p["phi_op"], cfg)
    t = Table(("strategy", "N", "phi_op", "mean_M", "var_M", "delta_phi"))
    for r in fit.rows:
        t.rows.append((r.strategy, r.N, r.phi_op, r.mean_M, r.var_M, r.delta_phi))
    t.footer = [("slope", fit.exponent), ("intercept", fit.intercept), ("residual", fit.residual)]
    ns_ = [r.N for r in fit.rows]
    t.plot = line_plot(
        [(strategy, ns_, [r.delta_phi for r in fit.rows]), ("fit", ns_, [fit.prefactor() * n**fit.exponent for n in ns_])],
        title=f"phase error vs N ({strategy})", xlabel="N", ylabel="delta_phi", xlog=True, ylog=True,
    )
    return t


def _ghz_scaling(p, seed):
    strategies = ("independent", "ghz") if p["strategy"] == "both" else (p["strategy"],)
    t = Table(("strategy", "N", "trials", "true_phi", "rmse"))
    series = []
    for s in strategies:
        ns = p["n"] or parse_nlist("16..4096:geom9" if s == "independent" else "2..64:geom6")
        fit = qm.phase_scaling_experiment(s, ns, p["trials"], seed, p["repetitions"], p["true_phi"])
        for r in fit.rows:
            t.rows.append((s, r.N, r.trials, r.true_value, r.rmse))
        t.footer += _slope_footer(fit, s)
        flagged = [r.N for r in fit.rows if r.flagged]
        if flagged:
            t.footer.append((f"flagged[{s}]", " ".join(map(str, flagged))))
        series.append((s, [r.N for r in fit.rows], [r.rmse for r in fit.rows]))
    t.plot = line_plot(series, title="phase RMSE vs N", xlabel="N", ylabel="rmse", xlog=True, ylog=True)
    return t


def _frequency_standard(p, seed):
    ns = p["n"]
    t = Table(("N", "t", "independent", "entangled", "ratio"))
    for n in ns:
        a = qm.frequency_error(n, p["t"], "independent")
        b = qm.frequency_error(n, p["t"], "entangled")
        t.rows.append((n, p["t"], a, b, a / b))
    if len(ns) > 1:
        t.plot = line_plot(
            [("independent", ns, [r[2] for r in t.rows]), ("entangled", ns, [r[3] for r in t.rows])],
            title="frequency error vs N", xlabel="N", ylabel="delta_omega", xlog=True, ylog=True,
        )
    return t


def _pauli(p, seed):
    plan = MonteCarloPlan(p["trials"], seed)
    t = Table(("probe", "channel", "trials", "success"))
    comp = qm.SingleProbe([1, 0], np.eye(2))
    for name, probe in (("bell", qm.BELL), ("single_z", comp)):
        for c in qm.CHANNELS:
            t.rows.append((name, c, plan.trials, qm.pauli_discriminate(probe, c, plan)))
    rng = np.random.Generator(np.random.Philox(key=seed))
    best = max(qm.ml_success_probability(qm.random_single_probe(rng)) for _ in range(p["samples"]))
    t.footer = [
        ("bell_exact", qm.ml_success_probability(qm.BELL)),
        ("single_z_exact", qm.ml_success_probability(comp)),
        ("sampled_single_max", best),
        ("samples", p["samples"]),
    ]
    return t


def _sql_trajectory(p, seed):
    sigma = p["sigma_m"] or math.sqrt(HBAR * p["t_gap"] / p["m"])
    rec = mp.repeated_measurement_run(p["prep"], p["t_gap"], p["m"], sigma, p["n_meas"], seed)
    t = Table(("step", "time", "outcome", "pre_s_xx", "post_s_xx", "sql_bound", "beaten"))
    for k in range(len(rec.times)):
        t.rows.append(
            (k + 1, rec.times[k], rec.outcomes[k], rec.pre_variances[k], rec.post_variances[k], rec.sql_bound_values[k], bool(rec.beaten[k]))
        )
    t.footer = [("prep", p["prep"]), ("sigma_m", sigma), ("observable", rec.observable), ("control", ",".join(sorted(set(rec.controls)))),
                ("min_ratio", float(np.min(rec.pre_variances / rec.sql_bound_values)))]
    t.plot = line_plot(
        [("pre_s_xx", list(rec.times), list(rec.pre_variances)), ("sql_bound", list(rec.times), list(rec.sql_bound_values))],
        title=f"position variance before each measurement ({p['prep']})", xlabel="time [s]", ylabel="s_xx [m^2]", ylog=True,
    )
    return t


def _contractive_window(p, seed):
    d, m = p["delta"], p["m"]
    opt = mp.optimal_window_momentum_variance(d, m)
    bound = 4 * d**2
    # lowest s_pp admitting a state at the level
    lo = max(p["ratio_min"], (HBAR**2 / 4) / (mp.level(d, m) * opt))
    ratios = np.geomspace(lo, p["ratio_max"], p["points"])
    t = Table(("s_pp", "s_pp_ratio", "window", "bound"))
    for r in ratios:
        g = mp.contractive_state(d, m, r * opt)
        t.rows.append((r * opt, float(r), mp.window_length(g, d, m), bound))
    g = mp.contractive_state(d, m, opt)
    t.footer = [("window_at_optimum", mp.window_length(g, d, m)), ("bound", bound)]
    t.plot = line_plot(
        [("window", list(ratios), [r[2] for r in t.rows]), ("4 delta^2", list(ratios), [bound] * len(ratios))],
        title="contractive window vs momentum variance", xlabel="s_pp / s_pp_opt", ylabel="window [s]", xlog=True,
    )
    return t


def _timing_scaling(p, seed):
    strategies = tm.TIMING_STRATEGIES if p["strategy"] == "both" else (p["strategy"],)
    t = Table(("strategy", "N", "bandwidth", "trials", "rmse"))
    series = []
    for s in strategies:
        fit = tm.timing_scaling_experiment(s, p["n"], p["bandwidth"], 0.0, p["trials"], seed)
        for r in fit.rows:
            t.rows.append((s, r.N, p["bandwidth"], r.trials, r.rmse))
        t.footer += _slope_footer(fit, s)
        series.append((s, [r.N for r in fit.rows], [r.rmse for r in fit.rows]))
    t.plot = line_plot(series, title="arrival-time RMSE vs N", xlabel="N", ylabel="rmse [s]", xlog=True, ylog=True)
    return t


def _limits_table(p, seed):
    const = fl.CODATA2018.override(**{k: p[k] for k in ("hbar", "c", "G") if p[k] is not None})
    t = Table(("quantity", "formula", "inputs", "value", "decimal"))
    t.rows = fl.limits_table(p["R"], p["T"], p["E"], const)
    return t


EXPERIMENTS = {
    e.name: e
    for e in (
        Experiment(
            "mz-scaling",
            (
                Param("strategy", _choice("coherent", "coherent+squeezed", "squeezed", "coherent+squeezed_port_B", "entangled"), "coherent"),
                Param("n", parse_nlist, None, "N list, e.g. 3..41:odd or 4..1024:geom10"),
                Param("phi_op", _float, None, "operating phase (default per strategy)"),
                Param("fd_step", _pos_float, repr(mz.FD_STEP)),
                Param("squeeze_points", _pos_int, "33"),
                Param("max_cutoff", _pos_int, "400"),
                Param("cross_check", _choice("on", "off"), "on", "compare input/output-basis routes"),
            ),
            _mz_scaling,
            "Mach-Zehnder phase error vs N",
        ),
        Experiment(
            "ghz-scaling",
            (
                Param("strategy", _choice("independent", "ghz", "both"), "both"),
                Param("n", parse_nlist, None),
                Param("trials", _pos_int, "2000"),
                Param("repetitions", _pos_int, "1"),
                Param("true_phi", _float, None),
            ),
            _ghz_scaling,
            "Monte Carlo qubit phase RMSE vs N",
        ),
        Experiment(
            "frequency-standard",
            (Param("n", parse_nlist, "1,4,16,100"), Param("t", _pos_float, "1.0")),
            _frequency_standard,
            "frequency error of independent vs entangled ions",
        ),
        Experiment(
            "pauli-discrimination",
            (Param("trials", _pos_int, "10000"), Param("samples", _pos_int, "1000")),
            _pauli,
            "identify a Pauli channel with Bell vs single-qubit probes",
        ),
        Experiment(
            "sql-trajectory",
            (
                Param("prep", _choice(*mp.PREPARATIONS), "contractive"),
                Param("t_gap", _pos_float, "0.001"),
                Param("m", _pos_float, repr(mp.DEFAULT_MASS)),
                Param("sigma_m", _pos_float, None, "pointer resolution (default sqrt(hbar t_gap / m))"),
                Param("n_meas", _pos_int, "20"),
            ),
            _sql_trajectory,
            "repeated position measurement against the SQL",
        ),
        Experiment(
            "contractive-window",
            (
                Param("delta", _pos_float, "0.01"),
                Param("m", _pos_float, repr(mp.DEFAULT_MASS)),
                Param("ratio_min", _pos_float, "0.1"),
                Param("ratio_max", _pos_float, "10"),
                Param("points", _pos_int, "41"),
            ),
            _contractive_window,
            "time below the level 2 delta^2 hbar/m vs momentum variance",
        ),
        Experiment(
            "timing-scaling",
            (
                Param("strategy", _choice("classical", "entangled", "both"), "both"),
                Param("n", parse_nlist, "4..4096:geom11"),
                Param("bandwidth", _pos_float, "1.0"),
                Param("trials", _pos_int, "5000"),
            ),
            _timing_scaling,
            "arrival-time RMSE vs photon number",
        ),
        Experiment(
            "limits-table",
            (
                Param("R", _pos_float, "1.0"),
                Param("T", _pos_float, "1.0"),
                Param("E", _pos_float, "1.0"),
                Param("hbar", _pos_float, None),
                Param("c", _pos_float, None),
                Param("G", _pos_float, None),
            ),
            _limits_table,
            "clock, Planck-scale and counting bounds",
        ),
    )
}


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k in out:
            raise ConfigError(f"{path}:{i}: duplicate key {k!r}")
        out[k] = v
    return out


def resolve_config(experiment, file_values=None, flag_values=None, env=None):
    """Merge defaults < config file < flags into an :class:`ExperimentConfig` (raw strings)."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    env = os.environ if env is None else env
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (flag_values or {}).items() if v is not None})
    seed_raw = merged.pop("seed", None)
    if seed_raw is None:
        seed_raw = env.get("QMB_SEED", "0")
    out_dir = merged.pop("output_dir", DEFAULT_OUTPUT_DIR)
    named = merged.pop("experiment", experiment)
    if named != experiment:
        raise ConfigError(f"config names experiment {named!r}, command runs {experiment!r}")
    spec = EXPERIMENTS[experiment]
    params = {p.name: p.default for p in spec.params if p.name != "seed"}
    known = set(params)
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {experiment}: {', '.join(sorted(unknown))}")
    params.update(merged)
    return ExperimentConfig(experiment, params, parse_seed(seed_raw), str(out_dir))


def parsed_params(config):
    spec = EXPERIMENTS[config.experiment]
    return {p.name: (None if config.params.get(p.name) is None else p.parse(config.params[p.name]))
            for p in spec.params if p.name != "seed"}


def manifest_text(config, files):
    from . import __version__

    lines = [
        f"experiment={config.experiment}",
        f"seed={config.seed}",
        f"output_dir={config.output_dir}",
        f"version={__version__}",
    ]
    lines += [f"param.{k}={'' if v is None else v}" for k, v in sorted(config.params.items())]
    lines += [f"file={f}" for f in files]
    return "\n".join(lines) + "\n"


def run_table(config):
    """Execute an experiment and return its :class:`Table` without writing files."""
    params = parsed_params(config)
    try:
        return EXPERIMENTS[config.experiment].func(params, config.seed)
    except DomainError as exc:
        # parameter combinations the modules reject are configuration problems
        raise ConfigError(str(exc)) from exc


def run(config):
    """Run ``config`` and write ``<experiment>.csv``, optional ``.svg`` and ``manifest.txt``.

    Returns the list of written paths.
    """
    table = run_table(config)
    out = Path(config.output_dir)
    csv_path = out / f"{config.experiment}.csv"
    atomic_write(csv_path, render_csv(table))
    paths = [csv_path]
    if table.plot is not None:
        svg_path = out / f"{config.experiment}.svg"
        atomic_write(svg_path, table.plot)
        paths.append(svg_path)
    man = out / MANIFEST
    atomic_write(man, manifest_text(config, [p.name for p in paths]))
    return paths + [man]
