"""Scenario presets, configuration parsing, artifacts and sweeps.

A scenario bundles everything one run needs: model coefficients, the
domain evolution rate, the harvest map, the grid, the initial mode sum
and the run length.  Scenarios come from built-in presets or from flat
keyed configuration files (INI-style sections; exact grammar in the
package README).

Artifacts are plain CSV (comma separated, header row, LF endings, 17
significant digits so every float round-trips exactly) plus a
gnuplot-compatible block file for surface plots.  Identical
configurations produce byte-identical artifacts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .engine import (
    Grid,
    OutputSpec,
    StateField,
    Trajectory,
    initial_condition,
    simulate,
)
from .errors import ConfigError, SweepPathError
from .model import EvolutionRate, ModelParams, PulseFunction
from .periodic import (
    ExtinctionCertificate,
    PeriodicSolution,
    period_map_fixed_point,
)
from .spectral import IndexReport, compute_index

WORKERS_ENV = "EVODOM_WORKERS"

EXTINCTION = "extinction"
PERSISTENCE = "persistence"
UNSPECIFIED = "unspecified"

# Tail rules for classifying a finished run from its per-period sup norms.
EXTINCTION_SUP_FLOOR = 1e-10     # sup below this is extinct outright
EXTINCTION_TREND_RATIO = 0.999   # sustained decay steeper than this
EXTINCTION_TREND_PERIODS = 5
PERSISTENCE_REL_CHANGE = 1e-6    # plateau: relative per-period change below this
PERSISTENCE_SUP_FLOOR = 1e-6     # ... at a clearly positive level


@dataclass(frozen=True)
class Scenario:
    """Complete description of one run."""

    name: str
    params: ModelParams
    rho: EvolutionRate
    pulse: PulseFunction
    grid: Grid
    v0_modes: dict
    n_periods: int
    expected: str = UNSPECIFIED


def _benchmark_defaults():
    return ModelParams(d=1.0, alpha=1.1, gamma=0.05, l0=math.pi, T=2.0)


def _preset(name, amplitude, pulse, expected):
    params = _benchmark_defaults()
    return Scenario(
        name=name,
        params=params,
        rho=EvolutionRate.exp_cosine(amplitude, params.T),
        pulse=pulse,
        grid=Grid.for_model(params),
        v0_modes={1: 0.5, 3: 0.2},
        n_periods=200,
        expected=expected,
    )


def _make_presets():
    bh = PulseFunction.beverton_holt(10.0, 8.0)
    return {
        "example-4.1-rho1": _preset("example-4.1-rho1", -0.1, bh, EXTINCTION),
        "example-4.1-rho2": _preset("example-4.1-rho2", +0.1, bh, PERSISTENCE),
        "example-4.2-rho1": _preset(
            "example-4.2-rho1", -0.1, PulseFunction.ricker(0.05, 1.2), EXTINCTION),
        "example-4.2-rho2": _preset(
            "example-4.2-rho2", +0.1, PulseFunction.ricker(0.05, 1.2), PERSISTENCE),
        "example-4.3-rho1": _preset(
            "example-4.3-rho1", -0.1, PulseFunction.identity(), EXTINCTION),
        "example-4.3-rho2": _preset(
            "example-4.3-rho2", +0.1, PulseFunction.identity(), PERSISTENCE),
        "example-4.3-rho2-harvest": _preset(
            "example-4.3-rho2-harvest", +0.1,
            PulseFunction.beverton_holt(10.0, 5.0), EXTINCTION),
        "example-4.4-rho2": _preset(
            "example-4.4-rho2", +0.1, PulseFunction.ricker(0.05, 5.0), PERSISTENCE),
    }


PRESETS = _make_presets()

PRESET_ALIASES = {
    "4.1a": "example-4.1-rho1",
    "4.1b": "example-4.1-rho2",
    "4.2a": "example-4.2-rho1",
    "4.2b": "example-4.2-rho2",
    "4.3a": "example-4.3-rho1",
    "4.3b": "example-4.3-rho2",
    "4.3c": "example-4.3-rho2-harvest",
    "4.4": "example-4.4-rho2",
}


def get_preset(name: str) -> Scenario:
    """Look up a built-in scenario by canonical name or short alias."""
    key = PRESET_ALIASES.get(name, name)
    if key not in PRESETS:
        known = ", ".join(sorted(PRESETS) + sorted(PRESET_ALIASES))
        raise KeyError(f"unknown preset {name!r}; known: {known}")
    return PRESETS[key]


# --------------------------------------------------------------------------
# configuration parsing
# --------------------------------------------------------------------------

_SECTIONS = {
    "scenario": {"name", "preset", "expected"},
    "model": {"d", "alpha", "gamma", "l0", "T"},
    "rho": {"kind", "amplitude"},
    "pulse": {"kind", "a", "m", "r", "b"},
    "grid": {"ny", "steps_per_period"},
    "run": {"n_periods", "modes"},
}


def _tokenize(text):
    """Yield (line_no, section, key, value) entries; reject malformed lines."""
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", line=line_no)
            yield line_no, section, None, None
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=line_no)
        if section is None:
            raise ConfigError("key outside any section", line=line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SECTIONS[section]:
            raise ConfigError(
                f"unknown key in section [{section}]", key=key, line=line_no)
        yield line_no, section, key, value


def _parse_float(value, key, line, positive=False):
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got {value!r}", key=key, line=line)
    if positive and x <= 0:
        raise ConfigError(f"must be strictly positive, got {value!r}",
                          key=key, line=line)
    return x


def _parse_int(value, key, line, minimum=None):
    try:
        x = int(value)
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}", key=key, line=line)
    if minimum is not None and x < minimum:
        raise ConfigError(f"must be at least {minimum}, got {x}", key=key, line=line)
    return x


def _parse_modes(value, key, line):
    modes = {}
    if not value:
        return modes
    for part in value.split(","):
        part = part.strip()
        if ":" not in part:
            raise ConfigError(f"mode entries are 'k:coefficient', got {part!r}",
                              key=key, line=line)
        k_str, _, c_str = part.partition(":")
        try:
            k = int(k_str.strip())
            c = float(c_str.strip())
        except ValueError:
            raise ConfigError(f"bad mode entry {part!r}", key=key, line=line)
        if k < 1:
            raise ConfigError(f"mode numbers start at 1, got {k}", key=key, line=line)
        modes[k] = c
    return modes


def parse_config(text: str) -> Scenario:
    """Build a scenario from flat keyed configuration text.

    Sections: scenario, model, rho, pulse, grid, run.  A preset named in
    [scenario] supplies every default; explicit keys override it.  An
    empty or missing pulse section means no harvesting (identity pulse).
    Unknown sections or keys are rejected with their line number.
    """
    raw = {name: {} for name in _SECTIONS}
    lines = {}
    for line_no, section, key, value in _tokenize(text):
        if key is None:
            continue
        raw[section][key] = value
        lines[(section, key)] = line_no

    def ln(section, key):
        return lines.get((section, key))

    base = None
    if "preset" in raw["scenario"]:
        try:
            base = get_preset(raw["scenario"]["preset"])
        except KeyError as exc:
            raise ConfigError(str(exc), key="preset",
                              line=ln("scenario", "preset"))

    def model_value(key, default):
        if key in raw["model"]:
            return _parse_float(raw["model"][key], key, ln("model", key),
                                positive=True)
        return default

    if base is not None:
        bp = base.params
        params = ModelParams(
            d=model_value("d", bp.d), alpha=model_value("alpha", bp.alpha),
            gamma=model_value("gamma", bp.gamma), l0=model_value("l0", bp.l0),
            T=model_value("T", bp.T),
        )
    else:
        missing = [k for k in ("d", "alpha", "gamma", "l0", "T")
                   if k not in raw["model"]]
        if missing:
            raise ConfigError(f"missing model key(s): {', '.join(missing)}",
                              key=missing[0])
        params = ModelParams(
            d=model_value("d", None), alpha=model_value("alpha", None),
            gamma=model_value("gamma", None), l0=model_value("l0", None),
            T=model_value("T", None),
        )

    rho_section = raw["rho"]
    if rho_section or base is None:
        kind = rho_section.get("kind", "constant-one")
        if kind == "constant-one":
            rho = EvolutionRate.constant(params.T)
        elif kind == "exp-cosine":
            if "amplitude" not in rho_section:
                raise ConfigError("exp-cosine requires an amplitude",
                                  key="amplitude", line=ln("rho", "kind"))
            rho = EvolutionRate.exp_cosine(
                _parse_float(rho_section["amplitude"], "amplitude",
                             ln("rho", "amplitude")), params.T)
        else:
            raise ConfigError(f"unknown rho kind {kind!r}", key="kind",
                              line=ln("rho", "kind"))
    else:
        rho = EvolutionRate(base.rho.kind, params.T, base.rho.amplitude)

    pulse_section = raw["pulse"]
    if pulse_section or base is None:
        kind = pulse_section.get("kind", "identity")
        line = ln("pulse", "kind")

        def pulse_param(key):
            if key not in pulse_section:
                raise ConfigError(f"pulse kind {kind!r} requires {key!r}",
                                  key=key, line=line)
            return _parse_float(pulse_section[key], key, ln("pulse", key),
                                positive=True)

        if kind == "identity":
            pulse = PulseFunction.identity()
        elif kind == "beverton-holt":
            pulse = PulseFunction.beverton_holt(pulse_param("a"), pulse_param("m"))
        elif kind == "ricker":
            pulse = PulseFunction.ricker(pulse_param("r"), pulse_param("b"))
        else:
            raise ConfigError(f"unknown pulse kind {kind!r}", key="kind", line=line)
    else:
        pulse = base.pulse

    grid_section = raw["grid"]
    ny = _parse_int(grid_section["ny"], "ny", ln("grid", "ny"), minimum=15) \
        if "ny" in grid_section else (base.grid.ny if base else 199)
    spp = _parse_int(grid_section["steps_per_period"], "steps_per_period",
                     ln("grid", "steps_per_period"), minimum=16) \
        if "steps_per_period" in grid_section else \
        (base.grid.steps_per_period if base else 2048)
    grid = Grid.for_model(params, ny=ny, steps_per_period=spp)

    run_section = raw["run"]
    n_periods = _parse_int(run_section["n_periods"], "n_periods",
                           ln("run", "n_periods"), minimum=1) \
        if "n_periods" in run_section else (base.n_periods if base else 200)
    modes = _parse_modes(run_section["modes"], "modes", ln("run", "modes")) \
        if "modes" in run_section else \
        (dict(base.v0_modes) if base else {1: 0.5, 3: 0.2})

    expected = raw["scenario"].get("expected",
                                   base.expected if base else UNSPECIFIED)
    if expected not in (EXTINCTION, PERSISTENCE, UNSPECIFIED):
        raise ConfigError(f"expected must be one of {EXTINCTION}/"
                          f"{PERSISTENCE}/{UNSPECIFIED}", key="expected",
                          line=ln("scenario", "expected"))
    name = raw["scenario"].get("name", base.name if base else "custom")

    return Scenario(name=name, params=params, rho=rho, pulse=pulse, grid=grid,
                    v0_modes=modes, n_periods=n_periods, expected=expected)


def load_config(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# --------------------------------------------------------------------------
# classification and decay-rate estimation
# --------------------------------------------------------------------------

def classify(sup_norms: np.ndarray) -> str:
    """Classify a finished run from its per-period sup norms.

    Rules are applied to the tail of the series (transients can dip
    before a persistent state is reached): a plateau at a clearly
    positive level is persistence; a sup below the floor, or a sustained
    monotone decay, is extinction.
    """
    s = np.asarray(sup_norms, dtype=float)
    if s.size == 0:
        return UNSPECIFIED
    if s[-1] < EXTINCTION_SUP_FLOOR:
        return EXTINCTION
    tail = s[-6:]
    if tail.size >= 2 and s[-1] > PERSISTENCE_SUP_FLOOR:
        rel = np.abs(np.diff(tail)) / tail[:-1]
        if np.all(rel < PERSISTENCE_REL_CHANGE):
            return PERSISTENCE
    k = EXTINCTION_TREND_PERIODS
    if s.size >= k + 1:
        ratios = s[-k:] / s[-k - 1:-1]
        if np.all(ratios < EXTINCTION_TREND_RATIO):
            return EXTINCTION
    return UNSPECIFIED


@dataclass(frozen=True)
class DecayEstimate:
    """Fitted per-time exponential rate of a sup-norm series."""

    rate: float
    reliable: bool
    points_used: int


def estimate_decay_rate(sup_norms, period: float) -> DecayEstimate:
    """Least-squares slope of log sup norm over the last half of the series.

    Needs at least 10 periods.  The estimate is flagged unreliable when
    the fitted tail is not strictly monotone in log (for example a
    persistence plateau, where successive changes are noise).
    """
    s = np.asarray(sup_norms, dtype=float)
    if s.size < 10:
        raise ValueError("need at least 10 periods of data")
    start = s.size // 2
    window = s[start:]
    times = period * (np.arange(start, s.size) + 1.0)
    keep = window > 0.0
    if np.count_nonzero(keep) < 5:
        return DecayEstimate(rate=-math.inf, reliable=False,
                             points_used=int(np.count_nonzero(keep)))
    logs = np.log(window[keep])
    slope = float(np.polyfit(times[keep], logs, 1)[0])
    diffs = np.diff(logs)
    monotone = bool(np.all(diffs < 0.0) or np.all(diffs > 0.0))
    return DecayEstimate(rate=slope, reliable=monotone,
                         points_used=int(np.count_nonzero(keep)))


# --------------------------------------------------------------------------
# physical-frame reconstruction
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhysicalFrame:
    """One snapshot mapped back to the evolving physical interval."""

    time: float
    phase: str
    x: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class PhysicalReconstruction:
    frames: list
    endpoint_times: np.ndarray
    endpoint_lengths: np.ndarray


def reconstruct_physical(traj: Trajectory, rho: EvolutionRate) -> PhysicalReconstruction:
    """Relabel snapshots to physical coordinates x = rho(t) y.

    The field values are untouched (the map is a coordinate relabeling);
    the trace of the moving endpoint rho(t) l0 is reported alongside.
    """
    y = traj.grid.y
    frames = []
    times = []
    lengths = []
    for snap in traj.snapshots:
        t_local = math.fmod(snap.time, rho.period)
        scale = rho.value(t_local)
        frames.append(PhysicalFrame(time=snap.time, phase=snap.phase,
                                    x=scale * y, u=snap.values))
        times.append(snap.time)
        lengths.append(scale * traj.l0)
    return PhysicalReconstruction(
        frames=frames,
        endpoint_times=np.array(times),
        endpoint_lengths=np.array(lengths),
    )


# --------------------------------------------------------------------------
# artifacts
# --------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path, header, rows):
    """Comma-separated, header row, LF endings, floats at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_csv(path):
    """Read back a write_csv artifact: (header, list of rows of floats/strings)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = []
        for line in fh:
            cells = []
            for cell in line.rstrip("\n").split(","):
                try:
                    cells.append(float(cell))
                except ValueError:
                    cells.append(cell)
            rows.append(cells)
    return header, rows


def write_gnuplot_blocks(path, frames):
    """Gnuplot splot-compatible blocks: x u per line, blank line per frame."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for frame in frames:
            fh.write(f"# t = {_fmt(frame.time)} phase = {frame.phase}\n")
            for x, u in zip(frame.x, frame.u):
                fh.write(f"{_fmt(float(x))} {_fmt(float(u))}\n")
            fh.write("\n")


def write_surface_svg(path, frames, title):
    """Optional vector-graphics surface plot of (t, x, u) snapshots."""
    import matplotlib

    matplotlib.use("svg", force=False)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for frame in frames:
        ax.plot(frame.x, frame.u, lw=0.6,
                color=plt.cm.viridis(frame.time / max(frames[-1].time, 1e-12)))
    ax.set_xlabel("x")
    ax.set_ylabel("u(t, x)")
    ax.set_title(title)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# --------------------------------------------------------------------------
# running scenarios
# --------------------------------------------------------------------------

@dataclass
class RunRecord:
    """Outcome of one scenario run."""

    scenario: str
    report: IndexReport
    classification: str
    period_sup_norms: np.ndarray
    periods_run: int
    clamp_count: int
    orbit_min: float | None = None
    orbit_max: float | None = None
    orbit_residual: float | None = None
    artifacts: list = None


def run_scenario(scenario: Scenario, out_dir=None, chunk: int = 25,
                 snapshot_stride: int | None = None,
                 surface_plot: bool = False) -> RunRecord:
    """Run one scenario end to end.

    Simulates in chunks of periods until the tail rules classify the run
    (or the period budget is exhausted), then, for persistent runs,
    polishes the positive periodic state with the period map and
    summarizes its orbit.  When ``out_dir`` is given, CSV artifacts and
    a gnuplot block file are written there.
    """
    report = compute_index(scenario.params, scenario.rho, scenario.pulse)
    grid = scenario.grid
    stride = snapshot_stride or max(1, grid.steps_per_period // 4)
    output = OutputSpec(period_boundaries=True, stride=stride)

    state = initial_condition(scenario.v0_modes, grid, scenario.params.l0)
    snapshots = []
    norms = []
    clamp_count = 0
    done = 0
    classification = UNSPECIFIED
    while done < scenario.n_periods:
        n = min(chunk, scenario.n_periods - done)
        traj = simulate(scenario.params, scenario.rho, scenario.pulse, grid,
                        state, n, output=output, t_start=done * scenario.params.T)
        # period boundaries are shared between chunks; drop the duplicate
        snapshots.extend(traj.snapshots if not snapshots else traj.snapshots[1:])
        norms.extend(traj.period_sup_norms)
        clamp_count += traj.clamp_count
        state = traj.final_state
        done += n
        classification = classify(np.array(norms))
        if classification != UNSPECIFIED:
            break

    norms = np.array(norms)
    record = RunRecord(
        scenario=scenario.name,
        report=report,
        classification=classification,
        period_sup_norms=norms,
        periods_run=done,
        clamp_count=clamp_count,
        artifacts=[],
    )

    orbit = None
    if classification == PERSISTENCE:
        sol = period_map_fixed_point(scenario.params, scenario.rho,
                                     scenario.pulse, grid, state)
        if isinstance(sol, PeriodicSolution):
            orbit = sol
            record.orbit_min = float(sol.orbit.values.min())
            record.orbit_max = float(sol.orbit.values.max())
            record.orbit_residual = sol.residual

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        traj_all = Trajectory(snapshots=snapshots, period_sup_norms=norms,
                              clamp_count=clamp_count, grid=grid,
                              l0=scenario.params.l0, final_state=state)
        phys = reconstruct_physical(traj_all, scenario.rho)

        def path(fname):
            p = os.path.join(out_dir, fname)
            record.artifacts.append(p)
            return p

        write_csv(path("periods.csv"), ("period", "time", "sup_norm"),
                  ((i + 1, (i + 1) * scenario.params.T, float(v))
                   for i, v in enumerate(norms)))
        y = grid.y
        write_csv(path("field.csv"), ("t", "phase", "y", "v"),
                  ((s.time, s.phase, float(yy), float(vv))
                   for s in snapshots for yy, vv in zip(y, s.values)))
        write_csv(path("physical.csv"), ("t", "phase", "x", "u"),
                  ((f.time, f.phase, float(xx), float(uu))
                   for f in phys.frames for xx, uu in zip(f.x, f.u)))
        write_csv(path("domain_endpoint.csv"), ("t", "length"),
                  zip(phys.endpoint_times.tolist(),
                      phys.endpoint_lengths.tolist()))
        write_gnuplot_blocks(path("field.dat"), phys.frames)
        if orbit is not None:
            tstride = max(1, grid.steps_per_period // 64)
            write_csv(path("orbit.csv"), ("t", "y", "v"),
                      ((float(orbit.orbit.times[k]), float(yy), float(vv))
                       for k in range(0, len(orbit.orbit.times), tstride)
                       for yy, vv in zip(y, orbit.orbit.values[k])))
        _write_record(path("record.txt"), record)
        if surface_plot:
            write_surface_svg(path("surface.svg"), phys.frames, scenario.name)
    return record


def _write_record(path, record: RunRecord):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"scenario = {record.scenario}\n")
        for key, value in record.report.as_dict().items():
            fh.write(f"{key} = "
                     f"{'undefined-positive-growth' if value is None else _fmt(value)}\n")
        fh.write(f"classification = {record.classification}\n")
        fh.write(f"periods_run = {record.periods_run}\n")
        fh.write(f"clamp_count = {record.clamp_count}\n")
        if record.orbit_min is not None:
            fh.write(f"orbit_min = {_fmt(record.orbit_min)}\n")
            fh.write(f"orbit_max = {_fmt(record.orbit_max)}\n")
            fh.write(f"orbit_residual = {_fmt(record.orbit_residual)}\n")


# --------------------------------------------------------------------------
# parameter sweeps
# --------------------------------------------------------------------------

SWEEP_PATHS = ("rho.amplitude", "pulse.m", "pulse.a", "pulse.r", "pulse.b",
               "model.d", "model.T")


def _with_param(scenario: Scenario, path: str, value: float) -> Scenario:
    if path == "rho.amplitude":
        return replace(scenario,
                       rho=EvolutionRate.exp_cosine(value, scenario.params.T))
    if path == "model.d":
        params = replace(scenario.params, d=value)
        return replace(scenario, params=params)
    if path == "model.T":
        params = replace(scenario.params, T=value)
        rho = EvolutionRate(scenario.rho.kind, value, scenario.rho.amplitude)
        grid = Grid.for_model(params, ny=scenario.grid.ny,
                              steps_per_period=scenario.grid.steps_per_period)
        return replace(scenario, params=params, rho=rho, grid=grid)
    if path.startswith("pulse."):
        field_name = path.split(".", 1)[1]
        p = scenario.pulse
        kw = {"a": p.a, "m": p.m, "r": p.r, "b": p.b}
        if field_name not in kw:
            raise SweepPathError(f"bad pulse field {field_name!r}")
        kw[field_name] = value
        if p.kind == "beverton-holt":
            pulse = PulseFunction.beverton_holt(kw["a"], kw["m"])
        elif p.kind == "ricker":
            pulse = PulseFunction.ricker(kw["r"], kw["b"])
        else:
            raise SweepPathError(
                f"cannot sweep {path!r} on an identity pulse")
        return replace(scenario, pulse=pulse)
    raise SweepPathError(
        f"unknown parameter path {path!r}; valid paths: {', '.join(SWEEP_PATHS)}")


@dataclass(frozen=True)
class SweepPoint:
    value: float
    r0: float | None
    r0_star: float
    lambda_star: float
    index: float
    classification: str


@dataclass
class SweepResult:
    path: str
    points: list
    crossings: list


def _index_classification(report: IndexReport) -> str:
    if report.index > 1.0:
        return PERSISTENCE
    if report.index < 1.0:
        return EXTINCTION
    return UNSPECIFIED


def _sweep_point(args):
    scenario, path, value, do_simulate = args
    s = _with_param(scenario, path, value)
    report = compute_index(s.params, s.rho, s.pulse)
    if do_simulate:
        classification = run_scenario(s).classification
    else:
        classification = _index_classification(report)
    return SweepPoint(value=value, r0=report.r0, r0_star=report.r0_star,
                      lambda_star=report.lambda_star, index=report.index,
                      classification=classification)


def resolve_workers(workers=None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(base: Scenario, path: str, start: float, stop: float, count: int,
          out_dir=None, do_simulate: bool = False, workers=None) -> SweepResult:
    """Evaluate the reproduction index along one parameter axis.

    Emits (value, index, classification) points, locates every index = 1
    crossing by bisection on the growth exponent to 1e-6 in the
    parameter, and optionally backs each point with a full simulation.
    Simulation-backed sweeps fan out to a process pool sized by the
    ``EVODOM_WORKERS`` environment variable (default: machine
    parallelism); index-only sweeps are microseconds per point and run
    serially.  Results are always merged in input order and any files
    are written by the coordinator.
    """
    if path not in SWEEP_PATHS:
        raise SweepPathError(
            f"unknown parameter path {path!r}; valid paths: {', '.join(SWEEP_PATHS)}")
    if count < 2:
        raise ValueError("need at least 2 sweep points")
    values = np.linspace(start, stop, count)
    jobs = [(base, path, float(v), do_simulate) for v in values]
    n_workers = resolve_workers(workers)
    if do_simulate and n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(job) for job in jobs]

    def exponent(v):
        s = _with_param(base, path, float(v))
        return compute_index(s.params, s.rho, s.pulse).lambda_star

    crossings = []
    for left, right in zip(points[:-1], points[1:]):
        fl, fr = left.lambda_star, right.lambda_star
        if fl == 0.0:
            crossings.append(left.value)
            continue
        if fl * fr < 0.0:
            a, b = left.value, right.value
            fa = fl
            while abs(b - a) > 1e-6:
                mid = 0.5 * (a + b)
                fm = exponent(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            crossings.append(0.5 * (a + b))

    result = SweepResult(path=path, points=points, crossings=crossings)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, "sweep.csv"),
                  ("value", "r0", "r0_star", "lambda_star", "index",
                   "classification"),
                  ((p.value,
                    "undefined-positive-growth" if p.r0 is None else p.r0,
                    p.r0_star, p.lambda_star, p.index, p.classification)
                   for p in points))
        write_csv(os.path.join(out_dir, "crossings.csv"), ("crossing",),
                  ((c,) for c in crossings))
    return result
