"""Parameter sweeps over the named state families and spin-chain ground states, written as CSV."""
from __future__ import annotations

import ast
import io
import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .coherence import OUTPUTS, CoherenceReport, decomposition_report
from .minimizers import OptimOptions
from .quantum import QuantumState, load_state
from .spin_models import ModelSpec, ground_state
from .states import werner_ghz, w_state

SCENARIOS = ("ising2", "werner-ghz", "w-state", "xxz", "file")

GRID_PARAMS = {
    "ising2": ("J", "lambda", "epsilon"),
    "werner-ghz": ("mu", "phi"),
    "w-state": ("phi", "theta"),
    "xxz": ("delta", "J"),
    "file": (),
}

# default grids; the figure axes carry no numeric annotation, so these ranges are choices
DEFAULTS = {
    "ising2": dict(param="J", start=0.0, stop=3.0, points=31, endpoint=True,
                   fixed={"lambda": 1.0, "epsilon": 0.2}),
    "werner-ghz": dict(param="mu", start=0.0, stop=1.0, points=21, endpoint=True,
                       fixed={"phi": math.pi / 4}),
    "w-state": dict(param="phi", start=0.0, stop=2 * math.pi, points=64, endpoint=False,
                    fixed={"theta": math.pi / 4}),
    "xxz": dict(param="delta", start=-2.0, stop=6.0, points=33, endpoint=True,
                fixed={"J": 1.0, "N": 10, "boundary": "periodic"},
                outputs=("pairwise", "bipartitions", "monogamy"), scope="first"),
    "file": dict(param="", start=0.0, stop=0.0, points=1, endpoint=True, fixed={}),
}

N_SITES = {"ising2": 2, "werner-ghz": 3, "w-state": 3}
SLOW_OUTPUTS = {"c_total", "c_local", "c_intrinsic"}
SLOW_N = 8


class ConfigError(ValueError):
    pass


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.Pow: operator.pow, ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text: str) -> float:
    """Arithmetic on numbers and ``pi``, e.g. ``pi/4`` or ``-2.5``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(text)

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


@dataclass
class SweepConfig:
    scenario: str
    param: str
    start: float
    stop: float
    points: int
    endpoint: bool = True
    fixed: dict = field(default_factory=dict)
    optim: OptimOptions = field(default_factory=OptimOptions)
    outputs: tuple[str, ...] = OUTPUTS
    scope: str = "all"
    family: str = "product-basis"
    output_path: str | None = None
    threads: int = 1
    allow_slow: bool = False
    path: str | None = None

    @property
    def n_sites(self) -> int:
        if self.scenario == "xxz":
            return int(self.fixed["N"])
        if self.scenario == "file":
            return load_state(self.path).n_sites
        return N_SITES[self.scenario]

    def grid(self) -> np.ndarray:
        if self.scenario == "file":
            return np.zeros(1)
        return np.linspace(self.start, self.stop, self.points, endpoint=self.endpoint)

    def validate(self) -> "SweepConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown or not self.outputs:
            raise ConfigError(f"outputs must be a nonempty subset of {', '.join(OUTPUTS)}")
        if self.scope not in ("all", "first"):
            raise ConfigError("scope must be 'all' or 'first'")
        if self.family not in ("product-basis", "mixture"):
            raise ConfigError("family must be 'product-basis' or 'mixture'")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.scenario == "file":
            if not self.path:
                raise ConfigError("scenario 'file' needs path=<state file>")
            if not Path(self.path).exists():
                raise ConfigError(f"state file not found: {self.path}")
            return self
        if self.param not in GRID_PARAMS[self.scenario]:
            raise ConfigError(f"grid parameter {self.param!r} is not valid for {self.scenario}; "
                              f"choose from {', '.join(GRID_PARAMS[self.scenario])}")
        if self.points < 2:
            raise ConfigError("grid needs at least 2 points")
        f = self.fixed
        if self.scenario == "werner-ghz":
            mus = self.grid() if self.param == "mu" else [f.get("mu", 1.0)]
            if min(mus) < 0 or max(mus) > 1:
                raise ConfigError("mu must stay within [0, 1]")
        if self.scenario == "xxz":
            if int(f["N"]) < 2:
                raise ConfigError("xxz needs N >= 2")
            if 2 ** int(f["N"]) > 2 ** 14:
                raise ConfigError("xxz N above 14 exceeds the dimension guard")
            if f.get("boundary", "periodic") not in ("periodic", "open"):
                raise ConfigError("boundary must be periodic or open")
            if int(f["N"]) >= SLOW_N and SLOW_OUTPUTS & set(self.outputs) and not self.allow_slow:
                raise ConfigError(f"outputs {sorted(SLOW_OUTPUTS & set(self.outputs))} at N >= {SLOW_N} are "
                                  "the slow path; pass --allow-slow to request them")
        return self


def _value(key: str, text: str):
    if key in ("points", "N", "restarts", "max_iter", "seed", "ansatz_k", "threads"):
        v = parse_number(text)
        if v != int(v):
            raise ConfigError(f"{key} must be an integer")
        return int(v)
    if key in ("start", "stop", "tol", "lambda", "epsilon", "mu", "phi", "theta", "J", "delta"):
        return parse_number(text)
    if key in ("endpoint", "allow_slow"):
        if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key} must be a boolean")
        return text.lower() in ("true", "1", "yes")
    if key == "outputs":
        return tuple(t.strip() for t in text.split(",") if t.strip())
    return text.strip()


KNOWN_KEYS = {
    "scenario", "param", "start", "stop", "points", "endpoint", "lambda", "epsilon", "mu", "phi", "theta", "J",
    "delta", "N", "boundary", "restarts", "max_iter", "tol", "seed", "ansatz_k", "outputs", "scope", "family",
    "out", "threads", "allow_slow", "path",
}
FIXED_KEYS = ("lambda", "epsilon", "mu", "phi", "theta", "J", "delta", "N", "boundary")


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def build_config(raw: dict) -> SweepConfig:
    """Config from string key/values (file entries already merged with overrides)."""
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "scenario" not in raw:
        raise ConfigError("config needs a scenario")
    vals = {k: _value(k, v) for k, v in raw.items()}
    scenario = vals["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    d = DEFAULTS[scenario]
    fixed = dict(d["fixed"])
    fixed.update({k: vals[k] for k in FIXED_KEYS if k in vals})
    optim = OptimOptions(
        restarts=vals.get("restarts"),
        max_iterations=vals.get("max_iter", 2000),
        objective_tolerance=vals.get("tol", 1e-9),
        seed=vals.get("seed", 0),
        K_override=vals.get("ansatz_k"),
    )
    return SweepConfig(
        scenario=scenario,
        param=vals.get("param", d["param"]),
        start=vals.get("start", d["start"]),
        stop=vals.get("stop", d["stop"]),
        points=vals.get("points", d["points"]),
        endpoint=vals.get("endpoint", d["endpoint"]),
        fixed=fixed,
        optim=optim,
        outputs=vals.get("outputs", d.get("outputs", OUTPUTS)),
        scope=vals.get("scope", d.get("scope", "all")),
        family=vals.get("family", "product-basis"),
        output_path=vals.get("out"),
        threads=vals.get("threads", 1),
        allow_slow=vals.get("allow_slow", False),
        path=vals.get("path"),
    ).validate()


def state_at(config: SweepConfig, value: float) -> QuantumState:
    p = dict(config.fixed)
    if config.param:
        p[config.param] = value
    if config.scenario == "ising2":
        return ground_state(ModelSpec("ising2", N=2, J=p["J"], lam=p["lambda"], eps=p["epsilon"])).state
    if config.scenario == "werner-ghz":
        return werner_ghz(p.get("mu", 1.0), p.get("phi", math.pi / 4))
    if config.scenario == "w-state":
        return w_state(p.get("theta", math.pi / 4), p.get("phi", 0.0))
    if config.scenario == "xxz":
        spec = ModelSpec("xxz", N=int(p["N"]), J=p["J"], delta=p.get("delta", 1.0), boundary=p["boundary"])
        return ground_state(spec).state
    return load_state(config.path)


def columns(config: SweepConfig) -> list[str]:
    """Ordered CSV header for a config; independent of the computed values."""
    out, N = set(config.outputs), config.n_sites
    cols = ["param"]
    cols += [c for c in ("c_total", "c_local", "c_intrinsic") if c in out]
    if "per_site" in out:
        cols += [f"c_site_{n}" for n in range(1, N + 1)]
    if "pairwise" in out:
        if config.scope == "all":
            cols += [f"c_pair_{m}_{n}" for m in range(1, N + 1) for n in range(m + 1, N + 1)]
        else:
            cols += [f"c_pair_1_{n}" for n in range(2, N + 1)]
    if "bipartitions" in out:
        sites = range(1, N + 1) if config.scope == "all" else [1]
        cols += [f"c_bipart_{n}_rest" for n in sites]
    if "c_intrinsic" in out:
        cols.append("c_full_split")
    if "monogamy" in out:
        cols.append("monogamy")
    if {"c_total", "c_local", "c_intrinsic"} <= out:
        cols.append("slack_eq6")
    if {"c_total", "per_site", "c_intrinsic"} <= out:
        cols.append("slack_eq7")
    cols.append("converged")
    return cols


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v) + 0.0:.9g}"


def evaluate_point(config: SweepConfig, index: int, value: float) -> CoherenceReport:
    opts = config.optim.with_seed(config.optim.seed ^ index)
    return decomposition_report(state_at(config, value), None, opts, config.outputs, config.scope, config.family)


def run_sweep(config: SweepConfig) -> str:
    """CSV text with one row per grid point, in grid order.

    Point i runs with seed ``optim.seed ^ i``, so the bytes do not depend on
    the worker count.
    """
    grid = config.grid()
    n = len(grid)
    if config.threads == 1:
        reports = [evaluate_point(config, i, v) for i, v in enumerate(grid)]
    else:
        # the small dense problems hold the GIL, so grid points go to worker processes
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            reports = list(pool.map(evaluate_point, [config] * n, range(n), grid))
    cols = columns(config)
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for value, rep in zip(grid, reports):
        rec = dict(rep.records())
        rec["param"] = value
        buf.write(",".join(fmt(rec[c]) for c in cols) + "\n")
    text = buf.getvalue()
    if config.output_path:
        with open(config.output_path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def read_csv(text: str) -> dict[str, np.ndarray]:
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return {h: data[:, i] for i, h in enumerate(header)}


def with_overrides(config: SweepConfig, **changes) -> SweepConfig:
    return replace(config, **changes).validate()
