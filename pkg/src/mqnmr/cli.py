"""Command-line front end.

Subcommands ``scan``, ``zeros``, ``maxima`` and ``protocol`` run one task on
one spin system and write CSV; ``config-dump`` prints the resolved run
configuration as JSON so a recipe can be committed and replayed with
``--config``.  Flags override fields of the config file.

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import DEFAULT_MAX_SPINS, build_basis, check_spin_count, equilibrium_state, intermediate_state
from .coherence import NORMALIZE_IZ2, NORMALIZE_INITIAL, mq_spectrum, normalization_for
from .dynamics import evolve_series, propagator_for
from .errors import ConfigError, DomainError, MQNMRError, NumericError, SizeError
from .geometry import (
    chain_couplings,
    cyclopentane_couplings,
    load_couplings,
    rectangle_couplings,
    ring_couplings,
)
from .protocol import (
    DEFAULT_DT,
    DEFAULT_THRESHOLD,
    IDENTICALLY_ZERO,
    ProtocolSchedule,
    find_homqc_maxima,
    find_nd0q_zeros,
    run_protocol,
)

log = logging.getLogger("mqnmr")

TASKS = ("scan", "zeros", "maxima", "protocol")
SYSTEM_TYPES = ("ring", "chain", "rectangle", "cyclopentane", "custom")
INITIAL_STATES = ("equilibrium", "up-down", "down-up")
FIXED_SIZES = {"rectangle": 4, "cyclopentane": 10}

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


@dataclass
class SystemSpec:
    type: str = "ring"
    n: int | None = None
    d1: float = 1.0
    couplings: str | None = None


@dataclass
class RunConfig:
    task: str = "scan"
    system: SystemSpec = field(default_factory=SystemSpec)
    initial: str = "equilibrium"
    t_max: float = 10.0
    dt: float = DEFAULT_DT
    threshold: float = DEFAULT_THRESHOLD
    tau1: float | None = None
    tau2: float | None = None
    filter: int | None = None
    saturate: bool = False
    normalize: str = NORMALIZE_IZ2
    blocked: bool = False
    workers: int = 1
    out: str | None = None
    max_spins: int = DEFAULT_MAX_SPINS

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_TOP_KEYS = {f.name for f in dataclasses.fields(RunConfig)}
_SYSTEM_KEYS = {f.name for f in dataclasses.fields(SystemSpec)}


def _positive(name, value):
    if not (isinstance(value, (int, float)) and not isinstance(value, bool)
            and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite number > 0, got {value!r}")
    return float(value)


def _integer(name, value, lo=None, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise ConfigError(f"{name}={value} below minimum {lo}")
    if hi is not None and value > hi:
        raise ConfigError(f"{name}={value} above maximum {hi}")
    return value


def _validate(cfg: RunConfig, base_dir: Path) -> RunConfig:
    if cfg.task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {cfg.task!r}")
    cfg.max_spins = _integer("max_spins", cfg.max_spins, lo=1)
    s = cfg.system
    if s.type not in SYSTEM_TYPES:
        raise ConfigError(f"system.type must be one of {SYSTEM_TYPES}, got {s.type!r}")
    if s.type in FIXED_SIZES:
        fixed = FIXED_SIZES[s.type]
        if s.n is not None and s.n != fixed:
            raise ConfigError(f"system.n must be {fixed} for {s.type}, got {s.n}")
        s.n = fixed
    if s.n is None:
        raise ConfigError(f"system.n is required for system type {s.type!r}")
    s.n = _integer("system.n", s.n)
    check_spin_count(s.n, cfg.max_spins, minimum=2 if s.type in ("ring", "chain") else 1)
    s.d1 = float(s.d1)
    if not math.isfinite(s.d1):
        raise ConfigError(f"system.d1 must be finite, got {s.d1!r}")
    if s.type == "custom":
        if not s.couplings:
            raise ConfigError("system.couplings (file path) is required for custom systems")
        path = Path(s.couplings)
        if not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            raise ConfigError(f"system.couplings file not found: {path}")
        s.couplings = str(path)
    elif s.couplings is not None:
        raise ConfigError(f"system.couplings only applies to custom systems, not {s.type!r}")
    if cfg.initial not in INITIAL_STATES:
        raise ConfigError(f"initial must be one of {INITIAL_STATES}, got {cfg.initial!r}")
    if cfg.normalize not in (NORMALIZE_IZ2, NORMALIZE_INITIAL):
        raise ConfigError(f"normalize must be 'iz2' or 'initial', got {cfg.normalize!r}")
    cfg.t_max = _positive("t_max", cfg.t_max)
    cfg.dt = _positive("dt", cfg.dt)
    if cfg.dt > cfg.t_max:
        raise DomainError(f"dt={cfg.dt} must not exceed t_max={cfg.t_max}")
    cfg.threshold = _positive("threshold", cfg.threshold)
    cfg.workers = _integer("workers", cfg.workers, lo=1)
    cfg.saturate = bool(cfg.saturate)
    cfg.blocked = bool(cfg.blocked)
    if cfg.task == "protocol":
        for name in ("tau1", "tau2", "filter"):
            if getattr(cfg, name) is None:
                raise ConfigError(f"{name} is required for the protocol task")
        for name in ("tau1", "tau2"):
            v = getattr(cfg, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                raise DomainError(f"{name} must be a finite number >= 0, got {v!r}")
            setattr(cfg, name, float(v))
        cfg.filter = _integer("filter", cfg.filter, lo=0, hi=s.n)
    elif cfg.filter is not None:
        cfg.filter = _integer("filter", cfg.filter, lo=0, hi=s.n)
    return cfg


def parse_config(source=None, overrides: dict | None = None) -> RunConfig:
    """Build a validated :class:`RunConfig`.

    Args:
        source: path to a JSON config, an already-parsed ``dict``, or None.
        overrides: flat field values that replace config values; system
            fields use the ``system.`` prefix (``"system.n"``).

    Raises:
        ConfigError: unknown keys, malformed JSON, or a violated constraint.
    """
    base_dir = Path.cwd()
    if source is None:
        raw = {}
    elif isinstance(source, dict):
        raw = json.loads(json.dumps(source))
    else:
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        base_dir = path.parent
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    unknown = sorted(set(raw) - _TOP_KEYS)
    system_raw = raw.get("system", {})
    if not isinstance(system_raw, dict):
        raise ConfigError("config field 'system' must be an object")
    unknown += sorted(f"system.{k}" for k in set(system_raw) - _SYSTEM_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    system = SystemSpec(**system_raw)
    top = {k: v for k, v in raw.items() if k != "system"}
    cfg = RunConfig(system=system, **top)
    for key, value in (overrides or {}).items():
        if key.startswith("system."):
            setattr(cfg.system, key.split(".", 1)[1], value)
        else:
            setattr(cfg, key, value)
    return _validate(cfg, base_dir)


def build_system(cfg: RunConfig):
    s = cfg.system
    if s.type == "ring":
        return ring_couplings(s.n, s.d1, cfg.max_spins)
    if s.type == "chain":
        return chain_couplings(s.n, s.d1, cfg.max_spins)
    if s.type == "rectangle":
        return rectangle_couplings()
    if s.type == "cyclopentane":
        return cyclopentane_couplings()
    return load_couplings(s.couplings, s.n, cfg.max_spins)


def build_initial(cfg: RunConfig, basis):
    if cfg.initial == "equilibrium":
        return equilibrium_state(basis)
    return intermediate_state(basis, +1 if cfg.initial == "up-down" else -1)


def _fmt(x) -> str:
    return f"{float(x):.15e}"


@contextlib.contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def emit_scan_csv(spectra, times, path=None) -> None:
    """Write one row per time: ``t, J_-NQ .. J_+NQ, J0_diag, J0_nondiag``."""
    times = list(times)
    if len(spectra) != len(times):
        raise ValueError(f"{len(spectra)} spectra for {len(times)} times")
    if not spectra:
        raise ValueError("nothing to write")
    n = spectra[0].n_spins
    header = ["t"] + [f"J_{k}Q" for k in range(-n, n + 1)] + ["J0_diag", "J0_nondiag"]
    with _open_out(path) as fh:
        fh.write(",".join(header) + "\n")
        for t, sp in zip(times, spectra):
            row = [t, *sp.orders, sp.j0_diag, sp.j0_nondiag]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def emit_protocol_report(result, path=None) -> None:
    """Write ``p,diagonal`` rows (1-based) followed by a ``#`` summary block."""
    s = result.schedule
    with _open_out(path) as fh:
        fh.write("p,diagonal\n")
        for p, v in enumerate(result.diagonal, start=1):
            fh.write(f"{p},{_fmt(v)}\n")
        fh.write(f"# diag_deviation,{_fmt(result.diag_deviation)}\n")
        fh.write(f"# offdiag_norm,{_fmt(result.offdiag_norm)}\n")
        fh.write(f"# sign_pattern,{''.join(result.sign_pattern)}\n")
        fh.write(f"# tau1,{_fmt(s.tau1)}\n")
        fh.write(f"# tau2,{_fmt(s.tau2)}\n")
        fh.write(f"# filter_order,{s.filter_order}\n")
        fh.write(f"# saturate,{str(s.saturate).lower()}\n")


def _time_grid(cfg):
    return np.linspace(0.0, cfg.t_max, int(round(cfg.t_max / cfg.dt)) + 1)


def run(cfg: RunConfig) -> None:
    system = build_system(cfg)
    basis = build_basis(system.n_spins, cfg.max_spins)
    rho0 = build_initial(cfg, basis)
    if cfg.task == "scan":
        times = _time_grid(cfg)
        norm = normalization_for(cfg.normalize, basis, rho0)
        prop = propagator_for(system, cfg.blocked, cfg.max_spins)
        spectra = [mq_spectrum(r, basis, norm)
                   for r in evolve_series(prop, rho0, times, cfg.workers)]
        emit_scan_csv(spectra, times, cfg.out)
    elif cfg.task == "zeros":
        zeros = find_nd0q_zeros(system, rho0, cfg.t_max, cfg.dt, cfg.threshold,
                                cfg.blocked, cfg.max_spins)
        with _open_out(cfg.out) as fh:
            fh.write("time\n")
            if zeros is IDENTICALLY_ZERO:
                fh.write("# identically zero\n")
            else:
                fh.writelines(f"{_fmt(t)}\n" for t in zeros)
    elif cfg.task == "maxima":
        peaks = find_homqc_maxima(system, rho0, cfg.t_max, cfg.dt, cfg.blocked, cfg.max_spins)
        with _open_out(cfg.out) as fh:
            fh.write("time,intensity\n")
            fh.writelines(f"{_fmt(t)},{_fmt(v)}\n" for t, v in peaks)
    else:
        schedule = ProtocolSchedule(cfg.tau1, cfg.filter, cfg.tau2, cfg.saturate)
        result = run_protocol(system, schedule, rho0, cfg.blocked, cfg.max_spins)
        emit_protocol_report(result, cfg.out)


def _add_common(p):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=None, help="JSON run configuration")
    p.add_argument("--system", dest="system.type", choices=SYSTEM_TYPES, default=S)
    p.add_argument("--n", dest="system.n", type=int, default=S)
    p.add_argument("--d1", dest="system.d1", type=float, default=S)
    p.add_argument("--couplings", dest="system.couplings", default=S,
                   help="coupling file, one 'j,k,value' per line")
    p.add_argument("--initial", choices=INITIAL_STATES, default=S)
    p.add_argument("--tmax", dest="t_max", type=float, default=S)
    p.add_argument("--dt", type=float, default=S)
    p.add_argument("--tau1", type=float, default=S)
    p.add_argument("--tau2", type=float, default=S)
    p.add_argument("--filter", type=int, default=S)
    p.add_argument("--saturate", action="store_true", default=S)
    p.add_argument("--normalize", choices=(NORMALIZE_IZ2, NORMALIZE_INITIAL), default=S)
    p.add_argument("--threshold", type=float, default=S)
    p.add_argument("--blocked", action="store_true", default=S,
                   help="propagate parity sectors separately")
    p.add_argument("--workers", type=int, default=S)
    p.add_argument("--out", default=S, help="output path (default stdout)")
    p.add_argument("--max-spins", dest="max_spins", type=int, default=S)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqnmr", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in TASKS:
        _add_common(sub.add_parser(name))
    dump = sub.add_parser("config-dump", help="print the resolved configuration as JSON")
    _add_common(dump)
    dump.add_argument("--task", choices=TASKS, default=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    verbose = args.pop("verbose")
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if command != "config-dump":
        args["task"] = command
    try:
        cfg = parse_config(config_path, args)
        if command == "config-dump":
            with _open_out(cfg.out) as fh:
                fh.write(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
        else:
            run(cfg)
    except (ConfigError, SizeError) as exc:
        print(f"mqnmr: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"mqnmr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, MQNMRError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"mqnmr: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
