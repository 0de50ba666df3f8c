"""Command-line front end: configuration, run orchestration, CSV artifacts.

Configuration is plain ``key = value`` lines with ``#`` comments; every
run writes its artifacts plus a ``manifest.txt`` echoing the resolved
configuration and the SHA-256 of each emitted file.  Exit codes: 0 ok,
2 configuration error, 3 numerical abort, 4 spectrum coverage too small.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import euler_arnold, jacobi, morse, sphere
from .euler_arnold import SolverConfig, simulate
from .flow import NumericalAbort, save_flowmap
from .presets import initial_stream
from .spectral import grid, save_field


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    beta: float = 0.0
    n: int = 64
    dt: float = 1e-3
    t_final: float = 1.0
    k_cutoff: int = 6
    ic: str = "cosy"
    snapshot_stride: int = 50
    n_max: int = 30
    spectrum: str = "torus:16"
    c_const: float = 16.0
    delta: float = 1.0
    t_horizon: float = float(np.pi)


_KEYS = {
    "beta": ("beta", float),
    "N": ("n", int),
    "dt": ("dt", float),
    "t_final": ("t_final", float),
    "K": ("k_cutoff", int),
    "ic": ("ic", str),
    "snapshot_stride": ("snapshot_stride", int),
    "n_max": ("n_max", int),
    "spectrum": ("spectrum", str),
    "C": ("c_const", float),
    "delta": ("delta", float),
    "T": ("t_horizon", float),
}


def _validate(cfg: RunConfig):
    if not 0.0 <= cfg.beta <= 1.0:
        raise ConfigError("beta out of range [0, 1]")
    if cfg.n < 16 or cfg.n % 2:
        raise ConfigError("N must be an even integer >= 16")
    if cfg.dt <= 0:
        raise ConfigError("dt must be positive")
    if cfg.t_final <= 0:
        raise ConfigError("t_final must be positive")
    if cfg.k_cutoff < 2:
        raise ConfigError("K must be >= 2")
    if cfg.snapshot_stride < 1:
        raise ConfigError("snapshot_stride must be >= 1")
    if cfg.n_max < 2:
        raise ConfigError("n_max must be >= 2")
    if cfg.delta <= 0:
        raise ConfigError("delta must be positive")
    if cfg.c_const < 0:
        raise ConfigError("C must be nonnegative")
    if cfg.t_horizon <= 0:
        raise ConfigError("T must be positive")


def _apply_kv(cfg: RunConfig, key: str, value: str, where: str):
    if key not in _KEYS:
        raise ConfigError(f"unknown key {key!r} ({where})")
    attr, typ = _KEYS[key]
    try:
        setattr(cfg, attr, typ(value))
    except ValueError:
        raise ConfigError(f"bad value {value!r} for key {key!r} ({where})") from None


def parse_config(text: str, cfg: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines; unknown keys rejected with line number."""
    cfg = cfg if cfg is not None else RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        _apply_kv(cfg, key, value, f"line {lineno}")
    _validate(cfg)
    return cfg


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, command: str, cfg: RunConfig, artifacts: list[Path],
                    deterministic: bool):
    lines = [f"command = {command}", f"deterministic = {deterministic}"]
    for f in fields(cfg):
        lines.append(f"{f.name} = {getattr(cfg, f.name)}")
    for a in artifacts:
        lines.append(f"sha256 {a.name} = {_sha256(a)}")
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _parse_spectrum(spec: str) -> morse.Spectrum:
    try:
        kind, num = spec.split(":")
        num = int(num)
    except ValueError:
        raise ConfigError(f"bad spectrum spec {spec!r}, want torus:KMAX or sphere:NMAX") \
            from None
    if kind == "torus":
        return morse.Spectrum.torus(num)
    if kind == "sphere":
        return morse.Spectrum.sphere(num)
    raise ConfigError(f"unknown spectrum kind {kind!r}")


# ---------------------------------------------------------------------------
# commands

def cmd_simulate(cfg: RunConfig, out: Path) -> list[Path]:
    g = grid(cfg.n)
    psi0 = initial_stream(cfg.ic, g)
    solver = SolverConfig(beta=cfg.beta, dt=cfg.dt, t_final=cfg.t_final, n=cfg.n,
                          snapshot_stride=cfg.snapshot_stride)

    def on_abort(record):
        if record.thetas:
            save_field(out / "theta_last.gsqg", record.thetas[-1])

    record = simulate(psi0, solver, on_abort=on_abort)
    diag = out / "diagnostics.csv"
    diag.write_text(euler_arnold.diagnostics_csv(record.diagnostics_rows))
    theta_ck = out / "theta_final.gsqg"
    save_field(theta_ck, record.thetas[-1])
    flow_ck = out / "gamma_final.gsqgf"
    save_flowmap(flow_ck, record.diffeos[-1].forward)
    return [diag, theta_ck, flow_ck]


def cmd_jacobi(cfg: RunConfig, out: Path) -> list[Path]:
    g = grid(cfg.n)
    psi0 = initial_stream(cfg.ic, g)
    solver = SolverConfig(beta=cfg.beta, dt=cfg.dt, t_final=cfg.t_final, n=cfg.n,
                          snapshot_stride=cfg.snapshot_stride)
    record = simulate(psi0, solver)
    basis = jacobi.make_basis(g, cfg.k_cutoff, cfg.beta)
    lams = jacobi.lambda_samples(record, basis, cfg.beta)
    phi = jacobi.evolve_phi(record, basis, cfg.beta, lambdas=lams)
    _, _, resid = jacobi.omega_gamma_split(record, basis, cfg.beta, phi, lambdas=lams)
    report = jacobi.detect_conjugate(phi)
    conj = out / "conjugate.csv"
    conj.write_text(report.csv())
    (out / "decomposition_residual.txt").write_text(f"{resid:.17g}\n")
    return [conj, out / "decomposition_residual.txt"]


def cmd_conjugate_scan(cfg: RunConfig, out: Path) -> list[Path]:
    times = np.linspace(0.0, cfg.t_horizon, 801)
    phi = sphere.sphere_phi_samples(range(1, cfg.n_max + 1), cfg.beta, times)
    report = jacobi.detect_conjugate(phi)
    conj = out / "conjugate.csv"
    conj.write_text(report.csv())
    return [conj]


def cmd_sphere_example(cfg: RunConfig, out: Path) -> list[Path]:
    scan = out / "scan.csv"
    scan.write_text(sphere.cluster_scan_csv(cfg.beta, cfg.n_max))
    return [scan]


def cmd_morse_bound(cfg: RunConfig, out: Path) -> list[Path]:
    if cfg.beta >= 1.0:
        raise ConfigError("morse-bound requires beta < 1")
    spectrum = _parse_spectrum(cfg.spectrum)
    inp = morse.MorseInput(cfg.delta, cfg.c_const, cfg.t_horizon, cfg.beta, spectrum)
    bound = morse.morse_bound(inp)
    path = out / "bound.csv"
    path.write_text(morse.bound_csv_rows(
        [(cfg.beta, cfg.t_horizon, cfg.delta, cfg.c_const, bound)]))
    return [path]


def cmd_verify(cfg: RunConfig, out: Path) -> list[Path]:
    """Fast invariant suite; prints one PASS/FAIL line per property."""
    from . import verify as verify_mod

    results = verify_mod.run_all()
    ok = True
    lines = ["property,passed,measure"]
    for name, passed, measure in results:
        print(f"{'PASS' if passed else 'FAIL'} {name} ({measure:.3e})")
        lines.append(f"{name},{int(passed)},{measure:.17g}")
        ok = ok and passed
    path = out / "verify.csv"
    path.write_text("\n".join(lines) + "\n")
    if not ok:
        raise NumericalAbort("verify suite reported failures")
    return [path]


_COMMANDS = {
    "simulate": cmd_simulate,
    "jacobi": cmd_jacobi,
    "conjugate-scan": cmd_conjugate_scan,
    "sphere-example": cmd_sphere_example,
    "morse-bound": cmd_morse_bound,
    "verify": cmd_verify,
}

_DEFAULTS_HELP = """\
config keys (defaults): beta (0), N (64), dt (1e-3), t_final (1), K (6),
ic (cosy | shear | random:SEED:KMAX), snapshot_stride (50), n_max (30),
spectrum (torus:16), C (16), delta (1), T (pi)
"""


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sqglab",
        description="Generalized SQG geodesic laboratory",
        epilog=_DEFAULTS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory")
    parser.add_argument("--deterministic", action="store_true",
                        help="force sequential, bit-reproducible runs")
    args = parser.parse_args(argv)

    try:
        cfg = RunConfig()
        if args.config is not None:
            cfg = parse_config(args.config.read_text(), cfg)
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
            key, value = (s.strip() for s in item.split("=", 1))
            _apply_kv(cfg, key, value, "--set")
        _validate(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        artifacts = _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except morse.CoverageError as exc:
        print(f"coverage error: {exc}", file=sys.stderr)
        return 4
    except (NumericalAbort, euler_arnold.CflViolation, np.linalg.LinAlgError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    _write_manifest(out, args.command, cfg, artifacts, args.deterministic)
    return 0


if __name__ == "__main__":
    sys.exit(main())
