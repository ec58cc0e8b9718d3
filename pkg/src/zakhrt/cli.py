"""Command-line entry point.

Settings are merged as built-in defaults < JSON config (--config) < flags.
Exit codes: 0 success, 2 configuration error, 3 I/O error.  A certificate
verdict never changes the exit code.
"""
import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ._numeric import is_power_of_two
from .certify import CertifyConfig, TFSystem, certify
from .functions import AnalyticFunction, TFPoint
from .io import (ConfigError, modulus_image, parse_real, write_json, write_orbit_csv,
                 write_pgm, write_series_csv, write_zak_csv)
from .torus import TorusVector, classify_generator, default_height, orbit, orbit_discrepancy
from .zak import ZakGridSpec, check_quasi_periodicity, check_unitarity, identity_sweep, zak_transform
from .zeros import certify_finite_zero_set

COMMANDS = ("zak", "zeros", "orbit", "certify", "identities")
DEFAULT_M = {"zak": 64, "zeros": 128, "identities": 32}
DEFAULT_LATTICE = [[0, 0], [1, 0], [0, 1], [1, 1]]


@dataclass
class RunConfig:
    command: str
    fn: str = "gaussian"
    a: float = 1.0
    n: int = 1
    M: int = None
    T: int = None
    out: str = "."
    seed: int = 0
    gamma: list = None
    z0: list = None
    m: int = 100000
    boxes: int = 8
    Q: int = 10 ** 4
    H: int = None
    m_max: int = 100
    lattice: list = None
    distinguished: list = None
    draws: int = 100
    threshold: float = None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "function" in d:
            fn = d.pop("function")
            d.setdefault("fn", fn.get("kind", "gaussian"))
            d.setdefault("a", fn.get("a", 1.0))
            d.setdefault("n", fn.get("n", 1))
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    def function(self):
        try:
            return AnalyticFunction(self.fn, int(self.n), float(self.a))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        f = self.function()
        if self.M is not None and not is_power_of_two(self.M):
            raise ConfigError("resolution must be a power of two")
        if self.M is not None and self.M < 2:
            raise ConfigError("resolution must be at least 2")
        if self.T is not None and self.T < 1:
            raise ConfigError("window T must be a positive integer")
        for name in ("m", "boxes", "Q", "m_max", "draws"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.boxes < 2:
            raise ConfigError("boxes must be at least 2")
        if self.H is not None and self.H < 1:
            raise ConfigError("H must be positive")
        if self.threshold is not None and self.threshold <= 0:
            raise ConfigError("threshold must be positive")
        return f

    def grid_spec(self, f):
        M = self.M or DEFAULT_M.get(self.command, 64)
        return ZakGridSpec(f.n, M, self.T or f.default_window())

    def point(self, n):
        if self.distinguished is None:
            raise ConfigError("distinguished point required (x..., y...)")
        vals = [parse_real(v) for v in self.distinguished]
        if len(vals) != 2 * n:
            raise ConfigError(f"distinguished point needs {2 * n} entries")
        return TFPoint(tuple(vals[:n]), tuple(vals[n:]))

    def torus_gamma(self, n):
        if self.gamma is not None:
            vals = [parse_real(v) for v in self.gamma]
            if len(vals) != 2 * n:
                raise ConfigError(f"gamma needs {2 * n} entries")
            return TorusVector.of(vals)
        p = self.point(n)
        return TorusVector.of([-v for v in p.x] + list(p.y))


def _lattice_arg(text):
    try:
        return [[int(v) for v in chunk.split(",")] for chunk in text.split(";") if chunk.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lattice {text!r}; use 'l,m;l,m'") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="zakhrt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--fn", help="gaussian | two_sided_exponential | box_indicator")
        p.add_argument("--a", type=float, help="decay rate of the two-sided exponential")
        p.add_argument("--n", type=int, help="dimension")
        p.add_argument("--M", type=int, help="samples per unit (power of two)")
        p.add_argument("--T", type=int, help="truncation window")
        p.add_argument("--seed", type=int)
        p.add_argument("--threshold", type=float, help="zero-acceptance threshold")
        if name == "orbit":
            p.add_argument("--gamma", nargs="+", help="torus generator, e.g. 1/2 1/3 or 'sqrt(2)-1'")
            p.add_argument("--z0", nargs="+")
            p.add_argument("--m", type=int, help="orbit length")
            p.add_argument("--boxes", type=int)
        if name in ("orbit", "certify"):
            p.add_argument("--Q", type=int, help="denominator cap")
            p.add_argument("--H", type=int, help="relation height cap")
        if name in ("orbit", "certify"):
            p.add_argument("--point", nargs="+", dest="distinguished",
                           help="distinguished point x... y...")
        if name == "certify":
            p.add_argument("--lattice", type=_lattice_arg, help="lattice points 'l,m;l,m'")
            p.add_argument("--m-max", type=int, dest="m_max")
        if name == "identities":
            p.add_argument("--draws", type=int)
    return parser


def load_config(args):
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
    base["command"] = args.command
    cfg = RunConfig.from_dict(base)
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        setattr(cfg, key, value)
    return cfg


def cmd_zak(cfg, out):
    f = cfg.function()
    spec = cfg.grid_spec(f)
    Z = zak_transform(f, spec)
    write_zak_csv(out / "zak.csv", Z)
    write_pgm(out / "zak_mod.pgm", modulus_image(Z))
    report = {
        "function": f.to_dict(),
        "grid": spec.to_dict(),
        "truncation_bound": Z.error_bound,
        "max_modulus": float(Z.modulus.max()),
        "unitarity_err": check_unitarity(Z, f),
        "quasi_periodicity": check_quasi_periodicity(f, spec),
    }
    write_json(out / "report.json", report)
    return report


def cmd_zeros(cfg, out):
    f = cfg.function()
    spec = cfg.grid_spec(f)
    report = certify_finite_zero_set(f, spec, threshold=cfg.threshold)
    payload = report.to_dict()
    write_json(out / "zeros.json", payload)
    return payload


def cmd_orbit(cfg, out):
    n = cfg.n
    gamma = cfg.torus_gamma(n)
    z0 = TorusVector.of([parse_real(v) for v in cfg.z0] if cfg.z0 else [0] * (2 * n))
    if z0.dim != gamma.dim:
        raise ConfigError("z0 and gamma dimensions differ")
    cls = classify_generator(gamma, Q=cfg.Q, H=cfg.H)
    write_orbit_csv(out / "orbit.csv", orbit(z0, gamma, cfg.m))
    sizes = [10 ** k for k in range(1, 12) if 10 ** k < cfg.m] + [cfg.m]
    series = [(m, orbit_discrepancy(z0, gamma, m, cfg.boxes)) for m in sizes]
    write_series_csv(out / "discrepancy.csv", ["m", "discrepancy"], series)
    payload = cls.to_dict()
    payload["gamma"] = gamma.to_list()
    payload["caps"] = {"Q": cfg.Q, "H": cfg.H or default_height(gamma.dim)}
    payload["discrepancy"] = {"boxes": cfg.boxes, "series": [[m, d] for m, d in series]}
    write_json(out / "classification.json", payload)
    return payload


def cmd_certify(cfg, out):
    f = cfg.function()
    point = cfg.point(f.n)
    lattice = cfg.lattice if cfg.lattice is not None else (DEFAULT_LATTICE if f.n == 1 else None)
    if lattice is None:
        raise ConfigError("lattice required for n > 1")
    try:
        system = TFSystem(tuple(tuple(p) for p in lattice), point)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    conf = CertifyConfig(zak_M=cfg.M, T=cfg.T, Q=cfg.Q, H=cfg.H, m_max=cfg.m_max,
                         zero_threshold=cfg.threshold)
    cert = certify(f, system, conf)
    (out / "certificate.json").write_text(cert.to_json())
    return cert.to_dict()


def cmd_identities(cfg, out):
    f = cfg.function()
    spec = cfg.grid_spec(f)
    sweep = identity_sweep(f, spec, draws=cfg.draws, seed=cfg.seed)
    payload = {"function": f.to_dict(), "grid": spec.to_dict(), "draws": cfg.draws, "seed": cfg.seed}
    for key, vals in sweep.items():
        payload[key] = {"max": max(vals), "values": vals}
    write_json(out / "identities.json", payload)
    return payload


HANDLERS = {"zak": cmd_zak, "zeros": cmd_zeros, "orbit": cmd_orbit,
            "certify": cmd_certify, "identities": cmd_identities}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        cfg.validate()
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"zakhrt: config error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"zakhrt: cannot create output directory: {exc}", file=sys.stderr)
        return 3
    try:
        HANDLERS[cfg.command](cfg, out)
    except ConfigError as exc:
        print(f"zakhrt: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"zakhrt: I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
