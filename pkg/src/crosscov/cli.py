"""Command-line front end.

Configs are flat ``key = value`` files; section headers are allowed but only
group keys (every key must be unique across the file).  Keys::

    p, n1..nt, rho1..rhot, dist, seed, replicates, poly, regime,
    max_order, bins, out, z_max, bias, workers

``--set key=value`` overrides (repeatable).  Polynomials use the grammar in
:mod:`crosscov.polynomial`, e.g. ``C1*C2^* + C2*C1^*`` or ``E1 + E1^*``.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cumulants import FamilyParams, MomentFunctional, cc_moments, elliptic_moments
from .errors import DivergentLimitError, DomainError, PolynomialParseError, ResourceLimitError, SizeLimitError
from .lab import (
    Dist,
    EnsembleConfig,
    Regime,
    SpectrumKind,
    eval_matrix_poly,
    monte_carlo,
    monte_carlo_poly_moments,
    spectrum,
)
from .polynomial import NCPolynomial, is_symmetric, parse_polynomial, poly_cumulant, poly_moment

KNOWN = {"p", "dist", "seed", "replicates", "poly", "regime", "max_order", "bins", "out", "z_max", "bias", "workers"}
_FAMILY_KEY = re.compile(r"^(n|rho)(\d+)$")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: EnsembleConfig
    exact_rhos: dict[int, Fraction]
    polynomial: NCPolynomial
    poly_text: str
    regime: Regime
    max_order: int
    bins: int
    out: Optional[str]
    z_max: float
    bias: float
    workers: int

    def exact_state(self) -> MomentFunctional:
        """The limiting state the polynomial is evaluated in."""
        fams = self.ensemble.families
        if self.regime is Regime.RAW_C:
            return cc_moments(
                FamilyParams({l: (self.exact_rhos[l], Fraction(self.ensemble.p, n)) for l, (n, _) in fams.items()})
            )
        # E_l has elliptic parameter rho_l^2
        return elliptic_moments({l: self.exact_rhos[l] ** 2 for l in fams})


def read_config(path: Optional[str], overrides: Sequence[str]) -> dict[str, str]:
    raw: dict[str, str] = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        parser = configparser.ConfigParser(interpolation=None, strict=True, default_section="\0none")
        try:
            parser.read_string("[\0top]\n" + text, source=path)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        for section in parser.sections():
            for key, value in parser.items(section):
                if key in raw:
                    raise ConfigError(f"key {key!r} appears in more than one section")
                raw[key] = value.strip()
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        raw[key.strip().lower()] = value.strip()
    return raw


def _int(raw: dict[str, str], key: str, default: Optional[int] = None) -> int:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(raw[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw[key]!r}") from None


def _float(raw: dict[str, str], key: str, default: float) -> float:
    try:
        return float(raw.get(key, default))
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw[key]!r}") from None


def build_config(raw: dict[str, str]) -> ExperimentConfig:
    ns: dict[int, int] = {}
    rhos: dict[int, Fraction] = {}
    for key, value in raw.items():
        m = _FAMILY_KEY.match(key)
        if m:
            label = int(m.group(2))
            try:
                if m.group(1) == "n":
                    ns[label] = int(value)
                else:
                    rhos[label] = Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        elif key not in KNOWN:
            raise ConfigError(f"unknown key {key!r}")
    if "poly" not in raw:
        raise ConfigError("missing required key 'poly'")
    poly = parse_polynomial(raw["poly"])
    for label in poly.labels:
        if label not in ns or label not in rhos:
            raise ConfigError(f"polynomial uses label {label} but n{label}/rho{label} are not both set")
    if set(ns) != set(rhos):
        raise ConfigError(f"n and rho keys do not cover the same labels: {sorted(ns)} vs {sorted(rhos)}")
    if not ns:
        ns, rhos = {1: 1}, {1: Fraction(0)}
    if "regime" in raw:
        try:
            regime = Regime(raw["regime"].lower())
        except ValueError:
            raise ConfigError(f"regime must be raw_c or centered_e, got {raw['regime']!r}") from None
        if poly.labels and (poly.symbol == "C") != (regime is Regime.RAW_C):
            raise ConfigError(f"regime {regime.name} does not match the {poly.symbol} symbols of the polynomial")
    else:
        regime = Regime.RAW_C if poly.symbol == "C" else Regime.CENTERED_E
    try:
        dist = Dist(raw.get("dist", "gaussian").lower())
    except ValueError:
        raise ConfigError(f"dist must be gaussian or rademacher, got {raw['dist']!r}") from None
    ensemble = EnsembleConfig(
        p=_int(raw, "p", 1 if not poly.labels else None),
        families={l: (ns[l], float(rhos[l])) for l in ns},
        dist=dist,
        seed=_int(raw, "seed", 0),
        replicates=_int(raw, "replicates", 1),
    )
    bins = _int(raw, "bins", 50)
    if bins < 1:
        raise ConfigError("bins must be >= 1")
    max_order = _int(raw, "max_order", 4)
    if max_order < 1:
        raise ConfigError("max_order must be >= 1")
    return ExperimentConfig(
        ensemble=ensemble,
        exact_rhos=rhos,
        polynomial=poly,
        poly_text=raw["poly"],
        regime=regime,
        max_order=max_order,
        bins=bins,
        out=raw.get("out") or None,
        z_max=_float(raw, "z_max", 5.0),
        bias=_float(raw, "bias", 0.0),
        workers=max(1, _int(raw, "workers", 1)),
    )


def _g(x) -> str:
    return "%.12g" % float(x)


def _exact(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _emit_csv(cfg: ExperimentConfig, header: Sequence[str], rows: Sequence[Sequence[str]], stdout) -> None:
    stdout = stdout or sys.stdout
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())


def _exact_table(cfg: ExperimentConfig, fn, stdout) -> int:
    stdout = stdout or sys.stdout
    phi = cfg.exact_state()
    values = [fn(cfg.polynomial, k, phi) for k in range(1, cfg.max_order + 1)]
    if cfg.out:
        _emit_csv(cfg, ["k", "value"], [[str(k), _g(v)] for k, v in enumerate(values, 1)], stdout)
    for k, v in enumerate(values, 1):
        stdout.write(f"{k}\t{_exact(v)}\t{_g(v)}\n")
    return 0


def cmd_moments(cfg: ExperimentConfig, stdout=None) -> int:
    return _exact_table(cfg, poly_moment, stdout)


def cmd_cumulants(cfg: ExperimentConfig, stdout=None) -> int:
    return _exact_table(cfg, poly_cumulant, stdout)


def cmd_mc_verify(cfg: ExperimentConfig, stdout=None) -> int:
    phi = cfg.exact_state()
    exact = [poly_moment(cfg.polynomial, k, phi) for k in range(1, cfg.max_order + 1)]
    ests = monte_carlo_poly_moments(cfg.ensemble, cfg.polynomial, cfg.max_order, cfg.regime, cfg.workers)
    rows, ok = [], True
    for k, (ex, est) in enumerate(zip(exact, ests), 1):
        diff = est.mean - float(ex)
        if est.std_error > 0:
            z = diff / est.std_error
        else:
            z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
        ok &= abs(diff) <= cfg.z_max * est.std_error + cfg.bias
        rows.append([str(k), _g(ex), _g(est.mean), _g(est.std_error), _g(z)])
    _emit_csv(cfg, ["k", "exact_limit", "mc_mean", "mc_se", "z_score"], rows, stdout)
    if not ok:
        sys.stderr.write(f"mc-verify: deviation exceeds {cfg.z_max}*se + {cfg.bias}\n")
    return 0 if ok else 1


def _pooled(cfg: ExperimentConfig, kind: SpectrumKind) -> np.ndarray:
    def stat(fam):
        vals = spectrum(eval_matrix_poly(cfg.polynomial, fam, cfg.regime), kind).values
        return np.column_stack([vals.real, vals.imag]).ravel() if kind is SpectrumKind.COMPLEX_EIGS else vals

    return monte_carlo(cfg.ensemble, stat, cfg.workers)


def cmd_esd(cfg: ExperimentConfig, stdout=None) -> int:
    if not is_symmetric(cfg.polynomial):
        raise DomainError(
            "polynomial not symmetric: the ESD limit is only established for symmetric (self-adjoint) polynomials"
        )
    vals = _pooled(cfg, SpectrumKind.REAL_EIGS).ravel()
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo)):
        # degenerate spectrum: one unit-width bin around the common value
        edges = np.array([lo - 0.5, lo + 0.5])
        counts = np.array([vals.size])
    else:
        counts, edges = np.histogram(vals, bins=cfg.bins, range=(lo, hi))
    widths = np.diff(edges)
    density = counts / (vals.size * widths)
    rows = [[_g(a), _g(b), str(int(c)), _g(d)] for a, b, c, d in zip(edges[:-1], edges[1:], counts, density)]
    _emit_csv(cfg, ["bin_left", "bin_right", "count", "density"], rows, stdout)
    return 0


def cmd_scatter(cfg: ExperimentConfig, stdout=None) -> int:
    if cfg.regime is not Regime.CENTERED_E:
        raise DomainError("scatter needs the centered_e regime (E symbols)")
    pts = _pooled(cfg, SpectrumKind.COMPLEX_EIGS).reshape(-1, 2)
    _emit_csv(cfg, ["re", "im"], [[_g(a), _g(b)] for a, b in pts], stdout)
    return 0


COMMANDS = {
    "moments": cmd_moments,
    "cumulants": cmd_cumulants,
    "mc-verify": cmd_mc_verify,
    "esd": cmd_esd,
    "scatter": cmd_scatter,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crosscov", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "moments": "exact limiting moments phi(poly^k)",
        "cumulants": "exact free cumulants kappa_k(poly, ..., poly)",
        "mc-verify": "Monte Carlo trace moments against the exact limit",
        "esd": "histogram of pooled eigenvalues of a symmetric polynomial",
        "scatter": "complex eigenvalues of an E-polynomial",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(read_config(args.config, args.set))
        return COMMANDS[args.command](cfg)
    except (
        ConfigError,
        DomainError,
        PolynomialParseError,
        SizeLimitError,
        DivergentLimitError,
        ResourceLimitError,
        OSError,
    ) as exc:
        sys.stderr.write(f"crosscov {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
