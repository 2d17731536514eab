"""Command-line interface.

Every subcommand writes one table (CSV by default, JSON with ``--format
json``) to stdout or ``--output``.  Exit codes: 0 success, 2 configuration
or usage error, 3 accuracy error, 4 consistency error.
"""
import argparse
import configparser
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .action_mc import PathConfig, sample_action, variance_extrapolation
from .crossover import (SIGN_NOTE, RegimeConstants, cp_coefficient, crossover_scan,
                        regime_branch, regime_energy, vdw_closed_form, vdw_frequency_domain,
                        vdw_time_domain)
from .errors import ConfigurationError, ConsistencyError, CrossoverError
from .profiles import SHIPPED_PROFILES, load_profiles
from .quadrature import QuadratureSettings
from .spectral import (BasisConfig, build_dipole_spectrum, dynamic_polarizability,
                       reduced_polarizability, static_polarizability)
from .tables import FORMATS, Table
from .vacuum import CANONICAL, HALVED, a0, a0_monte_carlo

ENERGY_NOTE = "atomic units; energies relative to E_hy = -1/2"
INTERACTION_NOTE = "interaction energy is -h_co(R); h_co > 0 means attraction"


@dataclass
class RunConfig:
    profile: str = "bump"
    basis: BasisConfig = BasisConfig()
    quadrature: QuadratureSettings = QuadratureSettings()
    constants: RegimeConstants = field(default_factory=RegimeConstants)
    paths: PathConfig = PathConfig()
    format: str = "csv"
    output: str = None
    profiles: dict = field(default_factory=lambda: dict(SHIPPED_PROFILES))

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigurationError(f"output format must be one of {FORMATS}, got {self.format!r}")
        if self.profile not in self.profiles:
            raise ConfigurationError(
                f"unknown profile {self.profile!r}; available: {', '.join(sorted(self.profiles))}")

    @property
    def smearing(self):
        return self.profiles[self.profile]


def _section(parser, name, converters):
    if not parser.has_section(name):
        return {}
    out = {}
    for key, raw in parser[name].items():
        if key not in converters:
            raise ConfigurationError(f"unknown key {key!r} in [{name}]")
        try:
            out[key] = converters[key](raw)
        except ValueError as exc:
            raise ConfigurationError(f"[{name}] {key} = {raw!r}: {exc}") from exc
    return out


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def load_config(path):
    """Read an INI run configuration (see the README for the keys)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        if not parser.read(path):
            raise ConfigurationError(f"cannot read config file {path}")
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file {path}: {exc}") from exc
    known = {"run", "basis", "quadrature", "constants", "E_2R", "mc"}
    for s in parser.sections():
        if s not in known and not s.startswith("profile:"):
            raise ConfigurationError(f"unknown section [{s}] in {path}")
    run = _section(parser, "run", {"profile": str, "format": str, "output": str})
    basis = _section(parser, "basis", {"size": int, "length_scale": float})
    quad = _section(parser, "quadrature", {
        "nodes": int, "split_points": _floats, "exp_transform_scale": float,
        "abs_tol": float, "rel_tol": float, "max_panels": int})
    consts = _section(parser, "constants", {"e_he": float, "a0": float})
    mc = _section(parser, "mc", {"tau": float, "alpha": float, "dt": float, "paths": int,
                                 "seed": int, "lag_cutoff": float, "x_spacing": float,
                                 "envelope": float, "diagonal_cell": lambda v: v.lower() in ("1", "true", "yes", "on")})
    e2r = {}
    if parser.has_section("E_2R"):
        for k, v in parser["E_2R"].items():
            try:
                e2r[float(k)] = float(v)
            except ValueError as exc:
                raise ConfigurationError(f"[E_2R] {k} = {v!r}: {exc}") from exc
    profiles = dict(SHIPPED_PROFILES)
    with open(path) as fh:
        profiles.update(load_profiles(fh.read()))
    return RunConfig(
        profile=run.get("profile", "bump"),
        basis=BasisConfig(**basis),
        quadrature=QuadratureSettings(**quad),
        constants=RegimeConstants(E_he=consts.get("e_he"), E_2R_table=e2r, a0=consts.get("a0")),
        paths=PathConfig(**mc),
        format=run.get("format", "csv"),
        output=run.get("output"),
        profiles=profiles,
    )


# --- commands -------------------------------------------------------------------------

def _spectrum(cfg):
    return build_dipole_spectrum(cfg.basis)


def cmd_spectrum(args, cfg):
    spec = _spectrum(cfg)
    rows = [(i, e, s) for i, (e, s) in enumerate(zip(spec.excitations, spec.strengths))]
    return Table(["index", "excitation", "strength"], rows, [
        "l=1 hydrogen pseudostate dipole spectrum (excitation E_n, strength |<psi_0|z|n>|^2)",
        f"basis size {cfg.basis.size}, length scale {cfg.basis.length_scale:g}",
        ENERGY_NOTE])


def parse_grid(text):
    """``start:stop:count`` (inclusive, linear) or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return np.linspace(float(lo), float(hi), int(n))
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse grid {text!r}: {exc}") from exc


def cmd_polarizability(args, cfg):
    spec = _spectrum(cfg)
    u = parse_grid(args.u_grid)
    if np.any(u < 0):
        raise ConfigurationError("u grid must be nonnegative")
    f = reduced_polarizability(spec, u)
    a = dynamic_polarizability(spec, u)
    return Table(["u", "f_u", "alpha_iu"], list(zip(u, f, a)), [
        "reduced polarizability f(u) = sum s_n E_n / (E_n^2 + u^2/4) and alpha(iu) = 2 f(2u)",
        "f(0) = alpha_hy / 2", ENERGY_NOTE])


def cmd_coefficients(args, cfg):
    spec = _spectrum(cfg)
    closed = vdw_closed_form(spec)
    timed = vdw_time_domain(spec, cfg.quadrature)
    freq = vdw_frequency_domain(spec, cfg.quadrature)
    if abs(closed - timed) > 1e-8 * closed:
        raise ConsistencyError(f"a_VW routes disagree: {closed!r} vs {timed!r}", (closed, timed))
    pol = static_polarizability(spec)
    acp = cp_coefficient(polarizability=pol)
    rows = [
        ("alpha_hy", pol, "2 sum s_n / E_n"),
        ("a_VW", closed, "closed form 6 sum s_n s_m / (E_n + E_m)"),
        ("a_VW", timed, "time domain 6 int C(t)^2 dt"),
        ("a_VW", freq, "frequency domain (3/pi) int alpha(iw)^2 dw"),
        ("a_CP", acp, "(23 / 4 pi) alpha_hy^2"),
        ("R_star", acp / closed, "a_CP / a_VW"),
    ]
    return Table(["quantity", "value", "method"], rows, [
        "dispersion coefficients: -a_VW R^-6 (short range) and -a_CP R^-7 (retarded)",
        ENERGY_NOTE, INTERACTION_NOTE])


def cmd_crossover(args, cfg):
    if args.points < 0:
        raise ConfigurationError("--points must be nonnegative")
    if args.points == 0 or args.r_min > args.r_max:
        R = np.array([])
    else:
        if not args.r_min > 0:
            raise ConfigurationError("--r-min must be positive")
        R = np.geomspace(args.r_min, args.r_max, args.points) if args.points > 1 else np.array([args.r_min])
    columns = ["R", "h_co", "h_co_R6", "h_co_R7"]
    notes = ["crossover function h_co(R) with R^6- and R^7-compensated columns",
             "h_co R^6 -> a_VW as R -> 0; h_co R^7 -> a_CP as R -> infinity",
             INTERACTION_NOTE, ENERGY_NOTE]
    if len(R) == 0:
        return Table(columns, [], notes)
    curve = crossover_scan(_spectrum(cfg), R, cfg.quadrature)
    return Table(columns, curve.rows(), notes)


def _a0_value(cfg):
    if cfg.constants.a0 is not None:
        return cfg.constants.a0
    return a0(cfg.smearing).value


def cmd_regime(args, cfg):
    branch = regime_branch(args.gamma)
    consts = cfg.constants
    if args.e_he is not None:
        consts = replace(consts, E_he=args.e_he)
    if args.a0 is not None:
        consts = replace(consts, a0=args.a0)
    if branch == "gamma=1" and not consts.E_2R_table:
        raise ConfigurationError("branch gamma=1 needs an E_2R table ([E_2R] section of --config)")
    if branch in ("gamma=0", "0<gamma<1") and consts.E_he is None:
        raise ConfigurationError(f"branch {branch} needs the helium energy (--e-he or [constants] e_he)")
    if branch in ("gamma=0", "0<gamma<1", "gamma=1") and consts.a0 is None:
        consts = replace(consts, a0=a0(cfg.smearing).value)
    spec = _spectrum(cfg)
    energy = regime_energy(args.alpha, args.gamma, args.r, spec, consts, cfg.quadrature,
                           profile=cfg.smearing if branch == "gamma=0" else None)
    notes = [f"leading-order energy at separation alpha^-gamma R (branch {branch})",
             "branches gamma > 1 exclude the self-energy offset 2 E_1,alpha", SIGN_NOTE, ENERGY_NOTE]
    return Table(["branch", "alpha", "gamma", "R", "energy"],
                 [(branch, args.alpha, args.gamma, args.r, energy)], notes)


def cmd_a0(args, cfg):
    prof = cfg.smearing
    rows = []
    for label, coeffs in (("canonical", CANONICAL), ("halved", HALVED)):
        res = a0(prof, coeffs=coeffs)
        row = [label, coeffs[0], coeffs[1], res.value, res.error]
        if args.monte_carlo:
            mean, se = a0_monte_carlo(prof, samples=args.samples, seed=args.seed, coeffs=coeffs)
            row += [mean, se]
        rows.append(tuple(row))
    cols = ["variant", "c_quadratic", "c_linear", "a0", "error"]
    if args.monte_carlo:
        cols += ["a0_mc", "a0_mc_stderr"]
    return Table(cols, rows, [
        f"self-energy constant a0 for profile {prof.name} ({prof.family}, scale {prof.scale:g})",
        "two-photon energy D = c_quadratic |k1 + k2|^2 + c_linear (|k1| + |k2|)",
        "canonical: D = |k1 + k2|^2 / 2 + |k1| + |k2|; halved: D = (|k1 + k2|^2 + |k1| + |k2|) / 2",
        ENERGY_NOTE])


def _path_config(args, cfg, alpha=None):
    base = cfg.paths
    updates = {k: getattr(args, k) for k in ("tau", "alpha", "dt", "paths", "seed")
               if getattr(args, k, None) is not None}
    if alpha is not None:
        updates["alpha"] = alpha
    if getattr(args, "strict_pairs", False):
        updates["diagonal_cell"] = False
    return replace(base, **updates)


def cmd_mc_action(args, cfg):
    pc = _path_config(args, cfg)
    st = sample_action(pc, cfg.smearing)
    ref = 2 * a0(cfg.smearing).value * pc.tau
    rows = [("mean", st.mean, st.mean_se), ("variance", st.variance, st.variance_se)]
    rows += [(f"cov_q{c}", v, e) for c, v, e in zip("xyz", st.covariance, st.covariance_se)]
    rows.append(("two_a0_tau", ref, 0.0))
    return Table(["quantity", "value", "stderr"], rows, [
        "Monte Carlo statistics of the Brownian action A_1 (expect mean 0, cov 0, variance -> 2 a0 tau)",
        f"alpha {pc.alpha:g}, tau {pc.tau:g}, steps {st.steps}, paths {st.paths}, seed {pc.seed}, "
        f"profile {cfg.smearing.name}, within-step term {'on' if pc.diagonal_cell else 'off'}"])


def cmd_mc_extrapolate(args, cfg):
    alphas = parse_grid(args.alphas)
    configs = [_path_config(args, cfg, alpha=float(a)) for a in alphas]
    ex = variance_extrapolation(configs, cfg.smearing, model=args.model)
    ref = 2 * a0(cfg.smearing).value * configs[0].tau
    rows = [("variance", float(a), v, e) for a, v, e in zip(ex.alphas, ex.variances, ex.variance_se)]
    rows.append(("intercept", 0.0, ex.intercept, ex.intercept_se))
    rows.append(("two_a0_tau", 0.0, ref, 0.0))
    return Table(["quantity", "alpha", "value", "stderr"], rows, [
        f"alpha -> 0 extrapolation of Var(A_1), model var = c0 + c1 alpha^{1 if ex.model == 'linear' else 2}",
        f"tau {configs[0].tau:g}, chi2 {ex.chi2:.6g}, profile {cfg.smearing.name}"])


def cmd_kernels(args, cfg):
    if not args.selftest:
        raise ConfigurationError("kernels: nothing to do (use --selftest)")
    from .oracles import selftest
    rows = [(c, inp, dev, tol, dev <= tol) for c, inp, dev, tol in selftest(cfg.smearing)]
    table = Table(["check", "input", "deviation", "tolerance", "pass"], rows, [
        "closed-form photon kernels against brute-force quadrature oracles"])
    failed = [r for r in rows if not r[4]]
    if failed:
        _emit(table, args, cfg)
        raise ConsistencyError(f"{len(failed)} kernel oracle comparisons failed", [r[2] for r in failed])
    return table


COMMANDS = {
    "spectrum": cmd_spectrum,
    "polarizability": cmd_polarizability,
    "coefficients": cmd_coefficients,
    "crossover": cmd_crossover,
    "regime": cmd_regime,
    "a0": cmd_a0,
    "mc-action": cmd_mc_action,
    "mc-extrapolate": cmd_mc_extrapolate,
    "kernels": cmd_kernels,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--profile", help="smearing profile name")
    common.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--basis-size", type=int)
    common.add_argument("--length-scale", type=float)

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--tau", type=float)
    mc.add_argument("--dt", type=float)
    mc.add_argument("--paths", type=int)
    mc.add_argument("--seed", type=int)
    mc.add_argument("--strict-pairs", action="store_true",
                    help="omit the within-step contribution (pure j < i sum)")

    p = argparse.ArgumentParser(prog="vdw-crossover", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="pseudostate dipole spectrum")
    sp = sub.add_parser("polarizability", parents=[common], help="f(u) and alpha(iu)")
    sp.add_argument("--u-grid", default="0:10:11", help="start:stop:count or comma list")
    sub.add_parser("coefficients", parents=[common], help="alpha_hy, a_VW, a_CP, R*")
    sp = sub.add_parser("crossover", parents=[common], help="h_co(R) on a log grid")
    sp.add_argument("--r-min", type=float, default=1e-2)
    sp.add_argument("--r-max", type=float, default=1e3)
    sp.add_argument("--points", type=int, default=51)
    sp = sub.add_parser("regime", parents=[common], help="energy at separation alpha^-gamma R")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--e-he", type=float, help="helium ground-state energy (no default)")
    sp.add_argument("--a0", type=float, help="self-energy constant (computed if omitted)")
    sp = sub.add_parser("a0", parents=[common], help="self-energy constant, both variants")
    sp.add_argument("--monte-carlo", action="store_true", help="add the 6D Monte Carlo oracle")
    sp.add_argument("--samples", type=int, default=2_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp = sub.add_parser("mc-action", parents=[common, mc], help="path-action statistics")
    sp.add_argument("--alpha", type=float)
    sp = sub.add_parser("mc-extrapolate", parents=[common, mc], help="alpha -> 0 variance intercept")
    sp.add_argument("--alphas", default="0.4,0.3,0.2")
    sp.add_argument("--model", choices=("linear", "quadratic"), default="linear")
    sp = sub.add_parser("kernels", parents=[common], help="kernel oracle comparisons")
    sp.add_argument("--selftest", action="store_true")
    return p


def resolve_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    basis = cfg.basis
    if args.basis_size is not None or args.length_scale is not None:
        basis = BasisConfig(args.basis_size or basis.size, args.length_scale or basis.length_scale)
    return replace(cfg, basis=basis, profile=args.profile or cfg.profile,
                   format=args.format or cfg.format, output=args.output or cfg.output)


def _emit(table, args, cfg):
    text = table.render(cfg.format, command=args.command)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        table = COMMANDS[args.command](args, cfg)
        _emit(table, args, cfg)
    except CrossoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
