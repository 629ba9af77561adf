"""Batch command-line front end.

Every subcommand resolves its configuration (defaults < config file < flags),
echoes the fully resolved values into a commented CSV header, and writes a
deterministic CSV body: identical resolved config and seed give a
byte-identical body (the timestamp line in the header is the only varying
part).
"""

from __future__ import annotations

import argparse
import math
import sys
from datetime import datetime, timezone

import numpy as np
import yaml

from . import __version__
from .errors import ConfigError, CutoffError, OpthermError, PrecisionError
from .hilbert import FockCutoff, OscillatorSpec
from .dynamics import CouplingParams, KerrStrength, apply_kerr, probe_state
from .gaussian import (
    dsigma_L_dnbar,
    evolve_covariance,
    gaussian_qfi,
    gaussian_qfi_closed_form,
    generaldyne_cfi,
    GeneralDyneSetting,
    homodyne_cfi_closed_form,
    initial_covariance,
    reduced_optical,
    sigma_L_closed_form,
)
from .metrology import (
    HomodyneSetting,
    ProbeFamily,
    bayesian_estimate,
    cfi_homodyne,
    find_gmax,
    optimal_phi_lo,
    qfi,
    sample_homodyne,
)
from .wigner import default_half_width, wigner_grid, wigner_min

EXIT_CONFIG = 2
EXIT_PRECISION = 3
EXIT_CUTOFF = 4


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _emit(out_path, command: str, config: dict, columns, rows, footer=()):
    lines = [f"# optherm {__version__}", f"# command: {command}"]
    lines.append(
        "# generated: " + datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    )
    resolved = " ".join(f"{k}={_fmt(config[k])}" for k in sorted(config) if k != "out")
    lines.append(f"# config: {resolved}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.extend(footer)
    text = "\n".join(lines) + "\n"
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _resolve(args, defaults: dict) -> dict:
    """defaults, overridden by config file, overridden by explicit flags."""
    config = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {args.config} must be a key-value mapping")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in config:
                raise ConfigError(f"unknown config key {key!r}")
            config[key] = value
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def _cutoff(config, alpha: float) -> FockCutoff:
    if config.get("n_max"):
        return FockCutoff(int(config["n_max"]))
    return FockCutoff.for_alpha(alpha)


def _resolve_g(config, alpha, nbar, tau, cutoff) -> float:
    g = config["g"]
    if g == "auto":
        result = find_gmax(alpha, OscillatorSpec(nbar), tau, cutoff=cutoff)
        return result.g_max
    return float(g)


def _resolve_chi(config, g: float) -> float:
    chi = config["chi"]
    if chi == "cancel":
        return KerrStrength.cancellation(g).chi
    return float(chi)


# --- subcommands ---------------------------------------------------------


def cmd_qfi_map(args):
    defaults = dict(
        alpha=2.0, nbar=1.0,
        g_min=0.0, g_max=2.0, g_points=60,
        tau_min=0.0, tau_max=2.0 * math.pi, tau_points=60,
        n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    gs = np.linspace(config["g_min"], config["g_max"], int(config["g_points"]))
    taus = np.linspace(config["tau_min"], config["tau_max"], int(config["tau_points"]))
    rows = []
    for g in gs:
        for tau in taus:
            family = ProbeFamily(config["alpha"], CouplingParams(g, tau), cutoff)
            rows.append((g, tau, qfi(family, config["nbar"]).value))
    _emit(config["out"], "qfi-map", config, ("g", "tau", "fq"), rows)


def cmd_qfi_vs_nbar(args):
    defaults = dict(
        alpha=2.0, tau=math.pi,
        nbar_min=0.05, nbar_max=1.5, nbar_points=15,
        g_lo=0.01, g_hi=3.0, n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    rows = []
    for nbar in np.linspace(config["nbar_min"], config["nbar_max"], int(config["nbar_points"])):
        res = find_gmax(
            config["alpha"], OscillatorSpec(nbar), config["tau"],
            g_range=(config["g_lo"], config["g_hi"]), cutoff=cutoff,
        )
        limit = 2.0 / (1.0 + 2.0 * nbar) ** 2
        rows.append((nbar, res.g_max, res.fq_max, limit))
    _emit(config["out"], "qfi-vs-nbar", config, ("nbar", "g_max", "fq_max", "fq_limit"), rows)


def cmd_gmax(args):
    defaults = dict(
        alpha=2.0, nbar=1.0, tau=math.pi,
        g_lo=0.01, g_hi=3.0, n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    res = find_gmax(
        config["alpha"], OscillatorSpec(config["nbar"]), config["tau"],
        g_range=(config["g_lo"], config["g_hi"]), cutoff=cutoff,
    )
    rows = [(res.g_max, res.fq_max, res.on_boundary)]
    footer = ["# warning: maximum on range boundary"] if res.on_boundary else []
    _emit(config["out"], "gmax", config, ("g_max", "fq_max", "on_boundary"), rows, footer)


def cmd_fisher_ratio_map(args):
    defaults = dict(
        alpha=3.0, tau=math.pi, g="auto", gmax_nbar=0.25,
        nbar_min=0.05, nbar_max=1.5, nbar_points=7, chi_points=9,
        phi_lo="auto", n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    g = _resolve_g(config, config["alpha"], config["gmax_nbar"], config["tau"], cutoff)
    config["g"] = g
    chi_star = KerrStrength.cancellation(g).chi
    chis = np.linspace(0.0, chi_star, int(config["chi_points"]))
    nbars = np.linspace(config["nbar_min"], config["nbar_max"], int(config["nbar_points"]))
    rows = []
    for chi in chis:
        for nbar in nbars:
            family = ProbeFamily(
                config["alpha"], CouplingParams(g, config["tau"]), cutoff,
                kerr=KerrStrength(chi),
            )
            if config["phi_lo"] == "auto":
                phi_star, ratio = optimal_phi_lo(family, nbar)
            else:
                phi_star = float(config["phi_lo"])
                fc = cfi_homodyne(family, nbar, HomodyneSetting(phi_star)).value
                fq = qfi(family, nbar).value
                ratio = fc / fq if fq > 0 else 0.0
            rows.append((chi, nbar, ratio, phi_star))
    _emit(config["out"], "fisher-ratio-map", config, ("chi", "nbar", "ratio", "phi_star"), rows)


def cmd_phi_sweep(args):
    defaults = dict(
        alpha=3.0, tau=math.pi, g="auto", gmax_nbar=0.25,
        nbars="0.1,0.5,1.0", chi_factor=1.0, phi_points=64,
        n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    g = _resolve_g(config, config["alpha"], config["gmax_nbar"], config["tau"], cutoff)
    config["g"] = g
    chi = config["chi_factor"] * KerrStrength.cancellation(g).chi
    nbars = [float(s) for s in str(config["nbars"]).split(",")]
    phis = np.linspace(0.0, math.pi, int(config["phi_points"]), endpoint=False)
    rows = []
    for nbar in nbars:
        family = ProbeFamily(
            config["alpha"], CouplingParams(g, config["tau"]), cutoff,
            kerr=KerrStrength(chi),
        )
        fq = qfi(family, nbar).value
        for phi in phis:
            fc = cfi_homodyne(family, nbar, HomodyneSetting(phi)).value
            rows.append((nbar, phi, fc / fq if fq > 0 else 0.0))
    _emit(config["out"], "phi-sweep", config, ("nbar", "phi_lo", "ratio"), rows)


def cmd_wigner(args):
    defaults = dict(
        alpha=3.0, nbar=0.25, tau=math.pi, g="auto", chi="cancel",
        points=201, half_width=0, n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    g = _resolve_g(config, config["alpha"], config["nbar"], config["tau"], cutoff)
    config["g"] = g
    chi = _resolve_chi(config, g)
    config["chi"] = chi
    half_width = config["half_width"] or default_half_width(config["alpha"])
    config["half_width"] = half_width
    state = probe_state(
        config["alpha"], OscillatorSpec(config["nbar"]),
        CouplingParams(g, config["tau"]), cutoff,
    )
    pre = wigner_grid(state, half_width=half_width, points=int(config["points"]))
    post = wigner_grid(
        apply_kerr(state, KerrStrength(chi)),
        half_width=half_width, points=int(config["points"]),
    )
    rows = []
    for i, q in enumerate(pre.q):
        for j, p in enumerate(pre.p):
            rows.append((q, p, pre.values[i, j], post.values[i, j]))
    footer = [
        f"# min_w_pre: {_fmt(wigner_min(pre))}",
        f"# min_w_post: {_fmt(wigner_min(post))}",
    ]
    _emit(config["out"], "wigner", config, ("q", "p", "w_pre", "w_post"), rows, footer)


def cmd_gaussian(args):
    defaults = dict(
        alpha=2.0, nbar=1.0, g=0.1,
        tau_min=0.1, tau_max=2.0 * math.pi, tau_points=25,
        theta=math.pi / 2, z=1e-6, out=None,
    )
    config = _resolve(args, defaults)
    g, alpha, nbar = float(config["g"]), config["alpha"], config["nbar"]
    rows = []
    sigma0 = initial_covariance(nbar)
    for tau in np.linspace(config["tau_min"], config["tau_max"], int(config["tau_points"])):
        closed = sigma_L_closed_form(g, alpha, nbar, tau)
        evolved = reduced_optical(evolve_covariance(sigma0, g, alpha, tau)).cov
        dev = float(np.max(np.abs(evolved - closed)))
        fq = gaussian_qfi(
            lambda nb: sigma_L_closed_form(g, alpha, nb, tau), nbar,
            dsigma=dsigma_L_dnbar(g, alpha, tau),
        ).value
        fq_closed = gaussian_qfi_closed_form(g, alpha, nbar, tau)
        dsig = dsigma_L_dnbar(g, alpha, tau)
        fc_gd = generaldyne_cfi(
            closed, dsig, GeneralDyneSetting(config["z"], config["theta"])
        ).value
        fc_closed = (
            homodyne_cfi_closed_form(g, alpha, nbar, config["theta"])
            if abs(tau - math.pi) < 1e-12 else float("nan")
        )
        rows.append((tau, dev, fq, fq_closed, fc_gd, fc_closed))
    _emit(
        config["out"], "gaussian", config,
        ("tau", "sigma_max_dev", "fq_gaussian", "fq_closed_form",
         "fc_generaldyne", "fc_homodyne_closed_form"),
        rows,
    )


def cmd_estimate(args):
    defaults = dict(
        alpha=3.0, nbar=0.5, tau=math.pi, g="auto", chi="cancel", phi_lo=0.0,
        m=10000, seeds=10, seed0=1, prior_lo=-1.0, prior_hi=-1.0,
        grid_points=121, n_max=0, out=None,
    )
    config = _resolve(args, defaults)
    cutoff = _cutoff(config, config["alpha"])
    config["n_max"] = cutoff.n_max
    nbar = config["nbar"]
    g = _resolve_g(config, config["alpha"], nbar, config["tau"], cutoff)
    config["g"] = g
    chi = _resolve_chi(config, g)
    config["chi"] = chi
    setting = HomodyneSetting(float(config["phi_lo"]))
    family = ProbeFamily(
        config["alpha"], CouplingParams(g, config["tau"]), cutoff,
        kerr=KerrStrength(chi),
    )
    fc = cfi_homodyne(family, nbar, setting).value
    sd = 1.0 / math.sqrt(int(config["m"]) * fc) if fc > 0 else 0.1 * (1 + nbar)
    if config["prior_lo"] < 0:
        config["prior_lo"] = max(nbar - 10.0 * sd, 0.0)
    if config["prior_hi"] < 0:
        config["prior_hi"] = nbar + 10.0 * sd
    prior = (config["prior_lo"], config["prior_hi"])
    true_state = family.state(nbar)
    rows = []
    for seed in range(int(config["seed0"]), int(config["seed0"]) + int(config["seeds"])):
        samples = sample_homodyne(true_state, setting, int(config["m"]), seed)
        run = bayesian_estimate(
            samples, family, prior,
            grid_points=int(config["grid_points"]), setting=setting,
        )
        rows.append((seed, run.m, run.estimate, run.variance, fc, run.m * run.variance * fc))
    _emit(
        config["out"], "estimate", config,
        ("seed", "m", "estimate", "variance", "cfi", "m_var_cfi"), rows,
    )


# --- argument parsing ----------------------------------------------------


def _add_common(parser, flags):
    parser.add_argument("--config", help="YAML key-value config file")
    parser.add_argument("--out", help="output CSV path (default stdout)")
    for flag, kind in flags.items():
        parser.add_argument("--" + flag.replace("_", "-"), dest=flag, type=kind)


_FLOAT_FLAGS = dict(
    alpha=float, nbar=float, tau=float, theta=float, z=float,
    g_min=float, g_max=float, tau_min=float, tau_max=float,
    nbar_min=float, nbar_max=float, g_lo=float, g_hi=float,
    gmax_nbar=float, chi_factor=float, half_width=float,
    prior_lo=float, prior_hi=float,
)
_INT_FLAGS = dict(
    g_points=int, tau_points=int, nbar_points=int, chi_points=int,
    phi_points=int, points=int, n_max=int, m=int, seeds=int, seed0=int,
    grid_points=int,
)
_STR_FLAGS = dict(g=str, chi=str, phi_lo=str, nbars=str)

_COMMANDS = {
    "qfi-map": (cmd_qfi_map, ("alpha", "nbar", "g_min", "g_max", "g_points",
                              "tau_min", "tau_max", "tau_points", "n_max")),
    "qfi-vs-nbar": (cmd_qfi_vs_nbar, ("alpha", "tau", "nbar_min", "nbar_max",
                                      "nbar_points", "g_lo", "g_hi", "n_max")),
    "gmax": (cmd_gmax, ("alpha", "nbar", "tau", "g_lo", "g_hi", "n_max")),
    "fisher-ratio-map": (cmd_fisher_ratio_map, ("alpha", "tau", "g", "gmax_nbar",
                                                "nbar_min", "nbar_max", "nbar_points",
                                                "chi_points", "phi_lo", "n_max")),
    "phi-sweep": (cmd_phi_sweep, ("alpha", "tau", "g", "gmax_nbar", "nbars",
                                  "chi_factor", "phi_points", "n_max")),
    "wigner": (cmd_wigner, ("alpha", "nbar", "tau", "g", "chi", "points",
                            "half_width", "n_max")),
    "gaussian": (cmd_gaussian, ("alpha", "nbar", "g", "tau_min", "tau_max",
                                "tau_points", "theta", "z")),
    "estimate": (cmd_estimate, ("alpha", "nbar", "tau", "g", "chi", "phi_lo",
                                "m", "seeds", "seed0", "prior_lo", "prior_hi",
                                "grid_points", "n_max")),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optherm",
        description="Fisher-information numerics for nonlinear optomechanical thermometry. "
        "Units: alpha is the real coherent amplitude, g = g0/Omega, tau = Omega*t, "
        "nbar the thermal phonon occupation (temperatures convert via "
        "nbar = 1/(exp(hbar*Omega/(kB*T)) - 1)).",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = {**_FLOAT_FLAGS, **_INT_FLAGS, **_STR_FLAGS}
    for name, (func, flags) in _COMMANDS.items():
        p = sub.add_parser(name)
        _add_common(p, {f: kinds[f] for f in flags})
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CutoffError as exc:
        print(f"cutoff insufficiency: {exc}", file=sys.stderr)
        return EXIT_CUTOFF
    except PrecisionError as exc:
        print(f"numerical precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except OpthermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
