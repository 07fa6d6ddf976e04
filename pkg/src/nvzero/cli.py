"""Command line front end.

Every run writes CSV or JSON files plus a manifest sidecar recording the
command, resolved constants and options.  Data files are deterministic for
fixed inputs; only the manifest carries a timestamp.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .model import (
    CONFIG_ENV_VAR,
    DjtParams,
    FieldNV,
    PhysicalConstants,
    StrainNV,
    ORIENTATIONS,
    lab_field_to_nv,
    load_constants,
    oriented_djt,
    resolve_config_path,
    rotate_lab_to_nv,
)
from .hamiltonian import build_ground, ground_eigensystem
from . import decoherence as dec
from . import memory as mem
from . import spectro as sp
from .optics import (
    dipole_set_nv0,
    ensemble_noise,
    noise_suppression,
    raman_coupling,
    single_nv_spectra,
    transition_degrees,
)

X_AXIS = (1.0, 0.0, 0.0)
Y_AXIS = (0.0, 1.0, 0.0)

# distortion cases traced by the sweep commands: undistorted, then a fixed
# 12 GHz distortion at the four cardinal angles
CASES = (
    ("Y0", DjtParams(upsilon=0.0, alpha=0.0)),
    ("Y12_a0", DjtParams(upsilon=12.0, alpha=0.0)),
    ("Y12_a90", DjtParams(upsilon=12.0, alpha=90.0)),
    ("Y12_am90", DjtParams(upsilon=12.0, alpha=-90.0)),
    ("Y12_a180", DjtParams(upsilon=12.0, alpha=180.0)),
)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return repr(float(value))


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out: Path, command: str, options: dict,
                    consts: PhysicalConstants, outputs: list):
    payload = {
        "command": command,
        "options": options,
        "constants": consts.to_dict(),
        "outputs": [str(p.name) for p in outputs],
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    _write_json(out / f"{command}_manifest.json", payload)


def _load_consts(args) -> PhysicalConstants:
    path = resolve_config_path(args.config)
    if path is None:
        return PhysicalConstants()
    return load_constants(path)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fig2(args) -> int:
    """Field sweeps in the defect frame: levels, degrees, coupling, noise."""
    consts = _load_consts(args)
    out = _out_dir(args)
    fields = np.linspace(0.0, args.max_field, args.points)
    ds = dipole_set_nv0(consts)
    rows_a, rows_b, rows_c, rows_d = [], [], [], []
    for label, djt in CASES:
        for f in fields:
            geigs, eeigs, _ = single_nv_spectra(
                FieldNV(fx=f), djt, StrainNV(), consts
            )
            half = 0.5 * (geigs.values.max() - geigs.values.min())
            rows_a.append((f, -half, half, label))
            lo, up = transition_degrees(geigs, ds, X_AXIS, Y_AXIS)
            rows_b.append((f, lo, up, label))
            r = raman_coupling(geigs, eeigs, ds, Y_AXIS, X_AXIS, detuning=1.0)
            rows_c.append((f, abs(r.r_times_delta), label))
            nf = noise_suppression(geigs, ds, X_AXIS)
            rows_d.append((f, nf.p, label))
    files = [out / "fig2a.csv", out / "fig2b.csv", out / "fig2c.csv", out / "fig2d.csv"]
    _write_csv(files[0], ("field_V_per_um", "e_lower_GHz", "e_upper_GHz", "case"), rows_a)
    _write_csv(files[1], ("field_V_per_um", "deg_lower", "deg_upper", "case"), rows_b)
    _write_csv(files[2], ("field_V_per_um", "r_times_delta_abs", "case"), rows_c)
    _write_csv(files[3], ("field_V_per_um", "p", "case"), rows_d)
    _write_manifest(out, "fig2", {"max_field": args.max_field, "points": args.points},
                    consts, files)
    print(f"wrote {', '.join(p.name for p in files)} to {out}")
    return 0


def cmd_fig3(args) -> int:
    """Orientation-resolved sweeps for a lab field along a cube axis."""
    consts = _load_consts(args)
    out = _out_dir(args)
    fields = np.linspace(0.0, args.max_field, args.points)
    ds = dipole_set_nv0(consts)
    rows_b, rows_c, rows_d, rows_e = [], [], [], []
    for label, djt in CASES:
        for f in fields:
            field_lab = np.array([f, 0.0, 0.0])
            for orient in ORIENTATIONS:
                fnv = lab_field_to_nv(field_lab, orient)
                djt_o = oriented_djt(djt, orient)
                geigs, eeigs, _ = single_nv_spectra(fnv, djt_o, StrainNV(), consts)
                half = 0.5 * (geigs.values.max() - geigs.values.min())
                rows_b.append((f, orient.label, -half, half, label))
                ax1 = rotate_lab_to_nv(np.array(X_AXIS), orient)
                ax2 = rotate_lab_to_nv(np.array(Y_AXIS), orient)
                lo, up = transition_degrees(geigs, ds, ax1, ax2)
                rows_c.append((f, orient.label, lo, up, label))
                r = raman_coupling(geigs, eeigs, ds, ax2, ax1, detuning=1.0)
                rows_d.append((f, orient.label, abs(r.r_times_delta), label))
            nf = ensemble_noise(field_lab, djt, consts, X_AXIS)
            rows_e.append((f, nf.p, label))
    files = [out / "fig3b.csv", out / "fig3c.csv", out / "fig3d.csv", out / "fig3e.csv"]
    _write_csv(files[0],
               ("field_V_per_um", "orientation", "e_lower_GHz", "e_upper_GHz", "case"),
               rows_b)
    _write_csv(files[1],
               ("field_V_per_um", "orientation", "deg_lower", "deg_upper", "case"),
               rows_c)
    _write_csv(files[2],
               ("field_V_per_um", "orientation", "r_times_delta_abs", "case"), rows_d)
    _write_csv(files[3], ("field_V_per_um", "p_ensemble", "case"), rows_e)
    _write_manifest(out, "fig3", {"max_field": args.max_field, "points": args.points},
                    consts, files)
    print(f"wrote {', '.join(p.name for p in files)} to {out}")
    return 0


def cmd_decoherence(args) -> int:
    """Strain-broadening chain, strained noise spread, and lifetime floor."""
    consts = _load_consts(args)
    out = _out_dir(args)
    djt = DjtParams(upsilon=args.upsilon, alpha=args.alpha)
    temps = args.temperature if args.temperature else [4.2, 1.0]
    general = dec.strain_broadening(args.linewidth, djt, consts, dec.REGIME_GENERAL)
    large = dec.strain_broadening(args.linewidth, djt, consts, dec.REGIME_LARGE_DJT)
    spread = dec.strained_noise_spread(args.splitting, general.delta_s, djt, consts)
    payload = {
        "kappa": dec.kappa(consts),
        "linewidth_GHz": args.linewidth,
        "splitting_spread_GHz": {
            "general": general.delta_s,
            "large_djt": large.delta_s,
        },
        "strain_spread": dec.strain_from_linewidth(args.linewidth, djt, consts),
        "noise": {
            "p": spread.p,
            "delta_p": spread.delta_p,
            "p_plus_delta_p": spread.p + spread.delta_p,
        },
        "lifetime_floor_ns": {
            str(t): dec.lifetime_bound(args.splitting, t).tau_min_ns for t in temps
        },
        "inputs": {
            "upsilon_GHz": args.upsilon,
            "alpha_deg": args.alpha,
            "splitting_GHz": args.splitting,
            "temperatures_K": temps,
        },
    }
    path = out / "decoherence.json"
    _write_json(path, payload)
    _write_manifest(out, "decoherence", payload["inputs"], consts, [path])
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_memory(args) -> int:
    """Memory coupling strength for a bulk or waveguide geometry."""
    consts = _load_consts(args)
    out = _out_dir(args)
    if args.geometry == "bulk":
        wavelength = (
            args.wavelength if args.wavelength is not None
            else mem.default_wavelength(consts)
        )
        geometry = mem.Bulk(wavelength=wavelength)
    else:
        geometry = mem.Waveguide(width=args.width, length=args.length)
    cfg = mem.MemoryConfig(
        pulse_energy=args.pulse_energy,
        nv_density=args.nv_density,
        detuning=args.detuning,
        r_times_delta=mem.r_times_delta_si(args.r_times_delta),
        geometry=geometry,
    )
    payload = {
        "coupling_strength": mem.coupling_strength(cfg),
        "sub_wavelength": cfg.sub_wavelength,
        "inputs_si": mem.resolved_si(cfg),
        "r_times_delta_GHz2_um2": args.r_times_delta,
    }
    path = out / "memory.json"
    _write_json(path, payload)
    _write_manifest(out, "memory", {"geometry": args.geometry}, consts, [path])
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_spectro_synth(args) -> int:
    consts = _load_consts(args)
    out = _out_dir(args)
    spec = sp.synth_spectrum(
        sigma=args.sigma,
        center=args.center,
        amplitude=args.amplitude,
        baseline=args.baseline,
        splitting=args.splitting,
        response_fwhm=args.response_fwhm,
        snr=args.snr,
        seed=args.seed,
        span=args.span,
        n_points=args.points,
    )
    path = out / "spectrum.csv"
    _write_csv(path, ("frequency_GHz", "counts"), zip(spec.freq, spec.counts))
    _write_manifest(
        out, "spectro_synth",
        {"sigma": args.sigma, "splitting": args.splitting, "snr": args.snr,
         "seed": args.seed, "points": args.points},
        consts, [path],
    )
    print(f"wrote {path}")
    return 0


def cmd_spectro_fit(args) -> int:
    consts = _load_consts(args)
    out = _out_dir(args)
    spec = sp.read_spectrum_csv(args.input, response_fwhm=args.response_fwhm)
    fit = sp.fit_single(spec)
    payload = fit.to_dict()
    path = out / "fit.json"
    _write_json(path, payload)
    _write_manifest(out, "spectro_fit", {"input": str(args.input)}, consts, [path])
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_spectro_sweep(args) -> int:
    consts = _load_consts(args)
    out = _out_dir(args)
    spec = sp.read_spectrum_csv(args.input, response_fwhm=args.response_fwhm)
    splittings = np.arange(0.0, args.max_splitting + 0.5 * args.step, args.step)
    sweep = sp.fit_double_sweep(spec, splittings)
    bound = sp.upsilon_bound(sweep.bound, consts)
    csv_path = out / "sweep.csv"
    _write_csv(
        csv_path,
        ("splitting_GHz", "relative_ssr", "fitted_sigma_GHz"),
        [(f.splitting, f.ssr / sweep.min_ssr, f.sigma) for f in sweep.fits],
    )
    payload = {
        "bound_GHz": sweep.bound,
        "upsilon_bound_GHz": bound.value,
        "upsilon_bound_clamped": bound.clamped,
        "min_ssr": sweep.min_ssr,
        "sigma_single_GHz": sweep.fits[0].sigma,
    }
    json_path = out / "sweep.json"
    _write_json(json_path, payload)
    _write_manifest(
        out, "spectro_sweep",
        {"input": str(args.input), "max_splitting": args.max_splitting,
         "step": args.step},
        consts, [csv_path, json_path],
    )
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    # Shared options are accepted before or after the subcommand.  The
    # subparser copies its namespace over the root's, so the subparser-side
    # copies must default to SUPPRESS (set nothing unless given) and the
    # real defaults live only on the root parser's own actions; parents=
    # shares action objects, so never set_defaults these dests anywhere.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help=f"constants TOML (or set {CONFIG_ENV_VAR})")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="random seed")
    common.add_argument("--points", type=int, default=argparse.SUPPRESS,
                        help="samples per sweep or synthetic grid")

    parser = argparse.ArgumentParser(
        prog="nvzero",
        description="Neutral nitrogen-vacancy model: level sweeps, noise, "
                    "decoherence, memory coupling, and line fitting.",
    )
    parser.add_argument("--config", default=None,
                        help=f"constants TOML (or set {CONFIG_ENV_VAR})")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--points", type=int, default=401,
                        help="samples per sweep or synthetic grid")
    sub = parser.add_subparsers(dest="command", required=True)

    p2 = sub.add_parser("fig2", parents=[common],
                        help="defect-frame field sweeps (levels, degrees, "
                             "coupling, noise)")
    p2.add_argument("--max-field", type=float, default=10.0, help="V/um")
    p2.set_defaults(func=cmd_fig2)

    p3 = sub.add_parser("fig3", parents=[common],
                        help="orientation-resolved sweeps for a cube-axis "
                             "lab field")
    p3.add_argument("--max-field", type=float, default=10.0, help="V/um")
    p3.set_defaults(func=cmd_fig3)

    pd = sub.add_parser("decoherence", parents=[common],
                        help="broadening chain and lifetime floor")
    pd.add_argument("--linewidth", type=float, default=16.0,
                    help="optical line sigma, GHz")
    pd.add_argument("--upsilon", type=float, default=12.0, help="GHz")
    pd.add_argument("--alpha", type=float, default=90.0, help="degrees")
    pd.add_argument("--splitting", type=float, default=50.0, help="GHz")
    pd.add_argument("--temperature", type=float, action="append",
                    help="K (repeatable; default 4.2 and 1.0)")
    pd.set_defaults(func=cmd_decoherence)

    pm = sub.add_parser("memory", parents=[common],
                        help="memory coupling strength")
    pm.add_argument("--geometry", choices=("bulk", "waveguide"), default="bulk")
    pm.add_argument("--pulse-energy", type=float, default=10e-9, help="J")
    pm.add_argument("--nv-density", type=float, default=1e22, help="m^-3")
    pm.add_argument("--detuning", type=float, default=1e11, help="Hz")
    pm.add_argument("--r-times-delta", type=float,
                    default=18.0 / math.sqrt(3.0), help="GHz^2 um^2 / V^2")
    pm.add_argument("--wavelength", type=float, default=None,
                    help="m (bulk; default from the optical energy)")
    pm.add_argument("--width", type=float, default=1e-6, help="m (waveguide)")
    pm.add_argument("--length", type=float, default=1e-3, help="m (waveguide)")
    pm.set_defaults(func=cmd_memory)

    ps = sub.add_parser("spectro", parents=[common],
                        help="synthetic spectra and line fitting")
    ssub = ps.add_subparsers(dest="spectro_command", required=True)

    psy = ssub.add_parser("synth", parents=[common],
                          help="write a synthetic spectrum CSV")
    psy.add_argument("--sigma", type=float, default=16.0, help="GHz")
    psy.add_argument("--center", type=float, default=0.0, help="GHz")
    psy.add_argument("--amplitude", type=float, default=1000.0)
    psy.add_argument("--baseline", type=float, default=0.0)
    psy.add_argument("--splitting", type=float, default=0.0, help="GHz")
    psy.add_argument("--response-fwhm", type=float,
                     default=sp.DEFAULT_RESPONSE_FWHM, help="GHz")
    psy.add_argument("--snr", type=float, default=None,
                     help="peak/noise; omit for noiseless")
    psy.add_argument("--span", type=float, default=None, help="GHz half-range")
    psy.set_defaults(func=cmd_spectro_synth)

    pf = ssub.add_parser("fit", parents=[common],
                         help="single-line fit of a spectrum CSV")
    pf.add_argument("--input", required=True)
    pf.add_argument("--response-fwhm", type=float,
                    default=sp.DEFAULT_RESPONSE_FWHM, help="GHz")
    pf.set_defaults(func=cmd_spectro_fit)

    pw = ssub.add_parser("sweep", parents=[common],
                         help="fixed-splitting sweep and bound")
    pw.add_argument("--input", required=True)
    pw.add_argument("--response-fwhm", type=float,
                    default=sp.DEFAULT_RESPONSE_FWHM, help="GHz")
    pw.add_argument("--max-splitting", type=float, default=40.0, help="GHz")
    pw.add_argument("--step", type=float, default=1.0, help="GHz")
    pw.set_defaults(func=cmd_spectro_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
