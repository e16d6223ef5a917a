"""Command-line entry point.

Exit status: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys


from ..amplitude import amplitude_coefficients, solve_amplitude_ode, steady_amplitude
from ..errors import InvalidArgument, NumericalFailure, SingularSystem
from ..stability import stability_report
from . import io
from .config import load_config
from .scenarios import run_scenario, sweep_epsilon

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _parse_floats(text):
    return [float(p) for p in text.split(",") if p.strip()]


def cmd_simulate(args):
    cfg = load_config(args.config)
    res = run_scenario(cfg, out_dir=args.out)
    mon = res.summary["monitors"]
    print(f"{cfg.name}: {res.summary['steps']} steps, t_end={cfg.scheme.t_end:g}")
    print(f"mass bound ok: {mon['mass_bound_ok']}  positivity ok: {mon['positivity_ok']}  "
          f"extinction floor: {mon['extinction_floor']}")
    if "amplitude" in res.summary:
        amp = res.summary["amplitude"]
        print(f"A_amp(t_end)={amp['A_amp_final']:.6g}  A_ode(t_end)={amp['A_ode_final']:.6g}  "
              f"A_inf={amp['A_inf_predicted']:.6g}")
    for w in res.summary["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    for key, p in res.paths.items():
        if key != "snapshots":
            print(f"wrote {p}")
    return EXIT_OK


def cmd_stability(args):
    rep = stability_report(args.a, args.L, args.dim, chi=args.chi)
    if args.csv:
        cols = ["k"] + (["j"] if args.dim == 2 else []) + ["lambda", "chi_star_k", "critical"]
        if args.chi is not None:
            cols += ["eig_sym", "eig_antisym"]
        print(",".join(cols))
        for e in sorted(rep.modes, key=lambda e: (e.lam, e.mode)):
            row = [str(m) for m in e.mode] + ["%.17g" % e.lam, "%.17g" % e.chi_star,
                                               str(int(e.mode in rep.critical_modes))]
            if args.chi is not None:
                row += ["%.17g" % ev for ev in e.eigenvalues]
            print(",".join(row))
        return EXIT_OK
    print(f"a={args.a:g} L={args.L:g} dim={args.dim}")
    print(f"chi_star = {rep.chi_star:.10g}")
    print(f"critical modes: {', '.join(str(m) for m in rep.critical_modes)}")
    if args.chi is not None:
        print(f"chi = {args.chi:g}: {rep.classification}"
              + (f" (growing modes: {rep.unstable_modes})" if rep.unstable_modes else ""))
    return EXIT_OK


def cmd_amplitude(args):
    c = amplitude_coefficients(args.a, args.L)
    print(f"# a={c.a:g} L={c.L:g} k*={c.k_star} chi*={c.chi_star:.10g} c1={c.c1:.10g} "
          f"c2={c.c2:.10g} lambda1={c.lambda1:.10g} lambda2={c.lambda2:.10g} "
          f"A_inf={steady_amplitude(c, args.eps):.10g}")
    t, A = solve_amplitude_ode(c, args.eps, args.A0, args.t_end, args.dt_ode,
                               sample_dt=args.sample_dt)
    if args.out:
        io.write_table(args.out, ["t", "A"], list(zip(t.tolist(), A.tolist())))
        print(f"# wrote {args.out}")
    else:
        print("t,A")
        for ti, ai in zip(t, A):
            print("%.17g,%.17g" % (ti, ai))
    return EXIT_OK


def cmd_sweep(args):
    cfg = load_config(args.config)
    rows = sweep_epsilon(cfg, _parse_floats(args.eps), workers=args.workers, out_path=args.out)
    print("eps,A_amp,A_pred,error")
    for r in rows:
        print("%g,%.10g,%.10g,%s" % (r.eps, r.A_amp, r.A_pred, r.error or ""))
    return EXIT_OK if all(r.error is None for r in rows) else EXIT_NUMERICAL


def build_parser():
    ap = argparse.ArgumentParser(prog="chemolv", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario from a config file")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stability", help="critical chemotaxis threshold of the coexistence state")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--dim", type=int, default=1, choices=(1, 2))
    p.add_argument("--chi", type=float)
    p.add_argument("--csv", action="store_true", help="print the per-mode table as CSV")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("amplitude", help="amplitude-equation coefficients and trajectory")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--A0", type=float, default=1e-2)
    p.add_argument("--t-end", dest="t_end", type=float, default=200.0)
    p.add_argument("--dt-ode", dest="dt_ode", type=float, default=1e-3)
    p.add_argument("--sample-dt", dest="sample_dt", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_amplitude)

    p = sub.add_parser("sweep", help="epsilon sweep of the amplitude-verify scenario")
    p.add_argument("config")
    p.add_argument("--eps", required=True, help="comma-separated list")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericalFailure, SingularSystem) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidArgument, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
