"""Command-line front end.

One subcommand per pipeline; long flags only. A JSON config file can supply
any flag set, with explicit flags taking precedence. Every output file
embeds the resolved configuration. Exit codes: 0 success, 1 usage error,
2 numeric-check failure, 3 window exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .circle import CircleLift, build_denjoy, rotation_number
from .factor import (build_tau, continuum_Cs, project_to_torus_factor,
                     verify_equivariance)
from .gallery import (example_fully_essential, example_unbounded_inessential,
                      obstruction_evidence, surgery_geometry, suspension_map)
from .rotation import deviation_profile, recurrence_probe
from .serialize import (NAMED_ANGLES, circle_lift_from_definition,
                        dump_mask, torus_map_from_definition, write_csv,
                        write_json)
from .skew import (build_centralized, check_closed_form,
                   check_commutation)
from .util import GOLDEN_MEAN, SQRT2_MINUS_1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2
EXIT_WINDOW = 3

GALLERY_ALIASES = {
    "3.1": "suspension",
    "3.2": "unbounded-inessential",
    "3.3": "fully-essential",
    "3.4-geometry": "surgery-geometry",
}
GALLERY_IDS = ("suspension", "unbounded-inessential", "fully-essential",
               "surgery-geometry")


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    pass


class WindowExhausted(Exception):
    pass


def _load_map(args):
    if args.map is not None:
        return torus_map_from_definition(json.loads(args.map))
    if args.map_file is not None:
        with open(args.map_file) as fh:
            return torus_map_from_definition(json.load(fh))
    raise UsageError("a torus map definition is required (--map or --map-file)")


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _resolved(args, names):
    cfg = {k: getattr(args, k.replace("-", "_")) for k in names}
    cfg["command"] = args.command
    return cfg


def cmd_rotnum(args):
    if args.rigid is not None:
        lift = CircleLift.rigid(_named(args.rigid))
    elif args.denjoy is not None:
        lift = build_denjoy(_named(args.denjoy), N=args.denjoy_order)
    elif args.circle is not None:
        lift = circle_lift_from_definition(json.loads(args.circle))
    else:
        raise UsageError("one of --rigid, --denjoy, --circle is required")
    est, bound = rotation_number(lift, args.x0, args.n)
    slack = lift.truncation_tol
    print(f"rotation number estimate {est!r} +- {bound + slack!r}")
    cfg = _resolved(args, ["n", "x0"])
    cfg["lift"] = lift.to_definition()
    write_json(os.path.join(_outdir(args), "rotnum.json"),
               {"estimate": est, "error_bound": bound,
                "truncation_slack": slack}, cfg)
    return EXIT_OK


def _named(v):
    try:
        return float(v)
    except ValueError:
        if v in NAMED_ANGLES:
            return NAMED_ANGLES[v]
        raise UsageError(f"not a number or named angle: {v}")


def cmd_deviations(args):
    spec = _load_map(args)
    if args.rho is None:
        raise UsageError("--rho is required")
    v = tuple(float(c) for c in args.v.split(","))
    prof = deviation_profile(spec, v, args.rho, n_max=args.nmax,
                             samples=args.samples, seed=args.seed)
    cfg = _resolved(args, ["rho", "nmax", "samples", "seed"])
    cfg["v"] = list(v)
    cfg["map"] = spec.to_definition()
    out = _outdir(args)
    write_csv(os.path.join(out, "deviations.csv"), ["n", "D"],
              zip(prof.n.tolist(), prof.value.tolist()), cfg)
    write_json(os.path.join(out, "deviations.json"),
               {"c_est": prof.c_est, "verdict": prof.verdict,
                "caveat": prof.caveat}, cfg)
    print(f"deviation verdict: {prof.verdict} (C_est={prof.c_est!r}, "
          f"{prof.caveat})")
    return EXIT_OK


def cmd_skeworbit(args):
    spec = _load_map(args)
    if args.rho is None:
        raise UsageError("--rho is required")
    skew = build_centralized(spec, args.rho)
    t, x, y = (float(c) for c in args.state.split(","))
    cur = np.array([[t, x, y]])
    rows = [(0, t, x, y)]
    lo = hi = y
    for n in range(1, args.nmax + 1):
        cur = skew.step(cur)
        rows.append((n, cur[0, 0], cur[0, 1], cur[0, 2]))
        lo = min(lo, cur[0, 2])
        hi = max(hi, cur[0, 2])
    cfg = _resolved(args, ["rho", "state", "nmax"])
    cfg["map"] = spec.to_definition()
    out = _outdir(args)
    write_csv(os.path.join(out, "orbit.csv"), ["n", "t", "x", "ytil"], rows, cfg)
    comm = check_commutation(skew, samples=200, seed=args.seed)
    write_json(os.path.join(out, "orbit.json"),
               {"oscillation": float(hi - lo), "commutation_defect": comm.defect},
               cfg)
    print(f"vertical oscillation over {args.nmax} steps: {float(hi - lo)!r}")
    if not comm.passed:
        raise CheckFailure(f"commutation defect {comm.defect!r} above threshold")
    return EXIT_OK


def cmd_factor(args):
    spec = _load_map(args)
    if args.rho is None:
        raise UsageError("--rho is required")
    if args.seed_point is None:
        raise UsageError("--seed-point is required")
    sx, sy = (float(c) for c in args.seed_point.split(","))
    skew = build_centralized(spec, args.rho, c_est=args.c_est)
    n_t, n_x, n_y = (int(c) for c in args.resolution.split(","))
    tau = build_tau(skew, (sx, sy), ball_radius=args.ball_radius,
                    n_t=n_t, n_x=n_x, n_y=n_y, half_height=args.window,
                    max_iters=args.max_iters, seed=args.seed)
    cfg = _resolved(args, ["rho", "seed-point", "resolution", "sladder",
                           "tol", "ball-radius", "seed"])
    cfg["map"] = spec.to_definition()
    out = _outdir(args)
    dump_mask(os.path.join(out, "region.json"), tau.mask, cfg)
    if tau.status == "window-exhausted":
        raise WindowExhausted("saturation reached the height window edge")
    fm = project_to_torus_factor(tau, grid=(args.grid, max(args.grid // 2, 8)),
                                 tol=args.tol)
    eq = verify_equivariance(tau, samples=64, tol=args.tol,
                             s_ladder=args.sladder, seed=args.seed)
    rows = []
    for i, x in enumerate(fm.x_grid):
        for j, y in enumerate(fm.y_grid):
            rows.append((x, y, fm.values[i, j]))
    write_csv(os.path.join(out, "factor.csv"), ["x", "ytil", "h"], rows, cfg)
    cells = tau.geom.h_y
    write_json(os.path.join(out, "defects.json"), {
        "semiconjugacy_defect_max": fm.defect_max,
        "semiconjugacy_defect_mean": fm.defect_mean,
        "cell_height": cells,
        "unit_translate_defect": eq.unit_translate_defect,
        "map_equivariance_defect": eq.map_defect,
        "ordering_violations": eq.ordering_violations,
        "status": tau.status,
        "invariance": tau.invariance,
        "warnings": tau.warnings,
    }, cfg)
    os.makedirs(os.path.join(out, "continua"), exist_ok=True)
    for j in range(args.sladder):
        s = j / args.sladder
        cs = continuum_Cs(tau, s)
        write_csv(os.path.join(out, "continua", f"cs_{j:03d}.csv"),
                  ["x", "ytil"], cs.points.tolist(),
                  dict(cfg, s=s, separating=bool(cs.separating)))
    print(f"factor defect max {fm.defect_max!r} ({fm.defect_max / cells:.2f} cells); "
          f"ordering violations {eq.ordering_violations}")
    if eq.ordering_violations:
        raise CheckFailure("ordering violations in the continuum ladder")
    return EXIT_OK


def cmd_gallery(args):
    name = GALLERY_ALIASES.get(args.example, args.example)
    if name not in GALLERY_IDS:
        raise UsageError("unknown example id %r; known ids: %s" % (
            args.example, ", ".join(sorted(GALLERY_IDS) + sorted(GALLERY_ALIASES))))
    out = _outdir(args)
    cfg = _resolved(args, ["nmax", "seed"])
    cfg["example"] = name
    if name == "suspension":
        susp = suspension_map(CircleLift.rigid(GOLDEN_MEAN),
                              CircleLift.rigid(SQRT2_MINUS_1))
        skew = build_centralized(susp.torus_map,
                                 susp.rho_base * susp.rho_fiber)
        comm = check_commutation(skew, seed=args.seed)
        closed = check_closed_form(skew, seed=args.seed)
        prof = deviation_profile(susp.torus_map, (0, 1),
                                 susp.rho_base * susp.rho_fiber,
                                 n_max=args.nmax, samples=64, seed=args.seed)
        payload = {"rotation_target": list(susp.rotation_target),
                   "commutation_defect": comm.defect,
                   "closed_form_defect": closed.defect,
                   "deviation_c_est": prof.c_est,
                   "deviation_verdict": prof.verdict}
        write_json(os.path.join(out, "gallery_suspension.json"), payload, cfg)
        print(f"suspension: commutation {comm.defect!r}, closed form "
              f"{closed.defect!r}, plateau {prof.c_est!r} ({prof.verdict})")
        if not (comm.passed and closed.passed):
            raise CheckFailure("algebra defect above threshold")
        return EXIT_OK
    if name == "surgery-geometry":
        geo = surgery_geometry((GOLDEN_MEAN, SQRT2_MINUS_1),
                               gamma=args.gamma, delta=args.delta,
                               n_scan=args.nscan)
        rows = []
        for n in range(-50, 51):
            center_width = geo.fiber_halfwidth(n, geo.center(n))
            rows.append((n, center_width, 2.0 ** (-abs(n) - 10) * geo.delta,
                         geo.domain_diameter(n)))
        write_csv(os.path.join(out, "surgery.csv"),
                  ["n", "halfwidth_at_center", "schedule_bound", "diameter"],
                  rows, dict(cfg, gamma=args.gamma, delta=args.delta))
        print(f"surgery geometry: diameters constant {2 * geo.delta!r}, "
              f"disjoint through {geo.n_scan} iterates")
        return EXIT_OK
    ex = (example_unbounded_inessential() if name == "unbounded-inessential"
          else example_fully_essential())
    prof = deviation_profile(ex.torus_map, (0, 1), ex.rho_vertical,
                             n_max=args.nmax, samples=32, seed=args.seed)
    times = recurrence_probe(ex.torus_map, ex.wandering_center,
                             0.8 * ex.wandering_radius, n_max=args.nmax // 5,
                             seed=args.seed)
    ev = obstruction_evidence(ex, n_max=args.nmax)
    payload = {
        "probe_points": {"w0": ex.w0, "w1": ex.w1, "w0_edge": ex.w0_edge,
                         "w1_edge": ex.w1_edge},
        "deviation_c_est": prof.c_est,
        "deviation_verdict": prof.verdict,
        "recurrence_times_in_block": times,
        "forward_min": ev["forward_pair"].forward_min,
        "backward_min": ev["backward_pair"].backward_min,
        "obstruction_evidence": ev["obstruction_evidence"],
        "notes": ex.notes,
    }
    write_json(os.path.join(out, f"gallery_{name}.json"), payload, cfg)
    print(f"{name}: plateau {prof.c_est!r} ({prof.verdict}), "
          f"recurrence times {len(times)}, "
          f"proximality minima {ev['forward_pair'].forward_min!r}/"
          f"{ev['backward_pair'].backward_min!r}, "
          f"obstruction evidence: {ev['obstruction_evidence']}")
    return EXIT_OK


def cmd_double_factor(args):
    spec = _load_map(args)
    if spec.k != 0:
        raise UsageError("double factor requires a map homotopic to the identity")
    from .rotation import estimate_rotation_set

    cloud = estimate_rotation_set(spec, n_ladder=(200, 2000), samples=32,
                                  seed=args.seed)
    pts = cloud.deepest()
    spreadv = pts.max(axis=0) - pts.min(axis=0)
    if np.any(spreadv > 0.01):
        raise UsageError("rotation cloud not a point; the map is not a "
                         "pseudo-rotation, refusing")
    rho1, rho2 = pts.mean(axis=0)
    n_t, n_x, n_y = (int(c) for c in args.resolution.split(","))
    out = _outdir(args)
    cfg = _resolved(args, ["resolution", "seed"])
    cfg["map"] = spec.to_definition()

    skew_v = build_centralized(spec, rho2)
    tau_v = build_tau(skew_v, (0.5, 0.0), n_t=n_t, n_x=n_x, n_y=n_y,
                      max_iters=args.max_iters, seed=args.seed)
    if tau_v.status == "window-exhausted":
        raise WindowExhausted("vertical pipeline exhausted the window")
    fm_v = project_to_torus_factor(tau_v, grid=(args.grid, args.grid))

    swapped = _SwappedMap(spec)
    skew_h = build_centralized(swapped, rho1)
    tau_h = build_tau(skew_h, (0.5, 0.0), n_t=n_t, n_x=n_x, n_y=n_y,
                      max_iters=args.max_iters, seed=args.seed)
    if tau_h.status == "window-exhausted":
        raise WindowExhausted("horizontal pipeline exhausted the window")
    fm_h = project_to_torus_factor(tau_h, grid=(args.grid, args.grid))

    from .factor import combine_transverse_factors

    joint = combine_transverse_factors(fm_v, fm_h, spec, (rho1, rho2),
                                       samples=256, seed=args.seed)
    payload = {"rho": [rho1, rho2],
               "vertical_defect_max": fm_v.defect_max,
               "horizontal_defect_max": fm_h.defect_max,
               "joint": joint,
               "cell_heights": [tau_v.geom.h_y, tau_h.geom.h_y]}
    write_json(os.path.join(out, "double_factor.json"), payload, cfg)
    print(f"double factor: vertical defect {fm_v.defect_max!r}, "
          f"horizontal defect {fm_h.defect_max!r}")
    return EXIT_OK


class _SwappedMap:
    """Coordinate swap conjugate of a torus map (plumbing for the pair)."""

    kind = "swapped"
    k = 0

    def __init__(self, spec):
        if spec.k != 0:
            raise ValueError("swap needs a map homotopic to the identity")
        self.spec = spec

    def _swap(self, z):
        return np.asarray(z, dtype=float)[..., ::-1]

    def eval_lift(self, z):
        return self._swap(self.spec.eval_lift(self._swap(z)))

    def eval_inverse(self, z):
        return self._swap(self.spec.eval_inverse(self._swap(z)))

    def annulus_map(self, z, inverse=False):
        from .util import wrap01

        z = np.asarray(z, dtype=float)
        w = z.copy()
        w[..., 0] = wrap01(z[..., 0])
        out = self.eval_inverse(w) if inverse else self.eval_lift(w)
        out[..., 0] = wrap01(out[..., 0])
        return out

    def eval_torus(self, z):
        from .util import wrap01

        return wrap01(self.eval_lift(wrap01(np.asarray(z, dtype=float))))

    def eval_torus_inverse(self, z):
        from .util import wrap01

        return wrap01(self.eval_inverse(wrap01(np.asarray(z, dtype=float))))

    def to_definition(self):
        return {"kind": "swapped", "inner": self.spec.to_definition()}


def _add_common(sub, with_map=True):
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--seed", type=int, default=0, help="sampling seed")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker cap (recorded; computation is single-process)")
    sub.add_argument("--config", default=None,
                     help="JSON file supplying any of the flags")
    if with_map:
        sub.add_argument("--map", default=None,
                         help="inline JSON torus map definition")
        sub.add_argument("--map-file", default=None,
                         help="path to a JSON torus map definition")


def build_parser():
    p = argparse.ArgumentParser(prog="torusdyn",
                                description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("rotnum", help="rotation number of a circle lift")
    s.add_argument("--rigid", default=None,
                   help="rigid rotation angle (number or golden/sqrt2)")
    s.add_argument("--denjoy", default=None,
                   help="truncated blow-up targeting this angle")
    s.add_argument("--denjoy-order", type=int, default=40)
    s.add_argument("--circle", default=None, help="inline JSON circle lift")
    s.add_argument("--n", type=int, default=100_000)
    s.add_argument("--x0", type=float, default=0.0)
    _add_common(s, with_map=False)
    s.set_defaults(func=cmd_rotnum)

    s = subs.add_parser("deviations", help="directional deviation table")
    s.add_argument("--v", default="0,1", help="direction, e.g. 0,1")
    s.add_argument("--rho", type=float, default=None)
    s.add_argument("--nmax", type=int, default=10_000)
    s.add_argument("--samples", type=int, default=64)
    _add_common(s)
    s.set_defaults(func=cmd_deviations)

    s = subs.add_parser("skeworbit", help="skew-product orbit dump")
    s.add_argument("--rho", type=float, default=None)
    s.add_argument("--state", default="0,0,0", help="t,x,ytil")
    s.add_argument("--nmax", type=int, default=10_000)
    _add_common(s)
    s.set_defaults(func=cmd_skeworbit)

    s = subs.add_parser("factor", help="circle-factor pipeline")
    s.add_argument("--rho", type=float, default=None)
    s.add_argument("--seed-point", default=None, help="x,ytil")
    s.add_argument("--ball-radius", type=float, default=0.15)
    s.add_argument("--resolution", default="256,256,512")
    s.add_argument("--window", type=float, default=None,
                   help="half height override")
    s.add_argument("--sladder", type=int, default=64)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--grid", type=int, default=48)
    s.add_argument("--max-iters", type=int, default=240)
    s.add_argument("--c-est", type=float, default=None)
    _add_common(s)
    s.set_defaults(func=cmd_factor)

    s = subs.add_parser("gallery", help="run a gallery example report")
    s.add_argument("example", help="example id")
    s.add_argument("--nmax", type=int, default=10_000)
    s.add_argument("--gamma", type=float, default=0.7374747)
    s.add_argument("--delta", type=float, default=0.01)
    s.add_argument("--nscan", type=int, default=50)
    _add_common(s, with_map=False)
    s.set_defaults(func=cmd_gallery)

    s = subs.add_parser("double-factor",
                        help="paired transverse factors for pseudo-rotations")
    s.add_argument("--resolution", default="128,128,256")
    s.add_argument("--grid", type=int, default=32)
    s.add_argument("--max-iters", type=int, default=240)
    _add_common(s)
    s.set_defaults(func=cmd_double_factor)
    return p


def _apply_config_file(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        for key, val in file_cfg.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise UsageError(f"unknown config key: {key}")
            # explicit flags win: only fill values still at their defaults
            if getattr(args, attr) == _DEFAULTS.get((args.command, attr)):
                setattr(args, attr, val)
    return args


_DEFAULTS = {}


def _record_defaults(parser):
    for action in parser._subparsers._group_actions[0].choices.items():
        name, sub = action
        for a in sub._actions:
            if a.dest not in ("help",):
                _DEFAULTS[(name, a.dest)] = a.default


def main(argv=None):
    parser = build_parser()
    _record_defaults(parser)
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return EXIT_OK if e.code in (0, None) else EXIT_USAGE
        _apply_config_file(args)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailure as e:
        print(f"numeric check failed: {e}", file=sys.stderr)
        return EXIT_CHECK
    except WindowExhausted as e:
        print(f"window exhausted: {e}", file=sys.stderr)
        return EXIT_WINDOW
    except (ValueError, json.JSONDecodeError, OSError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
