"""Command-line front end: eval, sweep, figure, worstcase.

Emits JSON or CSV only (no plotting).  All output is deterministic:
fixed grid orders, fixed float formatting (17 significant digits in
CSV), LF line endings, sorted JSON keys.
"""

import argparse
import json
import math
import random
import sys

import mpmath
import numpy as np

from . import prasym, sphere, tetra, uniform
from .core import (HalfInt, OnCausticError, SixJError, SixJLabels,
                   TRIANGLES, ValidationError, WrongRegionError, bounds,
                   exact_sixj, lengths)

LABEL_FLAGS = ("j1", "j2", "j12", "j3", "j4", "j23")
METHODS = ("exact", "pr", "uniform")
FIGURE_KINDS = ("spots", "beta-contours", "j23-orbits", "caustic-diagrams")
FAMILIES = ("equal-pairs", "three-zeros", "random")

_FIGURE_GRID_DEFAULT = {"spots": 201, "beta-contours": 41,
                        "j23-orbits": 128, "caustic-diagrams": 201}
_TOUCH_TOL = 1e-6   # |det G| / caustic scale at an accepted touch point


def _fmt(x):
    if x is None:
        return ""
    x = float(x)
    if not math.isfinite(x):
        return ""
    return "%.17g" % x


def _clean(obj):
    """JSON-ready copy: non-finite floats to null, HalfInt to string."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, HalfInt):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    return obj


def _write(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _json(payload):
    return json.dumps(_clean(payload), indent=2, sort_keys=True)


def _parse_methods(arg):
    methods = tuple(m.strip() for m in arg.split(",") if m.strip())
    if not methods:
        raise ValidationError("--methods must name at least one method")
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}; "
                                  f"choose from {', '.join(METHODS)}")
    return methods


def _labels_from(args):
    vals = []
    for name in LABEL_FLAGS:
        v = getattr(args, name)
        if v is None:
            raise ValidationError(f"--{name} is required")
        vals.append(v)
    return SixJLabels.of(*vals)


# ---------------------------------------------------------------- eval

def eval_record(labels, methods, digits=17):
    b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    region = tetra.classify(lengths(labels), b)
    rec = {
        "labels": {n: str(getattr(labels, n)) for n in LABEL_FLAGS},
        "D": b.D,
        "degenerate_D1": b.D == 1,
        "region": region.kind,
        "pattern_index": region.pattern_index,
    }
    exact_v = None
    if "exact" in methods:
        ev = exact_sixj(labels)
        exact_v = float(ev)
        rec["exact"] = {
            "value": exact_v,
            "digits": mpmath.nstr(ev.value, digits),
            "rational": str(ev.rational),
            "radicand": str(ev.radicand),
        }
    if "pr" in methods:
        try:
            pr = prasym.pr_value(labels)
            rec["pr"] = {"value": pr.value, "phase": pr.phase,
                         "amplitude": pr.amplitude, "nu_6j": pr.nu6j}
            if exact_v is not None:
                rec["pr"]["abs_err"] = abs(pr.value - exact_v)
        except OnCausticError as e:
            rec["pr"] = {"value": None, "note": str(e)}
    if "uniform" in methods:
        u = uniform.uniform_6j(labels)
        rec["uniform"] = {
            "value": u.value,
            "beta": u.map.beta,
            "j": str(u.map.j), "m": str(u.map.m), "mp": str(u.map.mp),
            "nu_ex": u.map.nu_ex, "Phi0": u.map.Phi0,
            "pr_amp": u.pr_amp, "d_amp": u.d_amp,
            "near_caustic": u.near_caustic,
            "solver": {"iterations": u.map.solver.iterations,
                       "residual": u.map.solver.residual,
                       "bracket": list(u.map.solver.bracket),
                       "region": u.map.solver.region},
        }
        if exact_v is not None:
            rec["uniform"]["abs_err"] = abs(u.value - exact_v)
    return rec


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}{k}." if prefix else f"{k}.", obj[k], rows)
        return
    key = prefix[:-1]
    if isinstance(obj, list):
        rows.append((key, " ".join(str(v) for v in obj)))
    elif isinstance(obj, float):
        rows.append((key, _fmt(obj)))
    else:
        rows.append((key, "" if obj is None else str(obj)))


def cmd_eval(args):
    labels = _labels_from(args)
    rec = eval_record(labels, _parse_methods(args.methods), args.digits)
    if args.format == "json":
        _write(args, _json(rec))
    else:
        rows = []
        _flatten("", _clean(rec), rows)
        _write(args, "key,value\n"
               + "\n".join(f"{k},{v}" for k, v in rows))
    return 0


# --------------------------------------------------------------- sweep

def sweep_range(fixed, swept):
    """Lattice of valid twice-values for the swept label, the other five
    fixed; intersects the two triangles containing the label."""
    lo, hi, par = 0, None, None
    for names in TRIANGLES:
        if swept not in names:
            continue
        ta, tb = (fixed[n].twice for n in names if n != swept)
        lo = max(lo, abs(ta - tb))
        hi = ta + tb if hi is None else min(hi, ta + tb)
        p = (ta + tb) % 2
        if par is None:
            par = p
        elif par != p:
            raise ValidationError(
                f"no valid {swept}: the two triangles demand different "
                "integer/half-integer character")
    if (lo + par) % 2:
        lo += 1
    if hi < lo:
        raise ValidationError(f"no valid {swept}: range is empty")
    return range(lo, hi + 1, 2)


def sweep_rows(fixed, swept, methods):
    rows = []
    for t in sweep_range(fixed, swept):
        labels = SixJLabels(**{**fixed, swept: HalfInt(t)})
        b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
        region = tetra.classify(lengths(labels), b)
        exact_v = float(exact_sixj(labels)) if "exact" in methods else None
        pr_v = None
        if "pr" in methods:
            try:
                pr_v = prasym.pr_value(labels).value
            except OnCausticError:
                pr_v = None
        uni_v = beta = None
        if "uniform" in methods:
            u = uniform.uniform_6j(labels)
            uni_v, beta = u.value, u.map.beta
        rows.append({
            swept: t / 2.0,
            "exact": exact_v,
            "pr": pr_v,
            "uniform": uni_v,
            "abs_err_pr": (abs(pr_v - exact_v)
                           if pr_v is not None and exact_v is not None
                           else None),
            "abs_err_uniform": (abs(uni_v - exact_v)
                                if uni_v is not None and exact_v is not None
                                else None),
            "region": region.kind,
            "beta": beta,
        })
    return rows


_SWEEP_COLUMNS = ("exact", "pr", "uniform", "abs_err_pr",
                  "abs_err_uniform", "region", "beta")


def cmd_sweep(args):
    swept = args.sweep
    if swept not in LABEL_FLAGS:
        raise ValidationError(f"--sweep must be one of {LABEL_FLAGS}")
    if getattr(args, swept) is not None:
        raise ValidationError(f"--{swept} conflicts with --sweep {swept}")
    fixed = {}
    for name in LABEL_FLAGS:
        if name == swept:
            continue
        v = getattr(args, name)
        if v is None:
            raise ValidationError(f"--{name} is required for this sweep")
        fixed[name] = HalfInt.of(v)
    rows = sweep_rows(fixed, swept, _parse_methods(args.methods))
    if args.format == "json":
        _write(args, _json(rows))
        return 0
    lines = [swept + "," + ",".join(_SWEEP_COLUMNS)]
    for r in rows:
        cells = [_fmt(r[swept])]
        for c in _SWEEP_COLUMNS:
            cells.append(r[c] if c == "region" else _fmt(r[c]))
        lines.append(",".join(cells))
    _write(args, "\n".join(lines))
    return 0


# -------------------------------------------------------------- figure

def _square_grid(b, n):
    """n cell-center values per axis, strictly inside the square."""
    xs = [b.J12_min + (b.J12_max - b.J12_min) * (i + 0.5) / n
          for i in range(n)]
    ys = [b.J23_min + (b.J23_max - b.J23_min) * (i + 0.5) / n
          for i in range(n)]
    return xs, ys


def _caustic_roots_on_line(lo, hi, n, f):
    """Roots of f (det G along one grid line) by scan and bisection."""
    roots = []
    prev_s, prev_v = lo, f(lo)
    for i in range(1, n):
        s = lo + (hi - lo) * i / (n - 1)
        v = f(s)
        if prev_v == 0.0:
            roots.append(prev_s)
        elif v != 0.0 and (prev_v < 0.0) != (v < 0.0):
            a, fa, bb = prev_s, prev_v, s
            for _ in range(80):
                mid = 0.5 * (a + bb)
                fm = f(mid)
                if fm == 0.0:
                    a = bb = mid
                    break
                if (fm < 0.0) == (fa < 0.0):
                    a, fa = mid, fm
                else:
                    bb = mid
            roots.append(0.5 * (a + bb))
        prev_s, prev_v = s, v
    return roots


def _side_touch(four, b, side, n=2001):
    """Maximum of det G along one square side, refined by ternary
    search; the caustic touches the side where this maximum vanishes."""
    J1, J2, J3, J4 = four
    if side in ("J12_min", "J12_max"):
        c = b.J12_min if side == "J12_min" else b.J12_max
        lo, hi = b.J23_min, b.J23_max
        f = lambda s: tetra.det_gram((J1, J2, J3, J4, c, s))
    else:
        c = b.J23_min if side == "J23_min" else b.J23_max
        lo, hi = b.J12_min, b.J12_max
        f = lambda s: tetra.det_gram((J1, J2, J3, J4, s, c))
    best_i = max(range(n), key=lambda i: f(lo + (hi - lo) * i / (n - 1)))
    a = lo + (hi - lo) * max(best_i - 1, 0) / (n - 1)
    bb = lo + (hi - lo) * min(best_i + 1, n - 1) / (n - 1)
    for _ in range(200):
        m1 = a + (bb - a) / 3.0
        m2 = bb - (bb - a) / 3.0
        if f(m1) < f(m2):
            a = m1
        else:
            bb = m2
    s = 0.5 * (a + bb)
    g = f(s)
    if side in ("J12_min", "J12_max"):
        J12, J23 = c, s
    else:
        J12, J23 = s, c
    scale = (J1 * J12 * J4) ** (4.0 / 3.0)
    return {"side": side, "J12": J12, "J23": J23, "det_g": g,
            "touch": abs(g) <= _TOUCH_TOL * scale}


def figure_spots(js, grid):
    b = bounds(*js)
    four = tuple(float(x) + 0.5 for x in js)
    J1, J2, J3, J4 = four
    points = []
    for t12 in range(b.j12_min.twice, b.j12_max.twice + 1, 2):
        for t23 in range(b.j23_min.twice, b.j23_max.twice + 1, 2):
            J12, J23 = t12 / 2.0 + 0.5, t23 / 2.0 + 0.5
            region = tetra.classify((J1, J2, J3, J4, J12, J23), b)
            margin = min(J12 - b.J12_min, b.J12_max - J12,
                         J23 - b.J23_min, b.J23_max - J23)
            points.append({"j12": str(HalfInt(t12)), "j23": str(HalfInt(t23)),
                           "J12": J12, "J23": J23,
                           "region": region.kind, "margin": margin})
    curve = []
    for J23 in _square_grid(b, grid)[1]:
        f = lambda s: tetra.det_gram((J1, J2, J3, J4, s, J23))
        for r in _caustic_roots_on_line(b.J12_min, b.J12_max, grid, f):
            curve.append([r, J23])
    for J12 in _square_grid(b, grid)[0]:
        f = lambda s: tetra.det_gram((J1, J2, J3, J4, J12, s))
        for r in _caustic_roots_on_line(b.J23_min, b.J23_max, grid, f):
            curve.append([J12, r])
    touches = [_side_touch(four, b, side)
               for side in ("J12_min", "J12_max", "J23_min", "J23_max")]
    return {
        "square": {"J12": [b.J12_min, b.J12_max],
                   "J23": [b.J23_min, b.J23_max]},
        "D": b.D,
        "points": points,
        "caustic": curve,
        "touches": touches,
    }


def figure_beta_contours(js, grid):
    b = bounds(*js)
    xs, ys = _square_grid(b, grid)
    rows = []
    for J12 in xs:
        for J23 in ys:
            beta, rep = uniform.beta_field(*js, J12, J23)
            rows.append({"J12": J12, "J23": J23, "beta": beta,
                         "region": rep.region})
    return {"square": {"J12": [b.J12_min, b.J12_max],
                       "J23": [b.J23_min, b.J23_max]},
            "grid": grid, "rows": rows}


def figure_j23_orbits(js, grid):
    x, y, Z, contours = sphere.j23_contour_grid(*js, n_J12=grid, n_phi=grid)
    levels = []
    for lev in sorted(contours):
        levels.append({
            "level": lev,
            "polylines": [p.tolist() for p in contours[lev]],
        })
    return {"J12_range": [float(x[0]), float(x[-1])],
            "n_J12": len(x), "n_phi": len(y), "levels": levels}


def figure_caustic_diagram(js, grid):
    b = bounds(*js)
    x = np.linspace(b.J12_min, b.J12_max, grid)
    y = np.linspace(b.J23_min, b.J23_max, grid)
    four = tuple(float(v) + 0.5 for v in js)
    Z = np.empty((grid, grid))
    for i, J12 in enumerate(x):
        for k, J23 in enumerate(y):
            Z[i, k] = tetra.det_gram(four + (J12, J23))
    polys = sphere.contour_polylines(x, y, Z, 0.0, wrap_y=False)
    return {"square": {"J12": [b.J12_min, b.J12_max],
                       "J23": [b.J23_min, b.J23_max]},
            "polylines": [p.tolist() for p in polys]}


def cmd_figure(args):
    js = []
    for name in ("j1", "j2", "j3", "j4"):
        v = getattr(args, name)
        if v is None:
            raise ValidationError(f"--{name} is required for figures")
        js.append(HalfInt.of(v))
    grid = args.grid or _FIGURE_GRID_DEFAULT[args.kind]
    if grid < 8:
        raise ValidationError("--grid must be at least 8")
    builder = {
        "spots": figure_spots,
        "beta-contours": figure_beta_contours,
        "j23-orbits": figure_j23_orbits,
        "caustic-diagrams": figure_caustic_diagram,
    }[args.kind]
    payload = builder(tuple(js), grid)
    if args.format == "json":
        _write(args, _json(payload))
        return 0
    lines = ["block,a,b,c,d"]
    if args.kind == "spots":
        for p in payload["points"]:
            lines.append(f"point,{_fmt(p['J12'])},{_fmt(p['J23'])},"
                         f"{p['region']},{_fmt(p['margin'])}")
        for cx, cy in payload["caustic"]:
            lines.append(f"caustic,{_fmt(cx)},{_fmt(cy)},,")
        for t in payload["touches"]:
            lines.append(f"touch,{_fmt(t['J12'])},{_fmt(t['J23'])},"
                         f"{t['side']},{int(t['touch'])}")
    elif args.kind == "beta-contours":
        for r in payload["rows"]:
            lines.append(f"beta,{_fmt(r['J12'])},{_fmt(r['J23'])},"
                         f"{_fmt(r['beta'])},{r['region']}")
    elif args.kind == "j23-orbits":
        for lev in payload["levels"]:
            for piece, poly in enumerate(lev["polylines"]):
                for px, py in poly:
                    lines.append(f"orbit,{_fmt(lev['level'])},{piece},"
                                 f"{_fmt(px)},{_fmt(py)}")
    else:
        for piece, poly in enumerate(payload["polylines"]):
            for px, py in poly:
                lines.append(f"caustic,{piece},{_fmt(px)},{_fmt(py)},")
    _write(args, "\n".join(lines))
    return 0


# ----------------------------------------------------------- worstcase

def amplitude_reference(labels, b=None, region=None):
    """Reference scale for relative errors: |exact| in forbidden
    regions; the PR amplitude in the allowed interior; in the
    turning-point lobe (a caustic point, or the extreme lattice point
    of the allowed j12 range) the PR amplitude at the nearest interior
    allowed neighbor along j12, since the amplitude at the point
    itself is inflated by the nearby caustic."""
    if b is None:
        b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    J = lengths(labels)
    if region is None:
        region = tetra.classify(J, b)
    if region.is_forbidden:
        return abs(float(exact_sixj(labels)))
    in_lobe = region.is_caustic or labels.j12.twice in (b.j12_min.twice,
                                                        b.j12_max.twice)
    if region.is_allowed and not in_lobe:
        return 1.0 / math.sqrt(12.0 * math.pi * tetra.construct(J).vol_abs)
    toward = 2 if labels.j12.twice < b.j12_avg.twice else -2
    t12 = labels.j12.twice + toward
    while b.j12_min.twice <= t12 <= b.j12_max.twice:
        nb = SixJLabels(labels.j1, labels.j2, HalfInt(t12),
                        labels.j3, labels.j4, labels.j23)
        Jn = lengths(nb)
        if tetra.classify(Jn, b).is_allowed:
            return 1.0 / math.sqrt(12.0 * math.pi
                                   * tetra.construct(Jn).vol_abs)
        t12 += toward
    if region.is_allowed:
        return 1.0 / math.sqrt(12.0 * math.pi * tetra.construct(J).vol_abs)
    return abs(float(exact_sixj(labels)))


def worstcase_row(labels):
    b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    region = tetra.classify(lengths(labels), b)
    exact_v = float(exact_sixj(labels))
    ref = amplitude_reference(labels, b, region)
    try:
        pr_v = prasym.pr_value(labels).value
    except OnCausticError:
        pr_v = None
    uni_v = uniform.uniform_6j(labels).value
    return {
        "labels": {n: str(getattr(labels, n)) for n in LABEL_FLAGS},
        "region": region.kind,
        "exact": exact_v,
        "reference": ref,
        "err_pr": abs(pr_v - exact_v) / ref if pr_v is not None else None,
        "err_uniform": abs(uni_v - exact_v) / ref,
    }


def _random_labels(rng, j_max):
    tmax = 2 * j_max
    while True:
        t1, t2, t3 = (rng.randint(1, tmax) for _ in range(3))
        t4 = rng.randint(1, tmax)
        if (t1 + t2 - t3 - t4) % 2:
            continue
        try:
            b = bounds(HalfInt(t1), HalfInt(t2), HalfInt(t3), HalfInt(t4))
        except ValidationError:
            continue
        t12 = rng.randrange(b.j12_min.twice, b.j12_max.twice + 1, 2)
        t23 = rng.randrange(b.j23_min.twice, b.j23_max.twice + 1, 2)
        return SixJLabels(HalfInt(t1), HalfInt(t2), HalfInt(t12),
                          HalfInt(t3), HalfInt(t4), HalfInt(t23))


def worstcase_report(family, j_max=20, seed=0, count=200):
    rows = []
    if family == "equal-pairs":
        for tj in range(2, 2 * j_max + 1):
            j = HalfInt(tj)
            z = HalfInt(0)
            rows.append(worstcase_row(SixJLabels(j, j, z, j, j, z)))
    elif family == "three-zeros":
        for tj in range(2, 2 * j_max + 1):
            j = HalfInt(tj)
            z = HalfInt(0)
            rows.append(worstcase_row(SixJLabels(z, z, z, j, j, j)))
    elif family == "random":
        rng = random.Random(seed)
        for _ in range(count):
            rows.append(worstcase_row(_random_labels(rng, j_max)))
    else:
        raise ValidationError(f"unknown family {family!r}")
    worst = {}
    for key in ("err_pr", "err_uniform"):
        vals = [(r[key], i) for i, r in enumerate(rows)
                if r[key] is not None]
        if vals:
            err, i = max(vals)
            worst[key] = {"labels": rows[i]["labels"], "err": err}
    return {"family": family, "j_max": j_max, "rows": rows, "worst": worst}


def cmd_worstcase(args):
    report = worstcase_report(args.family, args.j_max, args.seed)
    if args.format == "json":
        _write(args, _json(report))
        return 0
    lines = ["block," + ",".join(LABEL_FLAGS) + ",region,err_pr,err_uniform"]
    for r in report["rows"]:
        cells = [r["labels"][n] for n in LABEL_FLAGS]
        lines.append("row," + ",".join(cells)
                     + f",{r['region']},{_fmt(r['err_pr'])},"
                     f"{_fmt(r['err_uniform'])}")
    for key in ("err_pr", "err_uniform"):
        if key in report["worst"]:
            w = report["worst"][key]
            cells = [w["labels"][n] for n in LABEL_FLAGS]
            lines.append(f"worst_{key}," + ",".join(cells)
                         + f",,{_fmt(w['err'])},")
    _write(args, "\n".join(lines))
    return 0


# ---------------------------------------------------------------- main

def _add_label_flags(p, names=LABEL_FLAGS):
    for name in names:
        p.add_argument(f"--{name}", help=f"quantum number {name}, "
                       "like 4, 39/2, or 3.5")


def build_parser():
    p = argparse.ArgumentParser(
        prog="sixj",
        description="Wigner 6j symbols: exact values, Ponzano-Regge and "
                    "uniform semiclassical approximations.")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate one symbol")
    _add_label_flags(pe)
    pe.add_argument("--methods", default="exact,pr,uniform")
    pe.add_argument("--format", choices=("json", "csv"), default="json")
    pe.add_argument("--digits", type=int, default=17)
    pe.add_argument("--out")

    ps = sub.add_parser("sweep", help="sweep one label over its range")
    _add_label_flags(ps)
    ps.add_argument("--sweep", default="j12",
                    help="label to sweep (default j12)")
    ps.add_argument("--methods", default="exact,pr,uniform")
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.add_argument("--out")

    pf = sub.add_parser("figure", help="emit figure data")
    pf.add_argument("--kind", choices=FIGURE_KINDS, required=True)
    _add_label_flags(pf, ("j1", "j2", "j3", "j4"))
    pf.add_argument("--grid", type=int)
    pf.add_argument("--format", choices=("json", "csv"), default="json")
    pf.add_argument("--out")

    pw = sub.add_parser("worstcase", help="scan an error family")
    pw.add_argument("--family", choices=FAMILIES, required=True)
    pw.add_argument("--j-max", type=int, default=20)
    pw.add_argument("--seed", type=int, default=0)
    pw.add_argument("--format", choices=("json", "csv"), default="json")
    pw.add_argument("--out")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    cmd = {"eval": cmd_eval, "sweep": cmd_sweep,
           "figure": cmd_figure, "worstcase": cmd_worstcase}[args.command]
    try:
        return cmd(args)
    except (ValidationError, WrongRegionError) as e:
        print(f"sixj: error: {e}", file=sys.stderr)
        return 2
    except SixJError as e:
        print(f"sixj: internal error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
