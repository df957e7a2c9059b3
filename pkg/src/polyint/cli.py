"""Command-line front end: ``polyint <command> --body BODY.json ...``.

Exit status is 0 on success, 1 on bad input and 2 when a computation
completes but its verdict is negative (a rejected recovery, an
inconsistent axial profile, a failed check). Error messages go to stderr
as one JSON object. Every output embeds the tool version and a digest of
the run configuration, and identical configurations give identical bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .axial import CONSISTENT, axial_verdict
from .bodies import body_from_dict, body_to_dict, contains, support
from .exceptions import AccuracyWarning, PolyIntError, RecoveryError
from .phase import eval_expansion, finiteness_check, phase_expansion
from .polyfit import (POLYNOMIAL, antipode_index, endpoint_exponent, field_from_fits, fit_polynomials,
                      moment_orthogonality, parity_check)
from .recovery import EllipsoidRecovery
from .sections import back_project, fourier_chi, fourier_record, section_curves, write_curve_csv
from .spherical import direction_grid

log = logging.getLogger("polyint")

EXIT_OK, EXIT_INPUT, EXIT_VERDICT = 0, 1, 2
DEFAULT_GRID = {"vsec": 64, "fit": 64, "exponent": 16, "recover": 512, "invert": 2048, "checks": 128}
DEFAULT_NODES = {"exponent": 256, "invert": 64, "checks": 64}


class CliInputError(Exception):
    """Bad command-line or file input; carries an optional file position."""

    def __init__(self, message, path=None, line=None, column=None):
        super().__init__(message)
        self.path, self.line, self.column = path, line, column

    def to_dict(self):
        return {"error": str(self), "file": self.path, "line": self.line, "column": self.column}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliInputError(message)


# -- argument parsing --------------------------------------------------------


def _float_list(text, name):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliInputError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise CliInputError(f"{name}: expected finite numbers, got {text!r}")
    return vals


def _alpha_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise CliInputError(f"--alpha: expected MIN:MAX:K, got {text!r}")
    try:
        lo, hi, k = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CliInputError(f"--alpha: expected MIN:MAX:K, got {text!r}") from None
    if not (0 < lo < hi) or k < 4:
        raise CliInputError("--alpha: need 0 < MIN < MAX and K >= 4")
    return lo, hi, k


def build_parser():
    p = _Parser(prog="polyint", description="Section-volume experiments on convex bodies.")
    p.add_argument("--version", action="version", version=f"polyint {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "vsec": "section-volume curves as CSV",
        "fit": "polynomial fit reports",
        "exponent": "endpoint vanishing exponents",
        "recover": "recover an ellipsoid from its section curves",
        "phase": "finite stationary-phase expansion and validation table",
        "invert": "back-projection membership values on a point grid (n = 3)",
        "axial": "growth-law verdict for a body of revolution",
        "checks": "parity, moment-orthogonality and Cavalieri suites",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--body", required=True, help="body JSON file")
        g = s.add_mutually_exclusive_group()
        g.add_argument("--omega", help="direction x,y,z (normalized)")
        g.add_argument("--grid", type=int, help="number of grid directions")
        s.add_argument("--nodes", type=int, help="Chebyshev-Lobatto nodes per curve")
        s.add_argument("--tol", type=float, default=1e-7, help="relative fit tolerance")
        s.add_argument("--max-degree", type=int, help="largest degree tried by the fits")
        s.add_argument("--r", help="comma-separated frequencies")
        s.add_argument("--alpha", help="MIN:MAX:K range for the growth law")
        s.add_argument("--resolution", type=int, default=9, help="points per axis for invert")
        s.add_argument("--out", help="output file (default stdout)")
        s.add_argument("--seed", type=int, default=0, help="seed for stochastic quadrature and grids")
        s.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="worker processes")
    return p


# -- configuration -----------------------------------------------------------


def _line_of(text, needle):
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def load_body(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliInputError(f"cannot read body file: {exc.strerror}", path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliInputError(f"malformed JSON: {exc.msg}", path, exc.lineno, exc.colno) from None
    try:
        return body_from_dict(data)
    except PolyIntError as exc:
        key = '"kind"' if "kind" in str(exc) else None
        raise CliInputError(str(exc), path, _line_of(text, key) if key else None) from None


def _config(args, body):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "workers", "body")}
    cfg["body"] = body_to_dict(body)
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    cfg["digest"] = hashlib.sha256(blob.encode()).hexdigest()[:16]
    cfg["version"] = __version__
    return cfg


def _directions(args, body, command):
    if args.omega is not None:
        w = np.array(_float_list(args.omega, "--omega"))
        if w.size != body.dim:
            raise CliInputError(f"--omega has {w.size} components, body has dimension {body.dim}")
        norm = np.linalg.norm(w)
        if norm == 0:
            raise CliInputError("--omega must be non-zero")
        return (w / norm)[None, :], None
    k = args.grid if args.grid is not None else DEFAULT_GRID.get(command, 64)
    if k < 2 or k % 2:
        raise CliInputError("--grid must be an even number >= 2")
    return direction_grid(body.dim, k, args.seed)


def _nodes(args, command):
    m = args.nodes if args.nodes is not None else DEFAULT_NODES.get(command, 32)
    if m < 8:
        raise CliInputError("--nodes must be at least 8")
    return m


def _curves(args, body, omegas, m):
    return section_curves(body, omegas, m, workers=min(args.workers, len(omegas)) if len(omegas) >= 64 else 1,
                          seed=args.seed)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- commands ----------------------------------------------------------------


def cmd_vsec(args, body, cfg):
    omegas, _ = _directions(args, body, "vsec")
    curves = _curves(args, body, omegas, _nodes(args, "vsec"))
    comments = [f"polyint {__version__}", f"config {cfg['digest']}", f"seed {args.seed}"]
    return write_curve_csv(curves, comments=comments), EXIT_OK


def cmd_fit(args, body, cfg):
    omegas, _ = _directions(args, body, "fit")
    curves = _curves(args, body, omegas, _nodes(args, "fit"))
    fits = fit_polynomials(curves, args.max_degree, args.tol)
    reports = [f.to_dict(c.omega) for c, f in zip(curves, fits)]
    return _json({"config": cfg, "fits": reports}), EXIT_OK


def cmd_exponent(args, body, cfg):
    omegas, _ = _directions(args, body, "exponent")
    curves = _curves(args, body, omegas, _nodes(args, "exponent"))
    rows = [{"omega": c.omega.tolist(), "plus": endpoint_exponent(c, "plus"),
             "minus": endpoint_exponent(c, "minus")} for c in curves]
    return _json({"config": cfg, "expected": 0.5 * (body.dim - 1), "exponents": rows}), EXIT_OK


def cmd_recover(args, body, cfg):
    if args.omega is not None:
        raise CliInputError("recover needs a direction grid (--grid), not a single --omega")
    omegas, _ = _directions(args, body, "recover")
    est = EllipsoidRecovery(tol=args.tol)
    try:
        curves = _curves(args, body, omegas, _nodes(args, "recover"))
        est.fit(curves)
    except RecoveryError as exc:
        return _json({"config": cfg, "rejected": True, "reason": str(exc), "residual": exc.residual}), EXIT_VERDICT
    return _json({"config": cfg, "rejected": False, **est.report()}), EXIT_OK


def cmd_phase(args, body, cfg):
    if args.omega is None:
        raise CliInputError("phase needs --omega")
    omegas, _ = _directions(args, body, "phase")
    w = omegas[0]
    r_values = _float_list(args.r, "--r") if args.r else [1.0, 10.0, 100.0]
    if any(r == 0 for r in r_values):
        raise CliInputError("--r values must be non-zero")
    curve = _curves(args, body, omegas, _nodes(args, "phase"))[0]
    fit = fit_polynomials([curve], args.max_degree, args.tol)[0]
    if fit.verdict != POLYNOMIAL:
        positive = sorted(abs(r) for r in r_values)
        if positive[-1] / positive[0] < 100:
            positive = [1.0, 10.0, 100.0]
        rep = finiteness_check(body, w, positive)
        return _json({"config": cfg, "fit": fit.to_dict(w), "finiteness": rep.to_dict()}), EXIT_VERDICT
    e = phase_expansion(fit.coefficients, curve.h_minus, curve.h_plus)
    table = []
    for r in r_values:
        ev = eval_expansion(e, r)
        ref = fourier_chi(body, w, r)
        table.append({"r": r, "expansion": fourier_record(r, ev, "expansion"),
                      "slice": fourier_record(r, ref, "slice"), "abs_diff": abs(ev - ref)})
    return _json({"config": cfg, "fit": fit.to_dict(w), "expansion": e.to_dict(), "table": table}), EXIT_OK


def cmd_invert(args, body, cfg):
    if body.dim != 3:
        raise CliInputError("invert is implemented for n = 3")
    if args.omega is not None:
        raise CliInputError("invert needs a direction grid (--grid)")
    omegas, weights = _directions(args, body, "invert")
    curves = _curves(args, body, omegas, _nodes(args, "invert"))
    k = args.resolution
    if k < 2:
        raise CliInputError("--resolution must be at least 2")
    lo = np.array([support(body, e)[0] for e in np.eye(3)])
    hi = np.array([support(body, e)[1] for e in np.eye(3)])
    pad = 0.25 * (hi - lo)
    axes = [np.linspace(a, b, k) for a, b in zip(lo - pad, hi + pad)]
    out = io.StringIO()
    out.write(f"# polyint {__version__}\n# config {cfg['digest']}\n# seed {args.seed}\n")
    out.write("x,y,z,value,inside\n")
    pts = np.array([[x, y, z] for x in axes[0] for y in axes[1] for z in axes[2]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        values = back_project(curves, pts, weights)
    inside = contains(body, pts)
    for p, v, flag in zip(pts, values, inside):
        out.write(f"{float(p[0])!r},{float(p[1])!r},{float(p[2])!r},{float(v)!r},{int(bool(flag))}\n")
    return out.getvalue(), EXIT_OK


def cmd_axial(args, body, cfg):
    if body.kind != "revolution":
        raise CliInputError("axial needs a body of kind 'revolution'")
    lo, hi, k = _alpha_range(args.alpha) if args.alpha else (1.0, 1e3, 32)
    if hi / lo < 1e3:
        raise CliInputError("--alpha range must span at least three decades")
    rep = axial_verdict(body, (lo, hi), k, tol=args.tol)
    code = EXIT_OK if rep["verdict"] == CONSISTENT else EXIT_VERDICT
    return _json({"config": cfg, **rep}), code


def cmd_checks(args, body, cfg):
    if args.omega is not None:
        raise CliInputError("checks needs a direction grid (--grid)")
    omegas, weights = _directions(args, body, "checks")
    m = _nodes(args, "checks")
    curves = _curves(args, body, omegas, m)
    n = body.dim
    results = {}

    # V(-omega, -t) = V(omega, t): mirrored Lobatto nodes carry reversed values
    idx = antipode_index(omegas)
    scale = max(float(np.max(c.values)) for c in curves)
    dev = max(float(np.max(np.abs(curves[j].values[::-1] - c.values))) for c, j in zip(curves, idx))
    results["curve_parity"] = {"max_deviation": dev, "tol": 1e-9 * scale, "passed": dev <= 1e-9 * scale}

    vol = body.volume()
    m0 = np.array([c.integrate(0) for c in curves])
    spread = float(np.max(np.abs(m0 - vol)) / vol)
    results["cavalieri"] = {"volume": vol, "max_relative_deviation": spread, "tol": 1e-6, "passed": spread <= 1e-6}

    fits = fit_polynomials(curves, args.max_degree, args.tol)
    if all(f.verdict == POLYNOMIAL for f in fits):
        top = max(f.degree for f in fits)
        parity = []
        for k in range(top + 1):
            rep = parity_check(field_from_fits(k, omegas, fits, weights), 1e-8 * scale)
            parity.append({"k": k, "max_deviation": rep.max_deviation, "passed": rep.passed})
        results["coefficient_parity"] = {"rows": parity, "passed": all(r["passed"] for r in parity)}
        rows = []
        for k in range(n, top + n):
            field = field_from_fits(k, omegas, fits, weights)
            for deg in range(0, min(k - n + 1, 2) + 1):
                for j in range(n if deg else 1):
                    p = (lambda om, j=j, deg=deg: om[:, j] ** deg)
                    val = moment_orthogonality(field, p, deg)
                    rows.append({"k": k, "p": f"omega_{j + 1}^{deg}" if deg else "1", "value": val,
                                 "passed": abs(val) <= 1e-6 * scale})
        results["moment_orthogonality"] = {"rows": rows, "passed": all(r["passed"] for r in rows)}
    else:
        verdicts = sorted({f.verdict for f in fits})
        results["moment_orthogonality"] = {"skipped": f"fits are not all polynomial ({', '.join(verdicts)})"}
    passed = all(v.get("passed", True) for v in results.values())
    code = EXIT_OK if passed else EXIT_VERDICT
    return _json({"config": cfg, "passed": passed, "checks": results}), code


COMMANDS = {"vsec": cmd_vsec, "fit": cmd_fit, "exponent": cmd_exponent, "recover": cmd_recover,
            "phase": cmd_phase, "invert": cmd_invert, "axial": cmd_axial, "checks": cmd_checks}


def _configure_logging():
    level = os.environ.get("POLYINT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        for name in ("tol",):
            if not getattr(args, name) > 0:
                raise CliInputError(f"--{name} must be positive")
        if args.max_degree is not None and args.max_degree < 1:
            raise CliInputError("--max-degree must be at least 1")
        if args.workers < 1:
            raise CliInputError("--workers must be at least 1")
        body = load_body(args.body)
        cfg = _config(args, body)
        log.info("running %s (config %s)", args.command, cfg["digest"])
        text, code = COMMANDS[args.command](args, body, cfg)
    except CliInputError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return EXIT_INPUT
    except PolyIntError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "file": None, "line": None, "column": None}) + "\n")
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
