"""Command-line front end.

Subcommands
-----------
poly      evaluate a polynomial family (or check the Mehler identity)
unitary   Fock block of the Gaussian unitary
state     Fock block of the noisy Gaussian state
photons   photon-number distribution
verify    cross-check every closed form against its oracles

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import warnings

import numpy as np

from . import hlpoly, oracle, state, unitary
from ._validation import SeriesConvergenceWarning

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

CLIP = 1e-12

DEFAULT_TOLERANCES = {
    "factored_vs_series": 1e-8,
    "factored_vs_brute": 1e-8,
    "series_vs_brute": 1e-8,
    "unitary_vs_appendix_a": 1e-10,
    "unitary_vs_brute": 1e-9,
    "laguerre_vs_factored": 1e-10,
}

_FLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_FLOAT})?(?:(?P<im>[+-]?(?:{_FLOAT})?)i)?$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_FLOAT})?)i$")


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi``. Spaces are rejected.

    >>> parse_complex("1+0.3i")
    (1+0.3j)
    >>> parse_complex("-2i")
    -2j
    """
    # try the bare imaginary form first so "3i" is not read as 3 + 1i
    match = (_IMAG_RE.match(text) or _COMPLEX_RE.match(text)) if text else None
    if match is None or (match.groupdict().get("re") is None and match["im"] is None):
        raise argparse.ArgumentTypeError(f"not a complex literal of the form a+bi: {text!r}")
    real = float(match["re"]) if match.groupdict().get("re") else 0.0
    imag_text = match["im"]
    if imag_text is None:
        imag = 0.0
    elif imag_text in ("", "+"):
        imag = 1.0
    elif imag_text == "-":
        imag = -1.0
    else:
        imag = float(imag_text)
    return complex(real, imag)


def format_complex(value: complex) -> str:
    """Fifteen significant digits in the same ``a+bi`` form the parser accepts."""
    value = complex(value)
    if value.imag == 0:
        return f"{value.real:.15g}"
    if value.real == 0:
        return f"{value.imag:.15g}i"
    return f"{value.real:.15g}{value.imag:+.15g}i"


def _clip(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < CLIP else x


# ---------------------------------------------------------------------------
# parser


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output", default="-", help="file path, '-' for stdout")


def _add_state_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=parse_complex, default=0j, help="displacement, e.g. 1+0.3i")
    p.add_argument("--r", type=float, default=0.0, help="squeeze modulus")
    p.add_argument("--theta", type=float, default=0.0, help="squeeze phase")
    p.add_argument("--nbar", type=float, default=0.0, help="thermal mean photon number")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermfock", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="evaluate a polynomial family")
    p.add_argument(
        "--family",
        required=True,
        choices=("hkdf", "hkdf2", "incomplete", "laguerre", "genfunc", "mehler", "mixed"),
    )
    for flag in ("-m", "-n", "-k"):
        p.add_argument(flag, type=int, default=0)
    p.add_argument("-N", type=int, default=None, help="number of series terms")
    p.add_argument("--eps", type=int, choices=(0, 1), default=0)
    for flag in ("-x", "-y", "-z", "-u", "-v", "-t", "--tau", "-a", "-b", "-c"):
        p.add_argument(flag, type=parse_complex, default=0j)
    p.add_argument("--check", action="store_true", help="mehler: closed form vs series on a grid")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("unitary", help="Fock block of S(z) D(alpha) R(phi)")
    _add_state_params(p)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--dim", type=int, default=10)
    _add_output(p)

    p = sub.add_parser("state", help="Fock block of the noisy Gaussian state")
    _add_state_params(p)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--method", choices=("auto", "factored", "series"), default="auto")
    _add_output(p)

    p = sub.add_parser("photons", help="photon-number distribution")
    _add_state_params(p)
    p.add_argument("--m-max", type=int, default=50)
    p.add_argument("--method", choices=("auto", "factored", "series"), default="auto")
    _add_output(p)

    p = sub.add_parser("verify", help="cross-check closed forms against oracles")
    _add_state_params(p)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--dim", type=int, default=15, help="state block size")
    p.add_argument("--unitary-dim", type=int, default=20, help="unitary block size")
    p.add_argument("--tol", type=float, default=None, help="override every tolerance")
    p.add_argument(
        "--tol-pair",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override one tolerance, e.g. factored_vs_brute=1e-9",
    )
    p.add_argument("-o", "--output", default="-")
    return parser


# ---------------------------------------------------------------------------
# emitters


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def matrix_json(kind: str, params: dict, M: np.ndarray, **extra) -> str:
    doc = {
        "kind": kind,
        "params": params,
        "dim": int(M.shape[0]),
        "entries": [[[_clip(v.real), _clip(v.imag)] for v in row] for row in M],
    }
    doc.update(extra)
    return json.dumps(doc, indent=1) + "\n"


def matrix_csv(M: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["m"]
    for n in range(M.shape[1]):
        header += [f"re_{n}", f"im_{n}"]
    w.writerow(header)
    for m, row in enumerate(M):
        cells = [m]
        for v in row:
            cells += [repr(_clip(v.real)), repr(_clip(v.imag))]
        w.writerow(cells)
    return buf.getvalue()


def read_matrix_csv(text: str) -> np.ndarray:
    """Inverse of :func:`matrix_csv`."""
    rows = list(csv.reader(io.StringIO(text)))[1:]
    vals = np.array([[float(c) for c in row[1:]] for row in rows])
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def read_matrix_json(text: str) -> np.ndarray:
    e = np.array(json.loads(text)["entries"], dtype=float)
    return e[..., 0] + 1j * e[..., 1]


def _state_param_dict(args) -> dict:
    return {
        "alpha": [args.alpha.real, args.alpha.imag],
        "r": args.r,
        "theta": args.theta,
        "nbar": args.nbar,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_poly(args) -> int:
    fam = args.family
    if fam == "mehler" and args.check:
        report = mehler_check(args.points, args.seed, args.N or 80, args.tol)
        print(json.dumps(report, indent=1))
        return EXIT_OK if report["pass"] else EXIT_VERIFY
    if fam == "hkdf":
        value = hlpoly.hkdf(args.n, args.x, args.y)
    elif fam == "hkdf2":
        value = hlpoly.hkdf2(args.m, args.n, args.x, args.y, args.z, args.u, args.tau)
    elif fam == "incomplete":
        value = hlpoly.incomplete_hermite(args.eps, args.m, args.n, args.x, args.y, args.tau)
    elif fam == "laguerre":
        value = hlpoly.laguerre_generalized(args.n, args.k, args.x)
    elif fam == "genfunc":
        value = hlpoly.gen_func_truncated(args.x, args.y, args.t, args.N or 40)[0]
    elif fam == "mehler":
        if args.N is None:
            value = hlpoly.mehler_closed(args.x, args.y, args.z, args.v, args.t)
        else:
            value = hlpoly.mehler_series(args.x, args.y, args.z, args.v, args.t, args.N)
    else:
        value = hlpoly.mixed_deriv_quadexp(args.m, args.n, args.a, args.b, args.c, args.x, args.y)
    if args.format == "json":
        print(json.dumps({"family": fam, "value": [complex(value).real, complex(value).imag]}))
    else:
        print(format_complex(value))
    return EXIT_OK


def mehler_grid(points: int, seed: int, bound: float = 0.8):
    """Random ``(x, y, z, v, t)`` with ``|4 y t^2 v|`` spread uniformly over ``[0, bound]``."""
    rng = np.random.default_rng(seed)
    grid = []
    for _ in range(points):
        x, z = (complex(*rng.normal(scale=0.5, size=2)) for _ in range(2))
        w = rng.uniform(0, bound)
        # split |4 y t^2 v| = w into random magnitudes, phases uniform
        ly, lv = rng.uniform(-1, 1, size=2)
        lt = 0.5 * (math.log(w / 4) - ly - lv) if w > 0 else 0.0
        ph = rng.uniform(-math.pi, math.pi, size=3)
        y, v = math.exp(ly) * np.exp(1j * ph[0]), math.exp(lv) * np.exp(1j * ph[1])
        t = math.exp(lt) * np.exp(1j * ph[2]) if w > 0 else 0j
        grid.append(tuple(complex(c) for c in (x, y, z, v, t)))
    return grid


def mehler_check(points: int = 100, seed: int = 0, N: int = 80, tol: float = 1e-11) -> dict:
    worst, worst_w, failures = 0.0, 0.0, 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesConvergenceWarning)
        for x, y, z, v, t in mehler_grid(points, seed):
            closed = hlpoly.mehler_closed(x, y, z, v, t)
            series = hlpoly.mehler_series(x, y, z, v, t, N)
            err = abs(closed - series) / abs(closed)
            failures += err > tol
            if err > worst:
                worst, worst_w = err, abs(4 * y * t * t * v)
    return {
        "points": points,
        "terms": N,
        "max_rel_error": worst,
        "at_abs_4ytv2": worst_w,
        "failures": failures,
        "tol": tol,
        "pass": worst <= tol,
    }


def cmd_unitary(args) -> int:
    params = unitary.BosonicParams(args.alpha, args.phi, args.r, args.theta)
    M = unitary.unitary_matrix(params, args.dim)
    pdict = {"alpha": [args.alpha.real, args.alpha.imag], "phi": args.phi, "r": args.r, "theta": args.theta}
    text = matrix_json("unitary", pdict, M) if args.format == "json" else matrix_csv(M)
    _write(text, args.output)
    return EXIT_OK


def cmd_state(args) -> int:
    params = state.StateParams(args.alpha, args.r, args.theta, args.nbar)
    rho = state.rho_matrix(params, args.dim, method=args.method)
    if args.format == "json":
        text = matrix_json(
            "state",
            _state_param_dict(args),
            rho,
            trace=float(np.trace(rho).real),
            min_eigenvalue=float(np.linalg.eigvalsh(rho).min()),
        )
    else:
        text = matrix_csv(rho)
    _write(text, args.output)
    return EXIT_OK


def cmd_photons(args) -> int:
    params = state.StateParams(args.alpha, args.r, args.theta, args.nbar)
    dist = state.photon_distribution(params, args.m_max, method=args.method)
    probs = [_clip(p) for p in dist.probabilities]
    if args.format == "json":
        doc = {
            "kind": "photons",
            "params": _state_param_dict(args),
            "m_max": args.m_max,
            "probabilities": probs,
            "partial_trace": dist.partial_trace,
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "probability"])
        w.writerows([m, repr(p)] for m, p in enumerate(probs))
        text = buf.getvalue()
    _write(text, args.output)
    return EXIT_OK


def _tolerances(args) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    if args.tol is not None:
        tols = {k: args.tol for k in tols}
    for item in args.tol_pair:
        name, sep, value = item.partition("=")
        if not sep or name not in tols:
            raise UsageError(f"bad --tol-pair {item!r}; names: {', '.join(tols)}")
        try:
            tols[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"bad tolerance in {item!r}") from exc
    return tols


def verify_report(
    params: state.StateParams,
    phi: float = 0.0,
    dim: int = 15,
    unitary_dim: int = 20,
    tolerances: dict | None = None,
) -> dict:
    """Max entrywise deviation for every closed-form/oracle pair."""
    tols = dict(DEFAULT_TOLERANCES if tolerances is None else tolerances)
    dev: dict[str, float] = {}
    skipped: dict[str, str] = {}

    factored = state.rho_matrix(params, dim, method="factored")
    series = state.rho_series_matrix(params, dim)
    brute = oracle.rho_brute(params, dim)
    dev["factored_vs_series"] = float(np.abs(factored - series).max())
    dev["factored_vs_brute"] = float(np.abs(factored - brute).max())
    dev["series_vs_brute"] = float(np.abs(series - brute).max())

    bos = params.bosonic(phi)
    U1 = unitary.unitary_matrix(bos, unitary_dim)
    dev["unitary_vs_appendix_a"] = float(np.abs(U1 - unitary.appendix_a_matrix(bos, unitary_dim)).max())
    dev["unitary_vs_brute"] = float(np.abs(U1 - oracle.build_unitary(bos, unitary_dim)).max())

    if params.nbar > 0:
        # z = 0 slice: same displacement and noise, no squeezing
        slice_params = state.StateParams(params.alpha, 0.0, 0.0, params.nbar)
        general = state.rho_matrix(slice_params, dim, method="factored")
        hel = np.array(
            [
                [state.displaced_helstrom_coeff(m, n, params.alpha, params.nbar) for n in range(dim)]
                for m in range(dim)
            ]
        )
        dev["laguerre_vs_factored"] = float(np.abs(hel - general).max() / np.abs(general).max())
    else:
        skipped["laguerre_vs_factored"] = "nbar = 0 (Laguerre form needs nbar > 0)"

    pairs = {
        name: {"deviation": value, "tol": tols[name], "pass": bool(value <= tols[name])}
        for name, value in dev.items()
    }
    return {
        "params": {
            "alpha": [params.alpha.real, params.alpha.imag],
            "r": params.r,
            "theta": params.theta,
            "nbar": params.nbar,
            "phi": phi,
        },
        "dims": {"state": dim, "unitary": unitary_dim},
        "pairs": pairs,
        "skipped": skipped,
        "pass": all(p["pass"] for p in pairs.values()),
    }


def cmd_verify(args) -> int:
    params = state.StateParams(args.alpha, args.r, args.theta, args.nbar)
    report = verify_report(params, args.phi, args.dim, args.unitary_dim, _tolerances(args))
    _write(json.dumps(report, indent=1) + "\n", args.output)
    return EXIT_OK if report["pass"] else EXIT_VERIFY


COMMANDS = {
    "poly": cmd_poly,
    "unitary": cmd_unitary,
    "state": cmd_state,
    "photons": cmd_photons,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"hermfock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hermfock: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
