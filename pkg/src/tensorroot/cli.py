"""Command-line interface: ``tensorroot <command> ...``.

Exit codes: 0 success, 1 input or contract error, 2 numeric target missed
(non-convergence, failed reproduction check).  Every command writes one
JSON run manifest.  ``TSQRT_THREADS`` caps BLAS/LAPACK threads (0 = auto).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .exceptions import TensorRootError
from .io import RunManifest, atomic_write_text, read_tensor, write_json, write_tensor

log = logging.getLogger("tensorroot")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2


class CliError(Exception):
    """Input problem detected by the CLI itself (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _with_suffix(path, suffix):
    path = Path(path)
    return path.with_name(path.name + suffix)


def _manifest(args, command, inputs, params, outputs, default_base):
    target = args.manifest or _with_suffix(Path(default_base).with_suffix(""), ".manifest.json")
    RunManifest(
        command=command,
        inputs=[str(p) for p in inputs],
        parameters=params,
        outputs=[str(p) for p in outputs],
        versions=f"tensorroot {__version__}",
    ).write(target)
    return target


def _cfg(args):
    from .solvers import IterationConfig

    return IterationConfig(max_iterations=args.max_iter, tolerance=args.tol, early_stop=not args.no_early_stop)


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_sqrt(args):
    from .solvers import tsqrt

    a = read_tensor(args.input)
    sol = tsqrt(a, method=args.method, cfg=_cfg(args))
    out = Path(args.out or _with_suffix(Path(args.input).with_suffix(""), ".sqrt.json"))
    outputs = [out]
    write_tensor(out, sol.sqrt)
    if sol.inv_sqrt is not None:
        inv_out = Path(args.inv_out or _with_suffix(out.with_suffix(""), ".inv.json"))
        write_tensor(inv_out, sol.inv_sqrt)
        outputs.append(inv_out)
    trace_out = Path(args.trace_out or _with_suffix(out.with_suffix(""), ".trace.csv"))
    atomic_write_text(trace_out, sol.trace.to_csv())
    outputs.append(trace_out)
    params = {
        "method": args.method,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "early_stop": not args.no_early_stop,
    }
    _manifest(args, "sqrt", [args.input], params, outputs, out)
    tr = sol.trace
    status = "converged" if tr.converged else "did not converge"
    print(f"{args.method}: {status} after {tr.iterations_run} iterations; residual {tr.residuals[-1]:.6e}")
    return EXIT_OK if tr.converged else EXIT_NUMERIC


def cmd_tbw(args):
    from .solvers import IterationConfig
    from .tbw import tbw_report

    a = read_tensor(args.a)
    b = read_tensor(args.b)
    rep = tbw_report(a, b, strategy=args.method, cfg=IterationConfig(tolerance=args.tol, max_iterations=args.max_iter))
    outputs = []
    if args.report_out:
        atomic_write_text(args.report_out, rep.to_csv())
        outputs.append(args.report_out)
    _manifest(args, "tbw", [args.a, args.b], {"method": args.method, "tol": args.tol}, outputs,
              args.report_out or "tbw")
    print(f"{rep.total:.10g}")
    return EXIT_OK


def _load_rgb(path):
    from .imaging.io import load_image

    return load_image(path)


def _gray_all_methods(img, mode, solver):
    from .imaging.grayscale import luminance_grayscale, pca_grayscale, tdg_grayscale

    out = {}
    if img.shape[2] == 3:
        out["luminance"] = luminance_grayscale(img)
    try:
        out["pca"] = pca_grayscale(img).display
    except TensorRootError as exc:
        log.info("pca grayscale unavailable: %s", exc)
    try:
        out["tdg"] = tdg_grayscale(img, mode=mode, method=solver).display
    except TensorRootError as exc:
        log.info("tdg grayscale unavailable: %s", exc)
    return out


def cmd_grayscale(args):
    from .imaging.grayscale import luminance_grayscale, pca_grayscale, tdg_grayscale
    from .imaging.io import save_image
    from .imaging.metrics import decorrelation_index, eme, pearson_channel_correlations, ssim

    img = _load_rgb(args.image)
    if args.method == "luminance":
        gray = luminance_grayscale(img)
    elif args.method == "pca":
        gray = pca_grayscale(img).display
    else:
        gray = tdg_grayscale(img, mode=args.mode, method=args.solver).display
    out = Path(args.out)
    save_image(out, gray)
    outputs = [out]
    if args.metrics_out:
        ref = luminance_grayscale(img) if img.shape[2] == 3 else None
        metrics = {
            "method": args.method,
            "ssim": None if ref is None else ssim(gray, ref),
            "eme": eme(gray),
            "di": decorrelation_index(img),
            "correlations": pearson_channel_correlations(img) if img.shape[2] > 1 else None,
            "comparison": {},
        }
        for name, g in _gray_all_methods(img, args.mode, args.solver).items():
            metrics["comparison"][name] = {"ssim": None if ref is None else ssim(g, ref), "eme": eme(g)}
        write_json(args.metrics_out, metrics)
        outputs.append(args.metrics_out)
    params = {"method": args.method, "mode": args.mode, "solver": args.solver}
    _manifest(args, "grayscale", [args.image], params, outputs, out)
    return EXIT_OK


def cmd_whiten(args):
    from .imaging.io import save_image
    from .imaging.metrics import decorrelation_index, pearson_channel_correlations
    from .imaging.whitening import channelwise_pca_whiten, matrix_whiten, whiten_image, whitened_for_display

    img = _load_rgb(args.image)
    if args.method == "t":
        white = whiten_image(img, mode=args.mode, method=args.solver)
    elif args.method == "matrix":
        white = matrix_whiten(img)
    else:
        white = channelwise_pca_whiten(img)
    out = Path(args.out)
    save_image(out, whitened_for_display(white, img))
    outputs = [out]
    if args.metrics_out:
        metrics = {
            "method": args.method,
            "ssim": None,
            "eme": None,
            "di": decorrelation_index(white),
            "correlations": pearson_channel_correlations(white),
            "di_input": decorrelation_index(img),
            "correlations_input": pearson_channel_correlations(img),
        }
        write_json(args.metrics_out, metrics)
        outputs.append(args.metrics_out)
    params = {"method": args.method, "mode": args.mode, "solver": args.solver}
    _manifest(args, "whiten", [args.image], params, outputs, out)
    return EXIT_OK


def cmd_transfer(args):
    from .imaging.covariance import channel_covariance
    from .imaging.io import save_image
    from .imaging.transfer import color_transfer, reinhard_channelwise_transfer

    src = _load_rgb(args.source)
    tgt = _load_rgb(args.target)
    if args.method == "tensor":
        res = color_transfer(src, tgt, mode=args.mode, method=args.solver)
    else:
        res = reinhard_channelwise_transfer(src, tgt)
    out = Path(args.out)
    save_image(out, res.display)
    outputs = [out]
    if args.metrics_out:
        c_out = channel_covariance(res.raw)
        c_tgt = channel_covariance(tgt)
        metrics = {
            "method": args.method,
            "covariance_relative_error": float(np.linalg.norm(c_out - c_tgt) / np.linalg.norm(c_tgt)),
            "mean_abs_error": float(np.max(np.abs(res.raw.mean(axis=(0, 1)) - tgt.mean(axis=(0, 1))))),
            "clipped_fraction": float(np.mean((res.raw < 0) | (res.raw > 1))),
        }
        write_json(args.metrics_out, metrics)
        outputs.append(args.metrics_out)
    params = {"method": args.method, "mode": args.mode, "solver": args.solver}
    _manifest(args, "transfer", [args.source, args.target], params, outputs, out)
    return EXIT_OK


def _parse_kappas(values):
    kappas = []
    for v in values:
        for part in str(v).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                k = float(part)
            except ValueError:
                raise CliError(f"invalid kappa {part!r}") from None
            if not k >= 1:
                raise CliError(f"kappa must be >= 1; got {part}")
            kappas.append(k)
    if not kappas:
        raise CliError("no kappa values given")
    return kappas


def cmd_bench_stability(args):
    from .solvers import stability_sweep, sweep_csv

    kappas = _parse_kappas(args.kappa)
    if args.n < 2 or args.p < 1 or args.iterations < 1:
        raise CliError("need n >= 2, p >= 1, iterations >= 1")
    reports = stability_sweep(kappas, n=args.n, p=args.p, iterations=args.iterations, seed=args.seed)
    text = sweep_csv(kappas, reports)
    out = Path(args.out)
    atomic_write_text(out, text)
    params = {"n": args.n, "p": args.p, "kappa": kappas, "iterations": args.iterations, "seed": args.seed}
    _manifest(args, "bench-stability", [], params, [out], out)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_reproduce(args):
    from .reproduce import run

    report = run(args.which, args.out, timing=None if not args.no_timing else False)
    sys.stdout.write(report.text())
    out = Path(args.out)
    _manifest(args, "reproduce", [], {"which": args.which, "timing": not args.no_timing}, report.files,
              out / "reproduce")
    return EXIT_OK if report.ok else EXIT_NUMERIC


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def _solver_args(p, tol=1e-12, max_iter=50):
    p.add_argument("--tol", type=float, default=tol, help="residual tolerance (default %(default)g)")
    p.add_argument("--max-iter", type=int, default=max_iter, help="iteration cap (default %(default)d)")


def build_parser():
    from .reproduce import TARGETS

    parser = _Parser(prog="tensorroot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        p.add_argument("--manifest", help="run manifest path (default: next to the main output)")
        return p

    p = add("sqrt", cmd_sqrt, "principal T-square root of a tensor file")
    p.add_argument("input", help="tensor JSON file")
    p.add_argument("--method", choices=("newton", "db", "direct"), default="db")
    _solver_args(p)
    p.add_argument("--no-early-stop", action="store_true", help="run all --max-iter iterations")
    p.add_argument("--out", help="square root output (default <input>.sqrt.json)")
    p.add_argument("--inv-out", help="inverse square root output for db/direct")
    p.add_argument("--trace-out", help="convergence trace CSV")

    p = add("tbw", cmd_tbw, "Tensor Bures-Wasserstein distance of two tensor files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--method", choices=("direct", "newton", "db"), default="direct",
                   help="inner matrix square root strategy")
    _solver_args(p, tol=1e-13)
    p.add_argument("--report-out", help="per-slice CSV report")

    p = add("grayscale", cmd_grayscale, "grayscale conversion of an RGB image")
    p.add_argument("image")
    p.add_argument("--method", choices=("tdg", "luminance", "pca"), default="tdg")
    p.add_argument("--mode", choices=("matrix", "tensor"), default="matrix", help="covariance operand for tdg")
    p.add_argument("--solver", choices=("db", "newton", "direct"), default="db")
    p.add_argument("--out", required=True)
    p.add_argument("--metrics-out")

    p = add("whiten", cmd_whiten, "whiten the channels of an RGB image")
    p.add_argument("image")
    p.add_argument("--method", choices=("t", "matrix", "channelwise"), default="t")
    p.add_argument("--mode", choices=("matrix", "tensor"), default="matrix", help="covariance operand for t")
    p.add_argument("--solver", choices=("db", "newton", "direct"), default="db")
    p.add_argument("--out", required=True)
    p.add_argument("--metrics-out")

    p = add("transfer", cmd_transfer, "transfer the color statistics of TARGET onto SOURCE")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--method", choices=("tensor", "channelwise"), default="tensor")
    p.add_argument("--mode", choices=("matrix", "tensor"), default="matrix", help="covariance operand for tensor")
    p.add_argument("--solver", choices=("db", "newton", "direct"), default="db")
    p.add_argument("--out", required=True)
    p.add_argument("--metrics-out")

    p = add("bench-stability", cmd_bench_stability, "Newton vs Denman-Beavers post-convergence stability sweep")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--kappa", action="append", default=None, help="condition numbers, comma separated or repeated")
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = add("reproduce", cmd_reproduce, "regenerate the published tables and compare")
    p.add_argument("which", choices=TARGETS + ("all",))
    p.add_argument("--out", default="reproduce_out", help="output directory")
    p.add_argument("--no-timing", action="store_true", help="skip the soft timing report")
    return parser


def _thread_limit():
    raw = os.environ.get("TSQRT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"TSQRT_THREADS must be an integer; got {raw!r}") from None
    if n < 0:
        raise CliError("TSQRT_THREADS must be >= 0")
    return n or None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "kappa", "unset") is None:
        args.kappa = ["4,50,1102"]
    try:
        limit = _thread_limit()
        with threadpool_limits(limits=limit):
            return args.func(args)
    except (TensorRootError, CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
