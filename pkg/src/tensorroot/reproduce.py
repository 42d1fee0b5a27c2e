"""Regenerate the published tables from the embedded reference data.

Each target writes CSV/JSON files and appends named checks (cells) with
their tolerance to a :class:`Report`.  Tolerances follow the build's exit
criteria; a failed cell is reported by name, never hidden.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import reference_data as rd
from .exceptions import SingularCovarianceError
from .io import atomic_write_text
from .solvers import (
    IterationConfig,
    db_spectral,
    db_tsqrt,
    newton_tsqrt,
    prefloor_q,
    random_tpd_tensor,
    residual_floor,
    stability_experiment,
    stability_sweep,
    sweep_csv,
    tsqrt,
)
from .fourier import dft_mode3
from .tbw import tbw_report

TARGETS = (
    "newton-table",
    "db-table",
    "stability-table",
    "kappa-sweep",
    "tbw-example",
    "grayscale-example",
    "image-cov-table",
)
SWEEP_KAPPAS = (4, 10, 50, 100, 500, 1102)
SQRT3 = math.sqrt(3.0)


@dataclass
class Check:
    target: str
    cell: str
    passed: bool
    computed: object
    expected: object
    tolerance: str
    note: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        msg = f"{status} {self.target} {self.cell}: computed={_short(self.computed)} expected={_short(self.expected)} ({self.tolerance})"
        if self.note:
            msg += f" -- {self.note}"
        return msg


@dataclass
class Report:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    files: list = field(default_factory=list)

    def add(self, target, cell, passed, computed, expected, tolerance, note=""):
        self.checks.append(Check(target, cell, bool(passed), computed, expected, tolerance, note))

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def text(self):
        lines = [c.line() for c in self.checks]
        lines += [f"NOTE {n}" for n in self.notes]
        n_fail = sum(not c.passed for c in self.checks)
        lines.append(f"SUMMARY {len(self.checks) - n_fail}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"

    def to_json(self):
        return json.dumps(
            {"ok": self.ok, "checks": [_jsonable(asdict(c)) for c in self.checks], "notes": self.notes},
            indent=2,
        )


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def round_sig(x, figs=2):
    """``x`` rounded to ``figs`` significant figures."""
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.{figs - 1}e}")


def sig_figs_agree(computed, expected, figs=2):
    return round_sig(computed, figs) == round_sig(expected, figs)


def _write(report, out_dir, name, text):
    path = Path(out_dir) / name
    atomic_write_text(path, text)
    report.files.append(str(path))


def _rows_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


# ----------------------------------------------------------------------------
# targets
# ----------------------------------------------------------------------------

def newton_table(report, out_dir):
    ref = rd.load("newton_example")
    table = ref["newton_table"]
    a = rd.newton_example_tensor()
    t0 = time.perf_counter()
    sol = newton_tsqrt(a, IterationConfig(max_iterations=10, tolerance=table["tolerance"]))
    elapsed = time.perf_counter() - t0
    trace = sol.trace
    _write(report, out_dir, "newton_table.csv", trace.to_csv())
    tgt = "newton-table"
    report.add(tgt, "iterations", trace.converged and trace.iterations_run == table["iterations"],
               trace.iterations_run, table["iterations"], "exact")
    printed = table["residuals"]
    computed = trace.residuals
    ratios = [c / p for c, p in zip(computed[1:6], printed[1:6])]
    convention = None
    for factor, label in ((SQRT3, "sqrt(3)"), (1 / SQRT3, "1/sqrt(3)")):
        if all(abs(r / factor - 1) <= 0.05 for r in ratios):
            convention = (factor, label)
    if convention is None:
        report.notes.append(
            "newton-table: no uniform sqrt(3) factor between computed and printed residuals "
            f"(ratios computed/printed for k=1..5: {', '.join(f'{r:.3g}' for r in ratios)}); no convention switch applied"
        )
        scale = 1.0
    else:
        scale = 1.0 / convention[0]
        report.notes.append(f"newton-table: applied the {convention[1]} residual convention switch")
    for k in range(1, 6):
        c = computed[k] * scale if k < len(computed) else math.nan
        if k == 5:
            ok = c <= 1e-13
            report.add(tgt, f"r_{k}", ok, c, printed[k], "floor-level value: <= 1e-13")
        else:
            report.add(tgt, f"r_{k}", sig_figs_agree(c, printed[k]), c, printed[k], "2 significant figures")
    report.add(tgt, "final_residual", computed[-1] <= 1e-13, computed[-1], 1e-13, "<= 1e-13")
    report.add(tgt, "runtime_s", elapsed < 1.0, elapsed, 1.0, "< 1 s")


def db_table(report, out_dir):
    ref = rd.load("newton_example")
    table = ref["db_table"]
    a = rd.newton_example_tensor()
    cfg = IterationConfig(max_iterations=10, tolerance=table["tolerance"])
    sol = db_tsqrt(a, cfg)
    trace = sol.trace
    _write(report, out_dir, "db_table.csv", trace.to_csv())
    newton = newton_tsqrt(a, cfg).trace
    rows = []
    for k in range(len(trace.residuals)):
        nr = newton.residuals[k] if k < len(newton.residuals) else None
        rows.append([k, nr, trace.residuals[k], trace.inverse_residuals[k]])
    _write(report, out_dir, "newton_vs_db.csv",
           _rows_csv(["k", "newton_residual", "db_residual", "db_inverse_residual"], rows))
    tgt = "db-table"
    report.add(tgt, "iterations", trace.converged and trace.iterations_run == table["iterations"],
               trace.iterations_run, table["iterations"], "exact")
    for k in (2, 4):
        report.add(tgt, f"r_{k}", sig_figs_agree(trace.residuals[k], table["residuals"][k]),
                   trace.residuals[k], table["residuals"][k], "2 significant figures")
    report.add(tgt, "final_residual", trace.residuals[-1] <= 1e-13, trace.residuals[-1], 1e-13,
               "<= 1e-13 (order of magnitude)")


def stability_table(report, out_dir):
    ref = rd.load("stability_example")
    a = rd.stability_example_tensor()
    iters = ref["iterations"]
    rep = stability_experiment(a, iters)
    _write(report, out_dir, "stability_table.csv",
           _rows_csv(["k", "newton_residual", "db_residual"], [list(r) for r in rep.rows()]))
    tgt = "stability-table"
    nr, dr = rep.newton.residuals, rep.db.residuals
    k_last = iters - 1
    report.add(tgt, f"newton_r_{k_last}", nr[k_last] >= 1e6, float(nr[k_last]), 1e6, ">= 1e6")
    report.add(tgt, f"db_r_{k_last}", dr[k_last] <= 1e-12, float(dr[k_last]), 1e-12, "<= 1e-12")
    worst = max(abs(math.log10(nr[k] / dr[k])) for k in range(8))
    report.add(tgt, "agreement_k0_7", worst <= 1.0, worst, 1.0, "max |log10(newton/db)| through k=7 <= 1")
    report.add(tgt, "r_7", 1e-8 <= nr[7] <= 1e-6, float(nr[7]), [1e-8, 1e-6], "within [1e-8, 1e-6]")
    report.notes.append(f"stability-table: max Fourier-slice condition number {rep.kappa:.1f}")


def kappa_sweep(report, out_dir, seed=0, kappas=SWEEP_KAPPAS, iterations=20):
    reports = stability_sweep(kappas, n=3, p=3, iterations=iterations, seed=seed)
    _write(report, out_dir, "kappa_sweep.csv", sweep_csv(kappas, reports))
    tgt = "kappa-sweep"
    by_kappa = dict(zip(kappas, reports))
    for kappa in (4, 50, 1102):
        if kappa not in by_kappa:
            continue
        r = by_kappa[kappa]
        report.add(tgt, f"db_ratio@{kappa}", r.db.final_over_min <= 10, r.db.final_over_min, 10, "<= 10")
    for kappa, bound in ((50, 1e4), (1102, 1e12)):
        if kappa in by_kappa:
            r = by_kappa[kappa]
            report.add(tgt, f"newton_ratio@{kappa}", r.newton.final_over_min >= bound, r.newton.final_over_min,
                       bound, f">= {bound:g}")


def tbw_example(report, out_dir):
    ref = rd.load("tbw_example")
    a, b = rd.tbw_pair()
    rep = tbw_report(a, b)
    _write(report, out_dir, "tbw_report.csv", rep.to_csv())
    exp = ref["expected"]
    tgt = "tbw-example"
    report.add(tgt, "total", abs(rep.total - exp["total"]) <= 1e-3, rep.total, exp["total"], "+/- 1e-3")
    for i, row in enumerate(rep.per_slice):
        report.add(tgt, f"d_squared[{i + 1}]", abs(row.d_squared - exp["d_squared"][i]) <= 1e-3,
                   row.d_squared, exp["d_squared"][i], "+/- 1e-3")
        report.add(tgt, f"trace_cross_sqrt[{i + 1}]",
                   abs(row.trace_cross_sqrt - exp["trace_cross_sqrt"][i]) <= 1e-3,
                   row.trace_cross_sqrt, exp["trace_cross_sqrt"][i], "+/- 1e-3")


def grayscale_example(report, out_dir):
    """Matrix-mode decorrelated grayscale on the 2x2 example image."""
    from .imaging.covariance import center_channels, channel_covariance
    from .imaging.grayscale import tdg_grayscale

    ref = rd.load("grayscale_example")
    exp = ref["expected"]
    img = rd.grayscale_image()
    tgt = "grayscale-example"
    _, means = center_channels(img)
    report.add(tgt, "channel_means", np.allclose(means, exp["channel_means"], atol=1e-12, rtol=0),
               means.tolist(), exp["channel_means"], "1e-12")
    cov = channel_covariance(img)
    exp_cov = np.array(exp["covariance"])
    report.add(tgt, "covariance", np.allclose(cov, exp_cov, atol=1e-12, rtol=0), cov.round(12).tolist(),
               exp["covariance"], "exact (1e-12)")
    eig = np.sort(np.linalg.eigvalsh(cov))[::-1]
    report.add(tgt, "eigenvalues", np.allclose(eig, exp["eigenvalues"], atol=1e-10, rtol=0),
               eig.round(12).tolist(), exp["eigenvalues"], "1e-10")
    out = {"channel_means": means, "covariance": cov, "eigenvalues": eig}
    try:
        res = tdg_grayscale(img, mode="matrix", method="db")
    except SingularCovarianceError as exc:
        for cell, key in (("inv_sqrt", "inv_sqrt"), ("gray", "gray")):
            report.add(tgt, cell, False, "SingularCovarianceError", exp[key], "2e-2", note=str(exc))
        out["error"] = str(exc)
    else:
        from .imaging.grayscale import decorrelate_pixels

        _, _, inv_sqrt = decorrelate_pixels(img)
        report.add(tgt, "inv_sqrt", np.allclose(inv_sqrt, exp["inv_sqrt"], atol=2e-2, rtol=0),
                   inv_sqrt.round(4).tolist(), exp["inv_sqrt"], "2e-2")
        report.add(tgt, "gray", np.allclose(res.raw, exp["gray"], atol=2e-2, rtol=0),
                   res.raw.round(4).tolist(), exp["gray"], "2e-2")
        out["gray"] = res.raw
    # internal consistency of the printed intermediates themselves
    printed_g = np.array(exp["decorrelated"]).mean(axis=1).reshape(2, 2)
    report.notes.append(
        "grayscale-example: row means of the printed decorrelated matrix give "
        f"{np.round(printed_g, 3).tolist()} (printed G {exp['gray']}); printed covariance eigenvalues are "
        f"{np.round(np.linalg.eigvalsh(exp_cov)[::-1], 4).tolist()}"
    )
    _write(report, out_dir, "grayscale_example.json", json.dumps(_jsonable(out), indent=2) + "\n")


def image_cov_table(report, out_dir):
    ref = rd.load("image_covariance_table")
    c = rd.image_covariance()
    spectral = dft_mode3(c[:, :, np.newaxis])
    _, _, trace = db_spectral(spectral, IterationConfig(max_iterations=10, tolerance=1e-14))
    _write(report, out_dir, "image_cov_table.csv", trace.to_csv())
    tgt = "image-cov-table"
    r = trace.residuals
    for k in (1, 3):
        report.add(tgt, f"r_{k}", sig_figs_agree(r[k], ref["residuals"][k]), r[k], ref["residuals"][k],
                   "2 significant figures")
    r5 = r[5] if len(r) > 5 else min(r)
    report.add(tgt, "r_5", len(r) > 5 and min(r[:6]) <= 1e-14, r5, 1e-14, "<= 1e-14 by k = 5")
    q = prefloor_q(r, residual_floor(c[:, :, np.newaxis]))
    report.add(tgt, "q_prefloor_max", max(q) <= 1.0, max(q), 1.0, "pre-floor q_k <= 1")


def timing_report(report, out_dir, sizes=(32, 64), ps=(3, 6), seed=0):
    """Soft scaling report (never a check): wall time ratios for doubled n and p."""
    rows = []
    times = {}
    for n in sizes:
        for p in ps:
            a = random_tpd_tensor(n, p, seed)
            cfg = IterationConfig(tolerance=1e-12 * float(np.linalg.norm(a)))
            for method in ("newton", "db", "direct"):
                best = math.inf
                for _ in range(3):
                    t0 = time.perf_counter()
                    tsqrt(a, method, cfg)
                    best = min(best, time.perf_counter() - t0)
                times[(n, p, method)] = best
                rows.append([n, p, method, best])
    _write(report, out_dir, "timing.csv", _rows_csv(["n", "p", "method", "seconds"], rows))
    n0, n1 = sizes[0], sizes[-1]
    p0, p1 = ps[0], ps[-1]
    for method in ("newton", "db", "direct"):
        rn = times[(n1, p0, method)] / times[(n0, p0, method)]
        rp = times[(n0, p1, method)] / times[(n0, p0, method)]
        report.notes.append(
            f"timing (soft): {method} n {n0}->{n1} x{rn:.2f} (reference band [4, 16]); "
            f"p {p0}->{p1} x{rp:.2f} (reference band [1.5, 3])"
        )


RUNNERS = {
    "newton-table": newton_table,
    "db-table": db_table,
    "stability-table": stability_table,
    "kappa-sweep": kappa_sweep,
    "tbw-example": tbw_example,
    "grayscale-example": grayscale_example,
    "image-cov-table": image_cov_table,
}


def run(which, out_dir, timing=None):
    """Run one target (or ``"all"``) and write ``report.txt``/``report.json`` to ``out_dir``.

    ``timing`` defaults to ``which == "all"``.
    """
    if which != "all" and which not in RUNNERS:
        raise ValueError(f"unknown target {which!r}; expected one of {TARGETS + ('all',)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = Report()
    for name in TARGETS if which == "all" else (which,):
        RUNNERS[name](report, out_dir)
    if timing if timing is not None else which == "all":
        timing_report(report, out_dir)
    _write(report, out_dir, "report.txt", report.text())
    _write(report, out_dir, "report.json", report.to_json() + "\n")
    return report


__all__ = ["Check", "Report", "TARGETS", "run", "round_sig", "sig_figs_agree"]
