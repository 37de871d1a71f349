"""Command-line front end.

Every subcommand writes records with the fixed columns
``N,k,S,Sbar,value,method,imag_residue,est_error`` as CSV or as a JSON array
of flat objects. Exit status: 0 success, 1 domain or numerical error,
2 validation failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, TextIO

from .correlations import CorrelationResult, cross_validate, diag_corr, nextdiag_corr
from .errors import IsingCorrError
from .weight import make_params_sk, moment_a, moment_a_quadrature

COLUMNS = ("N", "k", "S", "Sbar", "value", "method", "imag_residue", "est_error")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_USAGE = 64


class UsageError(Exception):
    def __init__(self, message: str, usage: str = ""):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}", self.format_usage())


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    k: Optional[float]
    S: Optional[float]
    N: Optional[int]
    N_max: Optional[int]
    method: str
    tol: float
    nodes_cap: int
    format: str
    output: Optional[str]
    ks: tuple[float, ...] = ()
    perturb: float = 0.0


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "null"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, int):
        return str(v)
    return json.dumps(v)


class RecordWriter:
    """Streams records as CSV rows or JSON array elements."""

    def __init__(self, stream: TextIO, fmt: str):
        self.stream = stream
        self.fmt = fmt
        self.count = 0

    def __enter__(self):
        if self.fmt == "csv":
            self.stream.write(",".join(COLUMNS) + "\n")
        else:
            self.stream.write("[")
        return self

    def write(self, rec: dict) -> None:
        if self.fmt == "csv":
            self.stream.write(",".join(_fmt(rec.get(c)) for c in COLUMNS) + "\n")
        else:
            body = ", ".join(f"{json.dumps(c)}: {_json_value(rec.get(c))}" for c in COLUMNS)
            self.stream.write(("\n  " if self.count == 0 else ",\n  ") + "{" + body + "}")
        self.count += 1
        self.stream.flush()

    def __exit__(self, *exc):
        if self.fmt == "json":
            self.stream.write("\n]\n" if self.count else "]\n")
        return False


def record(res: CorrelationResult, S: Optional[float] = None, Sbar: Optional[float] = None,
           method: Optional[str] = None, est_error: Optional[float] = None) -> dict:
    p = res.params
    return {
        "N": res.N,
        "k": float(res.k),
        "S": p.S if p is not None else S,
        "Sbar": p.Sbar if p is not None else Sbar,
        "value": float(res.value),
        "method": method or res.method,
        "imag_residue": float(res.diagnostics.imag_residue),
        "est_error": float(res.diagnostics.est_error if est_error is None else est_error),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isingcorr", description="Ising diagonal and next-to-diagonal correlations.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, need_S=False, n_kind="N"):
        sp.add_argument("--k", type=float, help="deformation variable k = S*Sbar (> 0)")
        sp.add_argument("--critical", action="store_true", help="use k = 1")
        sp.add_argument("--S", type=float, required=need_S, help="S = sinh 2K; Sbar = k/S")
        if n_kind == "N":
            sp.add_argument("--N", type=int, required=True, help="largest order (records for 1..N)")
        else:
            sp.add_argument("--N-max", dest="N_max", type=int, required=True)
        sp.add_argument("--tol", type=float, default=1e-8, help="agreement tolerance (default 1e-8)")
        sp.add_argument("--nodes-cap", dest="nodes_cap", type=int, default=65536)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", help="output file (default: standard output)")

    d = sub.add_parser("diag", help="diagonal correlations <s00 sNN>")
    common(d)
    d.add_argument("--method", default="recurrence",
                   choices=("recurrence", "determinant", "critical-closed-form", "both"))
    n = sub.add_parser("nextdiag", help="next-to-diagonal correlations <s00 sN,N-1>")
    common(n, need_S=True)
    n.add_argument("--method", default="epsilon-recurrence",
                   choices=("epsilon-recurrence", "determinant", "elliptic", "critical-closed-form", "both"))
    m = sub.add_parser("moments", help="Fourier moments a_n for |n| <= N-max")
    common(m, n_kind="N_max")
    m.add_argument("--method", default="closed-form", choices=("closed-form", "quadrature"))
    s = sub.add_parser("sweep", help="stream a grid over several k values")
    s.add_argument("--k", type=float, nargs="+", help="k values")
    s.add_argument("--critical", action="store_true")
    s.add_argument("--S", type=float, help="with S: next-to-diagonal sweep at Sbar = k/S")
    s.add_argument("--N-max", dest="N_max", type=int, required=True)
    s.add_argument("--method", default=None)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--nodes-cap", dest="nodes_cap", type=int, default=65536)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output")
    v = sub.add_parser("validate", help="cross-validate every method; exit 2 on disagreement")
    common(v, need_S=True, n_kind="N_max")
    v.add_argument("--method", default="all", choices=("all",))
    v.add_argument("--perturb-moment", dest="perturb", type=float, default=0.0,
                   help="test mode: scale a_0 by (1 + value) inside the determinant methods")
    return parser


def parse_config(argv: Optional[list[str]]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.subcommand == "sweep":
        ks = (1.0,) if ns.critical else tuple(ns.k or ())
        if not ks:
            raise UsageError("isingcorr sweep: error: --k is required unless --critical is given")
        k = None
    else:
        if ns.critical:
            k = 1.0
        elif ns.k is None:
            raise UsageError(f"isingcorr {ns.subcommand}: error: --k is required unless --critical is given")
        else:
            k = ns.k
        ks = (k,)
    return RunConfig(
        subcommand=ns.subcommand,
        k=k,
        S=getattr(ns, "S", None),
        N=getattr(ns, "N", None),
        N_max=getattr(ns, "N_max", None),
        method=ns.method or "",
        tol=ns.tol,
        nodes_cap=ns.nodes_cap,
        format=ns.format,
        output=ns.output,
        ks=ks,
        perturb=getattr(ns, "perturb", 0.0),
    )


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class _Disagreement(Exception):
    pass


def _diag_records(cfg: RunConfig, k: float, N_max: int, method: str) -> Iterator[dict]:
    for N in range(1, N_max + 1):
        if method == "both":
            r1 = diag_corr(N, k, "recurrence")
            r2 = diag_corr(N, k, "determinant")
            dev = _rel(r1.value, r2.value)
            yield record(r1, method="recurrence+determinant", est_error=dev)
            if dev > cfg.tol:
                raise _Disagreement(f"N={N}: recurrence and determinant differ by {dev:.3g}")
        else:
            yield record(diag_corr(N, k, method))


def _nextdiag_records(cfg: RunConfig, k: float, N_max: int, method: str) -> Iterator[dict]:
    p = make_params_sk(cfg.S, k / cfg.S)
    kw = dict(tol=1e-14, nodes_cap=cfg.nodes_cap)
    for N in range(1, N_max + 1):
        if method == "both":
            r1 = nextdiag_corr(N, p, "epsilon-recurrence")
            r2 = nextdiag_corr(N, p, "determinant", **kw)
            dev = _rel(r1.value, r2.value)
            yield record(r1, method="epsilon-recurrence+determinant", est_error=max(dev, r2.diagnostics.est_error))
            if dev > cfg.tol:
                raise _Disagreement(f"N={N}: epsilon-recurrence and determinant differ by {dev:.3g}")
        elif method == "determinant":
            yield record(nextdiag_corr(N, p, method, **kw))
        else:
            yield record(nextdiag_corr(N, p, method))


def _moment_records(cfg: RunConfig) -> Iterator[dict]:
    k = cfg.k
    n = cfg.N_max
    for idx in range(-n, n + 1):
        if cfg.method == "quadrature":
            q = moment_a_quadrature(idx, k)
            yield {"N": idx, "k": k, "value": q.real, "method": "quadrature", "imag_residue": abs(q.imag),
                   "est_error": float("nan")}
        else:
            yield {"N": idx, "k": k, "value": moment_a(idx, k), "method": "closed-form", "imag_residue": 0.0,
                   "est_error": 0.0}


def _validate_records(cfg: RunConfig, out: list) -> Iterator[dict]:
    p = make_params_sk(cfg.S, cfg.k / cfg.S)
    rep = cross_validate(cfg.N_max, p, tol=cfg.tol, perturb=cfg.perturb)
    for row in rep.rows:
        for key, res in sorted(row["results"].items()):
            yield record(res, method=key)
    out.append(rep)


def _records(cfg: RunConfig, sink: list) -> Iterable[dict]:
    sc = cfg.subcommand
    if sc == "diag":
        return _diag_records(cfg, cfg.k, cfg.N, cfg.method)
    if sc == "nextdiag":
        return _nextdiag_records(cfg, cfg.k, cfg.N, cfg.method)
    if sc == "moments":
        return _moment_records(cfg)
    if sc == "validate":
        return _validate_records(cfg, sink)
    if sc == "sweep":
        def gen():
            for k in cfg.ks:
                if cfg.S is None:
                    yield from _diag_records(cfg, k, cfg.N_max, cfg.method or "recurrence")
                else:
                    yield from _nextdiag_records(cfg, k, cfg.N_max, cfg.method or "epsilon-recurrence")
        return gen()
    raise UsageError(f"unknown subcommand {sc!r}")


def run(argv: Optional[list[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Execute the CLI and return its exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        stderr.write(f"{exc.usage}{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if cfg.subcommand in ("diag", "nextdiag") and cfg.N < 1:
        stderr.write("isingcorr: error: --N must be >= 1\n")
        return EXIT_USAGE
    bad = [f"k must be positive, got {k}" for k in cfg.ks if not (k > 0 and math.isfinite(k))]
    if cfg.S is not None and not (cfg.S > 0 and math.isfinite(cfg.S)):
        bad.append(f"S must be positive, got {cfg.S}")
    if bad:
        stderr.write(f"isingcorr: error: {bad[0]}\n")
        return EXIT_ERROR
    stream = open(cfg.output, "w", encoding="utf-8") if cfg.output else stdout
    sink: list = []
    status = EXIT_OK
    try:
        with RecordWriter(stream, cfg.format) as writer:
            try:
                for rec in _records(cfg, sink):
                    writer.write(rec)
            except _Disagreement as exc:
                stderr.write(f"isingcorr: validation failed: {exc}\n")
                status = EXIT_VALIDATION
            except (IsingCorrError, ValueError, ZeroDivisionError) as exc:
                stderr.write(f"isingcorr: error: {exc}\n")
                status = EXIT_ERROR
    finally:
        if cfg.output:
            stream.close()
    for rep in sink:
        if rep.passed:
            stderr.write(f"validation passed: N <= {rep.N_max}, max deviation "
                         f"{max(rep.deviations.values(), default=0.0):.3g}\n")
        else:
            stderr.write("validation failed:\n" + "".join(f"  {f}\n" for f in rep.failures))
            status = EXIT_VALIDATION
    return status


def main() -> None:
    sys.exit(run())
