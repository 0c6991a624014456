"""Command-line front end.

    unitbundle verify [--only GROUP[,GROUP...]]
    unitbundle classify {dim2,dim3,const-curv,st4d} [--kappa K] [--n N] [--rho R] [--params P]
    unitbundle oracle --chart NAME:key=val,...

Exit status: 0 when every check passes, 1 when any check fails, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass, field

import numpy as np

from . import classify as cl
from .checks import SuiteContext, run_suite
from .oracle import t1m
from .oracle.charts import OracleDomainError, UnknownChartError, get_chart
from .oracle.fd import FDConfig
from .report import CheckRecord, Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    selector: str | None = None
    params: dict = field(default_factory=dict)
    tol: float | None = None
    fd: FDConfig = field(default_factory=FDConfig)
    samples: int = 10
    seed: int = 0
    fmt: str = "json"
    out: str | None = None
    only: list[str] | None = None
    deterministic: bool = False

    def echo(self) -> dict:
        """Config as reported (output destination and format excluded so reports diff cleanly)."""
        return {
            "command": self.command,
            "selector": self.selector,
            "params": self.params,
            "tol": self.tol,
            "fd": dataclasses.asdict(self.fd),
            "samples": self.samples,
            "seed": self.seed,
            "only": self.only,
        }


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError(f"--{name}: expected comma-separated numbers, got {text!r}") from exc


def parse_rho(text: str) -> np.ndarray:
    """Nine row-major entries, or six upper-triangle entries r11,r12,r13,r22,r23,r33."""
    vals = _floats(text, "rho")
    if len(vals) == 9:
        r = np.array(vals).reshape(3, 3)
        if np.max(np.abs(r - r.T)) > 1e-12 * max(1.0, np.max(np.abs(r))):
            raise ConfigError("--rho is not symmetric")
        return r
    if len(vals) == 6:
        r = np.zeros((3, 3))
        r[np.triu_indices(3)] = vals
        return r + np.triu(r, 1).T
    raise ConfigError(f"--rho needs 6 or 9 numbers, got {len(vals)}")


# -- commands -----------------------------------------------------------------------


def _classification_record(selector: str, c: cl.Classification, inputs: dict) -> CheckRecord:
    """A verdict is checked against its own certificate."""
    scale = max(1.0, abs(c.tau or 0.0)) ** 2
    first_eq, first_res = c.certificate[0]
    if c.verdict is cl.Verdict.ETA_EINSTEIN:
        res = max(abs(v) for k, v in c.certificate if not k.endswith("discriminant"))
        return CheckRecord(f"classify/{selector}/{first_eq}", first_eq, res, c.tol * scale,
                           inputs=inputs, values=c.to_dict())
    if c.verdict is cl.Verdict.CONTRADICTION:
        return CheckRecord(f"classify/{selector}/{first_eq}", first_eq, abs(first_res), 10 * c.tol, "ge",
                           inputs=inputs, values=c.to_dict(), overridable=False)
    return CheckRecord(f"classify/{selector}/{first_eq}", first_eq, abs(first_res), c.tol, "ge",
                       inputs=inputs, values=c.to_dict(), overridable=False)


def cmd_classify(cfg: RunConfig) -> list[CheckRecord]:
    sel, p = cfg.selector, cfg.params
    tol = cfg.tol if cfg.tol is not None else cl.DEFAULT_TOL

    def need(*keys):
        missing = [k for k in keys if p.get(k) is None]
        if missing:
            raise ConfigError(f"classify {sel} needs " + ", ".join(f"--{k}" for k in missing))

    if sel == "dim2":
        need("kappa")
        c = cl.classify_dim2(p["kappa"], tol)
        inputs = {"kappa": p["kappa"]}
    elif sel == "dim3":
        need("rho")
        rho = parse_rho(p["rho"])
        c = cl.classify_dim3(rho, tol)
        inputs = {"rho": rho}
    elif sel == "const-curv":
        need("n", "kappa")
        if p["n"] < 2:
            raise ConfigError("--n must be at least 2")
        c = cl.classify_const_curv(p["n"], p["kappa"], tol)
        inputs = {"n": p["n"], "kappa": p["kappa"]}
    elif sel == "st4d":
        need("params")
        vals = _floats(p["params"], "params")
        try:
            c = cl.classify_4d_einstein(vals, tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        inputs = {"params": vals}
    else:
        raise ConfigError(f"unknown classifier {sel!r}")
    return [_classification_record(sel, c, inputs)]


def cmd_oracle(cfg: RunConfig) -> list[CheckRecord]:
    try:
        c = get_chart(cfg.selector)
    except (UnknownChartError, ValueError) as exc:
        raise ConfigError(str(exc.args[0] if exc.args else exc)) from exc
    fd, n_s, seed = cfg.fd, cfg.samples, cfg.seed
    tol = 1e-4
    key = cfg.selector
    inputs = {"chart": key, "h": fd.h, "order": fd.order, "samples": n_s}
    recs = []
    for formula, eq in (("conn-3.2", "eq-3.2"), ("curv-3.3", "eq-3.3"), ("ricci-3.4", "eq-3.4")):
        cv = t1m.cross_validate(c, formula, n_s, fd, seed, tol)
        recs.append(CheckRecord(f"oracle/{eq}", eq, cv.report.worst, tol, inputs=inputs))
    cv = t1m.cross_validate(c, "scalar-3.5", n_s, fd, seed, tol)
    recs.append(CheckRecord(
        "oracle/eq-3.5", "eq-3.5", cv.report.violations["trace-consistent"], tol, inputs=inputs,
        values={"matching_normalization": cv.matching_normalization,
                "as_printed_deviation": cv.report.violations["as-printed"],
                "trace_consistent_deviation": cv.report.violations["trace-consistent"]}))
    rep = t1m.validate_contact_structure(c, n_s, fd, seed)
    recs.append(CheckRecord("oracle/eq-2.1-contact", "eq-2.1", rep.worst, 1e-6, inputs=inputs,
                            values=rep.violations))
    fit_n = max(10, n_s)
    fit = t1m.fit_alpha_beta(c, fit_n, fd, seed)
    closed = t1m.closed_form_fit(c, fit_n, fd, seed)
    dev = max(abs(fit.alpha - closed.alpha), abs(fit.beta - closed.beta), abs(fit.residual - closed.residual))
    recs.append(CheckRecord(
        "oracle/thm-1.1-fit-alpha-beta", "thm-1.1", dev, tol, inputs={**inputs, "samples": fit_n},
        values={"alpha": fit.alpha, "beta": fit.beta, "residual": fit.residual, "spread": fit.spread,
                "closed_form": {"alpha": closed.alpha, "beta": closed.beta, "residual": closed.residual},
                "eta_einstein": fit.residual <= tol and fit.spread <= tol}))
    return recs


def cmd_verify(cfg: RunConfig) -> list[CheckRecord]:
    ctx = SuiteContext(fd=cfg.fd, samples=cfg.samples, seed=cfg.seed)
    recs = run_suite(ctx, cfg.only)
    if cfg.only and not recs:
        raise ConfigError(f"--only {','.join(cfg.only)} selects no checks")
    return recs


COMMANDS = {"verify": cmd_verify, "classify": cmd_classify, "oracle": cmd_oracle}


def run(cfg: RunConfig) -> Report:
    records = COMMANDS[cfg.command](cfg)
    if cfg.tol is not None:
        for r in records:
            if r.overridable:
                r.tol = cfg.tol
    return Report(cfg.echo(), records, deterministic=cfg.deterministic)


# -- argument parsing -----------------------------------------------------------------

# options whose values may legitimately start with '-'
_VALUE_OPTIONS = ("--params", "--rho", "--kappa", "--tol", "--fd-step")


def _join_negative_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="override numeric tolerances of every check")
    common.add_argument("--fd-order", type=int, choices=(2, 4), default=4)
    common.add_argument("--fd-step", type=float, default=1e-3)
    common.add_argument("--samples", type=int, default=10, help="oracle sample points")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp")

    p = argparse.ArgumentParser(prog="unitbundle", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--only", help="comma-separated groups or check-id fragments")
    c = sub.add_parser("classify", parents=[common], help="classify one input")
    c.add_argument("selector", choices=("dim2", "dim3", "const-curv", "st4d"))
    c.add_argument("--kappa", type=float)
    c.add_argument("--n", type=int)
    c.add_argument("--rho", help="Ricci tensor: 6 upper-triangle or 9 row-major numbers")
    c.add_argument("--params", help="Singer-Thorpe a,b,c,d,e,f")
    o = sub.add_parser("oracle", parents=[common], help="finite-difference cross-validation on a chart")
    o.add_argument("--chart", required=True, help="e.g. sphere:n=4,kappa=2")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.tol is not None and not ns.tol > 0:
        raise ConfigError("--tol must be positive")
    if ns.samples < 1:
        raise ConfigError("--samples must be positive")
    try:
        fd = FDConfig(h=ns.fd_step, order=ns.fd_order)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig(ns.command, tol=ns.tol, fd=fd, samples=ns.samples, seed=ns.seed, fmt=ns.fmt,
                    out=ns.out, deterministic=ns.deterministic)
    if ns.command == "verify":
        cfg.only = [t.strip() for t in ns.only.split(",") if t.strip()] if ns.only else None
    elif ns.command == "classify":
        cfg.selector = ns.selector
        cfg.params = {k: getattr(ns, k) for k in ("kappa", "n", "rho", "params") if getattr(ns, k) is not None}
    else:
        cfg.selector = ns.chart
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        report = run(cfg)
    except (ConfigError, OracleDomainError) as exc:
        print(f"unitbundle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.render(cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.ok else EXIT_FAIL
