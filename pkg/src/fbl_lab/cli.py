"""``fbl-lab``: free-norm estimates, property suites and spectral reports.

Exit codes: 0 success, 1 property failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from . import __version__
from .fbl_norm import p_free_norm, real_free_norm
from .io import config_hash, decode_matrix, dumps, elem_from_json, load_json, write_atomic
from .lattice_expr import DEFAULT_SEED
from .spaces import _parse_p, space_from_spec
from .spectra import matrix_spectrum
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    space: Optional[object] = None
    expr: Optional[str] = None
    matrix: Optional[object] = None
    p: object = 1.0
    variant: str = "auto"
    m_max: int = 6
    budget: int = 400
    restarts: int = 8
    seed: int = DEFAULT_SEED
    trials: Optional[int] = None
    k_max: int = 64
    out: Optional[str] = None
    format: str = "json"
    timing: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def validate(self) -> "RunConfig":
        for name in ("m_max", "budget", "restarts", "k_max"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise UsageError(f"{name} must be a positive integer")
        if self.trials is not None and (not isinstance(self.trials, int) or self.trials < 1):
            raise UsageError("trials must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise UsageError("seed must be a nonnegative integer")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.variant not in ("auto", "real", "complex"):
            raise UsageError("variant must be auto, real or complex")
        try:
            p = _parse_p(self.p)
        except (TypeError, ValueError) as e:
            raise UsageError(str(e))
        if not p >= 1:
            raise UsageError("p must be >= 1")
        self.p = "inf" if p == float("inf") else p
        return self

    def provenance(self) -> dict:
        # paths, output format and timing do not change the numbers
        d = {k: v for k, v in asdict(self).items() if k not in ("out", "format", "timing")}
        return {"tool": "fbl-lab", "version": __version__, "config_hash": config_hash(d)}


def _json_arg(text, what):
    """Inline JSON, or a path to a JSON file."""
    if text is None:
        return None
    if isinstance(text, (dict, list)):
        return text
    s = str(text).strip()
    if s[:1] in "{[":
        try:
            return json.loads(s)
        except json.JSONDecodeError as e:
            raise UsageError(f"bad {what} JSON: {e}")
    try:
        return load_json(s)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read {what} from {s!r}: {e}")


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def _csv(rows: list) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


# -- commands -------------------------------------------------------------------------------


def cmd_norm(cfg: RunConfig) -> int:
    if cfg.space is None or cfg.expr is None:
        raise UsageError("norm needs --space and --expr")
    try:
        space = space_from_spec(_json_arg(cfg.space, "space"))
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad space: {e}")
    obj = _json_arg(cfg.expr, "expression")
    try:
        h = elem_from_json(obj, space)
    except (TypeError, ValueError, KeyError) as e:
        raise UsageError(f"bad expression: {e}")
    if h.dim != space.real_dim:
        raise UsageError(f"expression has {h.dim} real coordinates, space needs {space.real_dim}")
    p = _parse_p(cfg.p)
    real = cfg.variant == "real" or not space.is_complex
    t0 = time.perf_counter()
    if real:
        if p != 1:
            raise UsageError("the real free norm is only implemented for p = 1")
        if any(x.any() for x in h.im.generators()):
            raise UsageError("the real free norm takes a real expression")
        est = real_free_norm(h.re, space, cfg.m_max, cfg.budget, cfg.restarts, cfg.seed)
    else:
        est = p_free_norm(h, space, p, cfg.m_max, cfg.budget, cfg.restarts, cfg.seed)
    ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
    rep = est.to_dict(runtime_ms=ms)
    rep.update(cfg.provenance())
    if cfg.format == "csv":
        text = _csv([{k: rep[k] for k in ("variant", "p", "m_max", "seed", "lower_bound")}
                     | {"exact": rep.get("exact"), "witness": rep["witness"],
                        "config_hash": rep["config_hash"]}])
    else:
        text = dumps(rep)
    _emit(cfg, text)
    return EXIT_OK


def cmd_verify(suite: str, cfg: RunConfig) -> int:
    names = list(SUITES) if suite == "all" else [suite]
    if any(n not in SUITES for n in names):
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
    results = [run_suite(n, cfg.trials, cfg.seed) for n in names]
    for r in results:
        print(r.line(), file=sys.stderr)
    rep = {"suites": [r.to_dict() for r in results], "ok": all(r.ok for r in results)}
    rep.update(cfg.provenance())
    if cfg.format == "csv":
        text = _csv([{"suite": r.suite, "passed": r.passed, "total": r.total, "ok": r.ok,
                      "failing_trials": r.failing} for r in results])
    else:
        text = dumps(rep)
    _emit(cfg, text)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_spectrum(cfg: RunConfig) -> int:
    if cfg.matrix is None:
        raise UsageError("spectrum needs --matrix")
    try:
        T = decode_matrix(_json_arg(cfg.matrix, "matrix"))
        rep = matrix_spectrum(T, k_max=cfg.k_max, gelfand_k=cfg.k_max)
    except ValueError as e:
        raise UsageError(f"bad matrix: {e}")
    d = rep.to_dict()
    d.update(cfg.provenance())
    if cfg.format == "csv":
        text = rep.gelfand_csv()
    else:
        text = dumps(d)
    if cfg.out:
        write_atomic(cfg.out, text)
        if cfg.format == "json":
            out = Path(cfg.out)
            write_atomic(out.with_name(out.stem + ".gelfand.csv"), rep.gelfand_csv())
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fbl-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fbl-lab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with RunConfig keys (flags override it)")
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"))

    n = sub.add_parser("norm", help="estimate a free norm")
    common(n)
    n.add_argument("--space", help="space spec: inline JSON or a file")
    n.add_argument("--expr", help="expression file (or inline JSON)")
    n.add_argument("--p")
    n.add_argument("--variant", choices=("auto", "real", "complex"))
    n.add_argument("--m-max", dest="m_max", type=int)
    n.add_argument("--budget", type=int)
    n.add_argument("--restarts", type=int)
    n.add_argument("--timing", action="store_true", default=None,
                   help="record runtime_ms (makes reports run-dependent)")

    v = sub.add_parser("verify", help="run a property suite")
    common(v)
    v.add_argument("suite", help=f"one of: {', '.join(SUITES)}, all")
    v.add_argument("--trials", type=int)

    s = sub.add_parser("spectrum", help="spectral report for a matrix")
    common(s)
    s.add_argument("--matrix", help="matrix: inline JSON or a file")
    s.add_argument("--k-max", dest="k_max", type=int)
    return ap


def _config(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        base = _json_arg(args.config, "config")
        if not isinstance(base, dict):
            raise UsageError("config must be a JSON object")
    cfg = RunConfig.from_dict(base)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    return cfg.validate()


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "norm":
            return cmd_norm(cfg)
        if args.command == "verify":
            return cmd_verify(args.suite, cfg)
        return cmd_spectrum(cfg)
    except UsageError as e:
        print(f"fbl-lab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
