"""Command-line front end.

Subcommands: ``present`` (emit a ring presentation), ``verify`` (run check
suites), ``matrix`` (emit presentation/degeneration matrices), ``cache``
(inspect or clear the operator cache).  Exit codes: 0 success, 1 a
verification failed, 2 usage error, 3 a resource bound or the time cap was
exceeded.  Output is deterministic: identical configuration gives
byte-identical output (timings are emitted only with --timings).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__, cache as cache_mod
from .reporting import VerifyReport
from .rootdata import DomainError, RootSystem, Weight, build_root_system
from .weyl import DEFAULT_MAX_WEYL, ResourceError

SUITES = ["traces", "eigencolumn", "automorphism", "matching", "appendixB",
          "typeD", "oddvanish", "toda", "cm", "hamiltonian", "tracefree"]


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    rank: Optional[int] = None
    weight: Optional[str] = None
    k_range: Optional[tuple[int, int]] = None
    suite: Optional[str] = None
    fmt: str = "text"
    cache_dir: Optional[str] = None
    jobs: int = 1
    max_weyl: int = DEFAULT_MAX_WEYL
    timeout: Optional[float] = None
    timings: bool = False
    sl: bool = False
    which: Optional[str] = None

    def meta(self) -> dict:
        out = {"version": __version__, "command": self.command}
        for key in ("family", "rank", "weight", "suite", "which"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.k_range:
            out["k"] = "%d..%d" % self.k_range
        return out


def parse_weight(rs: RootSystem, spec: str) -> Weight:
    """Parse a weight: '-e1', 'e2', 'rho', '-rho', 'fund:i', 'zero', or an
    explicit comma-separated rational vector."""
    spec = spec.strip()
    if spec == "rho":
        return rs.rho
    if spec == "-rho":
        return -rs.rho
    if spec == "zero" or spec == "0":
        return Weight.zero(rs.rank)
    if spec.startswith("fund:"):
        i = int(spec[5:])
        if not 1 <= i <= len(rs.fundamental_weights):
            raise DomainError("fundamental weight index out of range")
        return rs.fundamental_weights[i - 1]
    neg = spec.startswith("-")
    body = spec[1:] if neg else spec
    if body.startswith("e") and body[1:].isdigit():
        i = int(body[1:])
        if not 1 <= i <= rs.rank:
            raise DomainError("basis weight index out of range")
        w = Weight.basis(i, rs.rank)
        return -w if neg else w
    coords = [Fraction(part.strip()) for part in spec.split(",")]
    if len(coords) != rs.rank:
        raise DomainError("weight vector length %d, expected %d" % (len(coords), rs.rank))
    return Weight(tuple(coords))


def _parse_k_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    k = int(text)
    return k, k


# ---------------------------------------------------------------------------
# suite instances


def default_instances(cfg: RunConfig) -> list[tuple]:
    """Instance tuples (suite, params...) for the selected suite.

    Defaults follow the acceptance set; --family/--rank/--weight/--k narrow
    a suite to a single instance.
    """
    suites = SUITES if cfg.suite == "all" else [cfg.suite]
    out: list[tuple] = []
    custom = cfg.family is not None or cfg.rank is not None
    for suite in suites:
        if suite == "traces":
            if custom:
                fam = cfg.family or "A"
                rank = cfg.rank or 2
                weight = cfg.weight or "-e1"
                lo, hi = cfg.k_range or (1, 2)
                out += [("traces", fam, rank, weight, k) for k in range(lo, hi + 1)]
            else:
                out += [("traces", "A", 2, "e1", k) for k in range(1, 5)]
                out += [("traces", "A", 3, "-e1", k) for k in range(1, 4)]
                out += [("traces", "A", 3, "rho", k) for k in range(1, 4)]
                out += [("traces", "B", 2, "-e1", k) for k in range(1, 3)]
                out += [("traces", "C", 2, "-e1", k) for k in range(1, 3)]
                out += [("traces", "sl2", 0, "", 0)]  # operator product identities
        elif suite == "eigencolumn":
            if custom:
                out.append(("eigencolumn", cfg.family or "A", cfg.rank or 2,
                            cfg.weight or "-e1"))
            else:
                out += [("eigencolumn", "A", 2, "e1"),
                        ("eigencolumn", "A", 3, "-e1"),
                        ("eigencolumn", "A", 3, "rho"),
                        ("eigencolumn", "B", 2, "-e1")]
        elif suite == "automorphism":
            if custom:
                out.append(("automorphism", cfg.family or "A", cfg.rank or 2))
            else:
                out += [("automorphism", fam, rank)
                        for fam, rank in [("A", 2), ("A", 3), ("B", 2), ("C", 2), ("D", 2)]]
        elif suite == "matching":
            ranks = [cfg.rank] if cfg.rank else [2, 3, 4, 5]
            out += [("matching", n) for n in ranks]
        elif suite == "appendixB":
            ranks = [cfg.rank] if cfg.rank else list(range(2, 7))
            out += [("appendixB-cyclic", n) for n in ranks]
            out += [("appendixB-anticauchy", n)
                    for n in ([cfg.rank] if cfg.rank else range(1, 7))]
            out.append(("appendixB-telephone", 8))
        elif suite == "typeD":
            ranks = [cfg.rank] if cfg.rank else [2, 3]
            out += [("typeD", n) for n in ranks]
        elif suite == "oddvanish":
            if custom:
                out.append(("oddvanish", cfg.family or "B", cfg.rank or 2))
            else:
                out += [("oddvanish", fam, n)
                        for n in (2, 3) for fam in ("B", "C", "D")]
        elif suite == "toda":
            if custom and cfg.family:
                out.append(("toda", cfg.family, cfg.rank or 2))
            else:
                out += [("toda", "A", n) for n in (1, 2, 3, 4)]
                out += [("toda", "B", n) for n in (1, 2, 3)]
                out += [("toda", "C", n) for n in (1, 2, 3)]
                out += [("toda", "Cext", n) for n in (1, 2, 3)]
                out += [("toda", "D", n) for n in (2, 3)]
                out += [("toda", "tridiag", n) for n in (1, 2, 3, 4, 5, 6)]
        elif suite == "cm":
            if custom:
                lo, hi = cfg.k_range or (1, 2)
                out += [("cm", cfg.family or "A", cfg.rank or 2,
                         cfg.weight or "-e1", k) for k in range(lo, hi + 1)]
            else:
                out += [("cm", "A", 2, "e1", k) for k in (1, 2, 3)]
                out += [("cm", "A", 3, "-e1", k) for k in (1, 2, 3)]
                out += [("cm", "B", 2, "-e1", 2)]
                out += [("cm-commute", fam, rank)
                        for fam, rank in [("A", 2), ("A", 3), ("B", 2), ("C", 2), ("D", 2)]]
        elif suite == "hamiltonian":
            if custom:
                out.append(("hamiltonian", cfg.family or "A", cfg.rank or 2,
                            cfg.weight or "rho"))
            else:
                out += [("hamiltonian", "A", 2, "e1"),
                        ("hamiltonian", "A", 3, "rho")]
        elif suite == "tracefree":
            if custom:
                lo, hi = cfg.k_range or (2, 2)
                out += [("tracefree", cfg.family or "A", cfg.rank or 2,
                         cfg.weight or "rho", k) for k in range(lo, hi + 1)]
            else:
                out += [("tracefree", "A", 2, "e1", 2),
                        ("tracefree", "A", 3, "rho", 2)]
        else:
            raise DomainError("unknown suite %r" % suite)
    return out


def run_instance(inst: tuple) -> VerifyReport:
    from . import cm, presentations, stable, toda
    kind = inst[0]
    if kind == "traces":
        _, fam, rank, weight, k = inst
        if fam == "sl2":
            return stable.verify_sl2_identities()
        rs = build_root_system(fam, rank)
        return stable.verify_trace_relation(rs, parse_weight(rs, weight), k)
    if kind == "eigencolumn":
        _, fam, rank, weight = inst
        rs = build_root_system(fam, rank)
        return stable.verify_eigencolumn(rs, parse_weight(rs, weight))
    if kind == "automorphism":
        _, fam, rank = inst
        return stable.verify_automorphism_suite(build_root_system(fam, rank))
    if kind == "matching":
        return presentations.verify_matching_theorem(inst[1])
    if kind == "appendixB-cyclic":
        return presentations.verify_cyclic_sum(inst[1])
    if kind == "appendixB-anticauchy":
        return presentations.anticauchy_det(inst[1])[2]
    if kind == "appendixB-telephone":
        return presentations.verify_matching_counts(inst[1])
    if kind == "typeD":
        return presentations.verify_typeD(inst[1])
    if kind == "oddvanish":
        return presentations.verify_odd_vanishing(inst[1], inst[2])
    if kind == "toda":
        _, fam, n = inst
        if fam == "A":
            return toda.verify_givental_kim(n)
        if fam == "B":
            return toda.verify_typeB_limit(n)
        if fam == "C":
            return toda.verify_typeC_limit(n)
        if fam == "Cext":
            return toda.verify_typeC_extension(n)
        if fam == "D":
            return toda.verify_typeD_limit(n)
        if fam == "tridiag":
            return presentations.verify_tridiag(n)
    if kind == "cm":
        _, fam, rank, weight, k = inst
        rs = build_root_system(fam, rank)
        return cm.verify_cm_corollary(rs, parse_weight(rs, weight), k)
    if kind == "cm-commute":
        return cm.verify_dunkl_commutativity(build_root_system(inst[1], inst[2]))
    if kind == "hamiltonian":
        _, fam, rank, weight = inst
        rs = build_root_system(fam, rank)
        return cm.verify_hamiltonian(rs, parse_weight(rs, weight))
    if kind == "tracefree":
        _, fam, rank, weight, k = inst
        rs = build_root_system(fam, rank)
        return cm.verify_tracefree(rs, parse_weight(rs, weight), k)
    raise DomainError("unknown instance %r" % (inst,))


def cmd_verify(cfg: RunConfig) -> int:
    from . import stable
    stable.set_persistent_cache(
        cache_mod.OperatorCache(cache_mod.resolve_dir(cfg.cache_dir)))
    instances = default_instances(cfg)
    deadline = time.monotonic() + cfg.timeout if cfg.timeout else None
    reports: list[VerifyReport] = []
    timed_out = False
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = {pool.submit(run_instance, inst): inst for inst in instances}
            for fut, inst in futures.items():
                if deadline is not None and time.monotonic() > deadline:
                    timed_out = True
                    fut.cancel()
                    continue
                try:
                    reports.append(fut.result(timeout=None if deadline is None
                                              else max(0.1, deadline - time.monotonic())))
                except Exception as exc:  # noqa: BLE001 - reported, not raised
                    reports.append(VerifyReport(inst[0], {"instance": str(inst)},
                                                False, "error: %s" % exc))
    else:
        for inst in instances:
            if deadline is not None and time.monotonic() > deadline:
                timed_out = True
                break
            reports.append(run_instance(inst))
    reports.sort(key=lambda r: r.key())
    all_passed = all(r.passed for r in reports)
    if cfg.fmt == "json":
        payload = {"reports": [r.to_obj(cfg.timings) for r in reports],
                   "passed": all_passed and not timed_out,
                   "timed_out": timed_out}
        print(json.dumps({"meta": cfg.meta(), "payload": payload}, indent=2,
                         sort_keys=True))
    else:
        for r in reports:
            print(r.line(cfg.timings))
        print("%d/%d passed" % (sum(r.passed for r in reports), len(reports)))
        if timed_out:
            print("time cap exceeded; report is partial")
    if timed_out:
        return 3
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# present / matrix


def cmd_present(cfg: RunConfig) -> int:
    from .stable import emit_presentation
    rs = build_root_system(cfg.family, cfg.rank)
    pres = emit_presentation(rs, sl=cfg.sl)
    if cfg.fmt == "json":
        print(json.dumps({"meta": cfg.meta(), "payload": pres.to_json_obj()},
                         indent=2, sort_keys=True))
    elif cfg.fmt == "latex":
        print(pres.to_latex())
    else:
        print(pres.to_text())
    return 0


def cmd_matrix(cfg: RunConfig) -> int:
    from . import presentations, toda
    from .stable import theta_matrix
    from .symbolic import RatExpr, xvar

    which = cfg.which
    if which == "mchi":
        mat = presentations.m_chi(cfg.family, cfg.rank)
    elif which == "achi":
        mat = presentations.a_chi(cfg.rank)
    elif which == "theta":
        rs = build_root_system(cfg.family, cfg.rank)
        lam = parse_weight(rs, cfg.weight or "-e1")
        mat = theta_matrix(rs, lam).symbol_matrix()
    elif which == "toda":
        fam = cfg.family.upper()
        if fam == "A":
            mat = toda.flag_matrix_a(cfg.rank)
        elif fam in ("B", "C"):
            mat = toda.flag_matrix_bc(fam, cfg.rank)
        elif fam == "D":
            mat = toda.flag_matrix_d(cfg.rank)
        else:
            raise DomainError("unsupported family for the degeneration matrix")
    else:
        raise DomainError("unknown matrix selector %r" % which)
    if cfg.fmt == "json":
        print(json.dumps({"meta": cfg.meta(), "payload": mat.to_json_obj()},
                         indent=2, sort_keys=True))
    elif cfg.fmt == "latex":
        print(mat.to_latex(chi="chi" if which in ("mchi", "achi") else "x"))
    else:
        for row in mat.to_text_rows():
            print("  ".join("[%s]" % e for e in row))
    return 0


def cmd_cache(cfg: RunConfig, action: str) -> int:
    store = cache_mod.OperatorCache(cache_mod.resolve_dir(cfg.cache_dir))
    if action == "stat":
        print(json.dumps(store.stat(), indent=2, sort_keys=True))
        return 0
    if action == "gc":
        removed = store.gc()
        print("removed %d entries" % removed)
        return 0
    raise DomainError("unknown cache action %r" % action)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="springerqh",
        description="Exact presentations and verification suites for the "
                    "equivariant quantum cohomology of Springer resolutions.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_family=False):
        p.add_argument("--family", choices=["A", "B", "C", "D"], required=need_family)
        p.add_argument("--rank", type=int)
        p.add_argument("--weight")
        p.add_argument("--format", dest="fmt", choices=["text", "json", "latex"],
                       default="text")
        p.add_argument("--cache-dir")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--max-weyl", type=int, default=DEFAULT_MAX_WEYL)
        p.add_argument("--timeout", type=float)
        p.add_argument("--timings", action="store_true")

    p = sub.add_parser("present", help="emit a ring presentation")
    common(p, need_family=True)
    p.add_argument("--sl", action="store_true",
                   help="add the special-linear center relation (type A)")

    p = sub.add_parser("verify", help="run verification suites")
    common(p)
    p.add_argument("--suite", choices=SUITES + ["all"], default="all")
    p.add_argument("--k", help="power or range lo..hi")

    p = sub.add_parser("matrix", help="emit presentation or degeneration matrices")
    common(p)
    p.add_argument("--which", choices=["mchi", "achi", "theta", "toda"],
                   required=True)

    p = sub.add_parser("cache", help="operator cache maintenance")
    p.add_argument("action", choices=["stat", "gc"])
    p.add_argument("--cache-dir")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = RunConfig(
        command=ns.command,
        family=getattr(ns, "family", None),
        rank=getattr(ns, "rank", None),
        weight=getattr(ns, "weight", None),
        suite=getattr(ns, "suite", None),
        fmt=getattr(ns, "fmt", "text"),
        cache_dir=getattr(ns, "cache_dir", None),
        jobs=getattr(ns, "jobs", 1),
        max_weyl=getattr(ns, "max_weyl", DEFAULT_MAX_WEYL),
        timeout=getattr(ns, "timeout", None),
        timings=getattr(ns, "timings", False),
        sl=getattr(ns, "sl", False),
        which=getattr(ns, "which", None),
    )
    if getattr(ns, "k", None):
        cfg.k_range = _parse_k_range(ns.k)
    try:
        if ns.command == "present":
            if not cfg.rank or cfg.rank < 1 or (cfg.family == "D" and cfg.rank < 2):
                raise DomainError("invalid rank for presentation")
            return cmd_present(cfg)
        if ns.command == "verify":
            return cmd_verify(cfg)
        if ns.command == "matrix":
            if not cfg.rank or cfg.rank < 1:
                raise DomainError("matrix commands need --rank")
            if cfg.which != "achi" and not cfg.family:
                raise DomainError("matrix commands need --family")
            return cmd_matrix(cfg)
        if ns.command == "cache":
            return cmd_cache(cfg, ns.action)
    except DomainError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ResourceError as exc:
        print("resource bound exceeded: %s" % exc, file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
