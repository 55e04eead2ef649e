"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 gate failure or failed
duality check, 64 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from . import CONVENTION, __version__
from . import cohomology as co
from . import hecke, prym
from .cameral import (
    CoverDatum, cover_from_json, cover_to_json, local_system, random_cover, validate_cover,
)
from .errors import (
    CapExceeded, CoverError, GateError, InfeasibleCover, LatticeError,
    RootDatumError, ValidationError,
)
from .rootdata import center, group_family, isogeny_classes, langlands_dual, parse_group, pi1

EXIT_OK, EXIT_INVALID, EXIT_GATE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    group: Optional[str] = None
    cover_path: Optional[str] = None
    genus: Optional[int] = None
    branches: Optional[int] = None
    seed: Optional[int] = None
    fmt: str = "text"
    weyl_cap: int = 2_000_000
    retries: int = 400
    force: bool = False

    def cover_source(self) -> str:
        rand = self.group is not None or self.genus is not None or self.branches is not None
        if self.cover_path and rand:
            raise UsageError("give either a cover file or --group/--genus/--branches, not both")
        if self.cover_path:
            return "file"
        if self.group and self.genus is not None and self.branches is not None:
            return "random"
        raise UsageError("a cover file or --group, --genus and --branches are required")


# --------------------------------------------------------------------------
# report helpers


def _report(cfg_input: dict, results: dict, verdict: str) -> dict:
    return {
        "version": __version__,
        "convention": CONVENTION,
        "input": cfg_input,
        "results": results,
        "verdict": verdict,
    }


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True)


def _resolve_path(path: str) -> str:
    """Existing path, else a bundled example with the same file name."""
    if os.path.exists(path):
        return path
    name = os.path.basename(path)
    bundled = resources.files("hitchin_duality").joinpath("examples", name)
    if bundled.is_file():
        return str(bundled)
    raise UsageError(f"cover file not found: {path}")


def _load_cover(cfg: RunConfig) -> tuple:
    src = cfg.cover_source()
    if src == "file":
        path = _resolve_path(cfg.cover_path)
        with open(path, "r", encoding="utf-8") as fh:
            cd = cover_from_json(fh.read())
        return cd, {"cover_file": cfg.cover_path}
    rd = parse_group(cfg.group)
    seed = cfg.seed or 0
    cd = random_cover(rd, cfg.genus, cfg.branches, seed, max_attempts=cfg.retries)
    return cd, {"group": cfg.group, "genus": cfg.genus, "branches": cfg.branches, "seed": seed}


def _cover_json(cd: CoverDatum):
    try:
        return cover_to_json(cd)
    except CoverError:
        return None


# --------------------------------------------------------------------------
# subcommands (each returns (report dict, text lines, exit code))


def cmd_dual(cfg):
    rd = parse_group(cfg.group)
    d = langlands_dual(rd)
    return _report({"group": cfg.group}, {"dual": d.name}, "pass"), [d.name], EXIT_OK


def cmd_epsilon(cfg):
    rd = parse_group(cfg.group)
    rows = []
    for r in rd.positive_roots():
        rows.append({
            "root": list(r.coefficients),
            "length": "long" if r.is_long else "short",
            "epsilon": rd.epsilon(r),
            "epsilon_dual": rd.epsilon_dual(r),
        })
    text = [f"{r['root']} {r['length']}: eps={r['epsilon']} eps_dual={r['epsilon_dual']}" for r in rows]
    return _report({"group": cfg.group}, {"roots": rows, "family": group_family(rd)}, "pass"), text, EXIT_OK


def cmd_pi1(cfg):
    g = pi1(parse_group(cfg.group))
    return _report({"group": cfg.group}, {"pi1": g.to_json()}, "pass"), [str(g)], EXIT_OK


def cmd_center(cfg):
    g = center(parse_group(cfg.group))
    return _report({"group": cfg.group}, {"center": g.to_json()}, "pass"), [str(g)], EXIT_OK


def cmd_validate(cfg):
    cd, inp = _load_cover(cfg)
    rep = validate_cover(cd)
    res = rep.to_json()
    res["group"] = cd.datum.name
    text = [f"{i.name}: {'ok' if i.ok else 'FAIL'}{(' - ' + i.detail) if i.detail else ''}" for i in rep.items]
    text += [f"note: {n}" for n in rep.notes]
    text.append(f"valid: {rep.valid}, generic: {rep.generic}")
    code = EXIT_OK if rep.ok else EXIT_INVALID
    return _report(inp, res, "pass" if rep.ok else "fail"), text, code


def _cohomology_results(cd: CoverDatum) -> dict:
    L = local_system(cd)
    tor = co.h1_torsion(L)
    pg = co.pairing_gram(L)
    res = {
        "group": cd.datum.name,
        "h1_open": str(co.h1_open(L).group),
        "h1_punctured": str(co.h1_punctured(L).group),
        "h1_pushforward": str(co.h1_pushforward(L).group),
        "h0_pushforward": str(co.h0_pushforward(L)),
        "h2_pushforward": str(co.h2_pushforward(L)),
        "h1_open_torsion": str(tor.open),
        "h1_pushforward_torsion": str(tor.pushforward),
        "saturation_index_open": tor.open_witness.index,
        "saturation_index_pushforward": tor.pushforward_witness.index,
        "gram_rank": pg.matrix.rows,
        "gram_det": pg.det if pg.matrix.rows else 1,
        "gates": {"kronecker": co.kronecker_gate(L)},
    }
    if L.handles_trivial():
        res["gates"]["handle_block"] = co.handle_block_gate(L)
    return res


def cmd_cohomology(cfg):
    cd, inp = _load_cover(cfg)
    _require(cd)
    res = _cohomology_results(cd)
    ok = all(res["gates"].values())
    text = [f"{k}: {v}" for k, v in sorted(res.items()) if k != "gates"]
    text += [f"gate {k}: {'ok' if v else 'FAIL'}" for k, v in sorted(res["gates"].items())]
    return _report(inp, res, "pass" if ok else "fail"), text, EXIT_OK if ok else EXIT_GATE


def cmd_prym(cfg):
    cd, inp = _load_cover(cfg)
    _require(cd)
    sw = prym.prym_sandwich(cd)
    pi0 = prym.component_groups(cd)
    h0 = prym.automorphism_groups(cd)
    res = {"group": cd.datum.name, "sandwich": sw.to_json(),
           "component_groups": pi0.to_json(), "automorphism_groups": h0.to_json()}
    text = [
        f"group: {cd.datum.name}",
        f"rank: {sw.rank}",
        f"L/L0: {sw.quotient('L0', 'L')}",
        f"L1/L: {sw.quotient('L', 'L1')}",
        f"pi0 (T0, T, Tbar): {', '.join(str(x) for x in pi0.as_tuple())}",
        f"H0  (T0, T, Tbar): {', '.join(str(x) for x in h0.as_tuple())}",
    ]
    return _report(inp, res, "pass"), text, EXIT_OK


def cmd_verify_duality(cfg):
    cd, inp = _load_cover(cfg)
    _require(cd)
    rep = prym.verify_duality(cd, force=cfg.force)
    res = rep.to_json()
    text = [f"{cd.datum.name} vs {rep.dual_group}"]
    text += [f"{'pass' if c.ok else 'FAIL'}  {c.name}" for c in rep.checks]
    text.append(f"verdict: {res['verdict']}")
    return _report(inp, res, res["verdict"]), text, EXIT_OK if rep.verdict else EXIT_GATE


def cmd_hecke(cfg, lam_text: str):
    rd = parse_group(cfg.group)
    try:
        lam = [int(x) for x in lam_text.replace(" ", "").strip("[]()").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"cannot parse lambda {lam_text!r}") from None
    hc = hecke.HeckeClass(rd, tuple(lam))
    cc = hecke.characteristic_class(hc, cfg.weyl_cap)
    shift = hecke.component_shift(rd, lam)
    res = {
        "group": rd.name, "lambda": lam,
        "characteristic_class": list(cc.vector), "topologically_trivial": cc.trivial,
        "pi1": str(pi1(rd)), "component_shift": list(shift),
        "shift_transitive": hecke.shift_transitivity(rd),
    }
    text = [f"characteristic class: {list(cc.vector)} ({'trivial' if cc.trivial else 'non-trivial'})",
            f"component shift in {res['pi1']}: {list(shift)}"]
    return _report({"group": cfg.group, "lambda": lam}, res, "pass"), text, EXIT_OK


# --------------------------------------------------------------------------
# sweep


def sweep_parameters(seed: int, max_genus: int = 3, max_branches: int = 12) -> tuple:
    """Deterministic ``(genus, branches)`` for a sweep seed."""
    rng = random.Random(f"sweep|{seed}")
    g = rng.randint(1, max_genus)
    b = 2 * rng.randint(2, max_branches // 2)
    return g, b


def sweep_one(args) -> dict:
    group, seed, max_genus, max_branches = args
    warnings.simplefilter("ignore")
    rd = parse_group(group)
    g, b = sweep_parameters(seed, max_genus, max_branches)
    row = {"group": rd.name, "seed": seed, "genus": g, "branches": b}
    try:
        cd = random_cover(rd, g, b, seed)
    except InfeasibleCover as e:
        row.update(status="skipped", reason=str(e))
        return row
    row["cover"] = _cover_json(cd)
    try:
        L = local_system(cd)
        tor = co.h1_torsion(L)
        pi0 = prym.component_groups(cd)
        h0 = prym.automorphism_groups(cd)
        rep = prym.verify_duality(cd, force=True)
        row.update(
            status="pass" if rep.verdict else "fail",
            h1_pushforward_torsion=str(tor.pushforward),
            pi0=[str(x) for x in pi0.as_tuple()],
            h0=[str(x) for x in h0.as_tuple()],
            duality=rep.verdict,
        )
        if not rep.verdict:
            row["failed_checks"] = [c.name for c in rep.checks if not c.ok]
    except GateError as e:
        row.update(status="gate_failure", reason=str(e))
    return row


def cmd_sweep(cfg, ns):
    groups = []
    if ns.isogeny == "all":
        for rd in isogeny_classes(ns.type, ns.rank):
            groups.append(rd.name)
    else:
        groups.append(f"{ns.type.upper()}{ns.rank}:{ns.isogeny}")
    for gname in groups:
        parse_group(gname)
    tasks = [(gname, ns.seed + i, ns.max_genus, ns.max_branches)
             for gname in groups for i in range(ns.count)]
    if ns.jobs > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as ex:
            rows = list(ex.map(sweep_one, tasks))
    else:
        rows = [sweep_one(t) for t in tasks]
    failed = [r for r in rows if r["status"] in ("fail", "gate_failure")]
    verdict = "fail" if failed else "pass"
    inp = {"type": ns.type.upper(), "rank": ns.rank, "isogeny": ns.isogeny, "count": ns.count,
           "seed": ns.seed, "max_genus": ns.max_genus, "max_branches": ns.max_branches}
    summary = {
        "covers": len(rows),
        "passed": sum(r["status"] == "pass" for r in rows),
        "skipped": sum(r["status"] == "skipped" for r in rows),
        "failed": len(failed),
    }
    text = [f"{r['group']} seed={r['seed']} g={r['genus']} b={r['branches']}: {r['status']}" for r in rows]
    text.append(f"summary: {summary}")
    code = EXIT_OK
    if any(r["status"] == "gate_failure" for r in rows) or failed:
        code = EXIT_GATE
    return _report(inp, {"rows": rows, "summary": summary}, verdict), text, code


def _require(cd: CoverDatum):
    rep = validate_cover(cd)
    if not rep.ok:
        raise ValidationError("; ".join(f"{i.name}: {i.detail}" for i in rep.failures()), rep)


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hitchin-duality", description="Lattice invariants of Hitchin systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--weyl-cap", type=int, default=2_000_000)

    for name, helptext in (("dual", "Langlands dual datum"), ("epsilon", "eps and eps_dual per positive root"),
                           ("pi1", "fundamental group"), ("center", "center")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("group", help="group name such as B3:sc, A2:ad, D4:w=1,0,0,0")
        common(sp)

    for name in ("validate", "cohomology", "prym", "verify-duality"):
        sp = sub.add_parser(name, help=f"{name} for a cover")
        sp.add_argument("cover", nargs="?", help="cover JSON file")
        sp.add_argument("--group")
        sp.add_argument("--genus", type=int)
        sp.add_argument("--branches", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--retries", type=int, default=400)
        if name == "verify-duality":
            sp.add_argument("--force", action="store_true", help="allow type A1")
        common(sp)

    sp = sub.add_parser("hecke", help="characteristic class and component shift")
    sp.add_argument("group")
    sp.add_argument("--lambda", dest="lam", required=True, help="comma-separated cocharacter")
    common(sp)

    sp = sub.add_parser("sweep", help="randomized duality sweep")
    sp.add_argument("--type", required=True)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--isogeny", default="all", help="sc, ad, w=..., or all")
    sp.add_argument("--max-genus", type=int, default=3)
    sp.add_argument("--max-branches", type=int, default=12)
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    cfg = RunConfig(
        subcommand=ns.cmd,
        group=getattr(ns, "group", None),
        cover_path=getattr(ns, "cover", None),
        genus=getattr(ns, "genus", None),
        branches=getattr(ns, "branches", None),
        seed=getattr(ns, "seed", None),
        fmt=ns.format,
        weyl_cap=ns.weyl_cap,
        retries=getattr(ns, "retries", 400),
        force=getattr(ns, "force", False),
    )
    handlers = {
        "dual": cmd_dual, "epsilon": cmd_epsilon, "pi1": cmd_pi1, "center": cmd_center,
        "validate": cmd_validate, "cohomology": cmd_cohomology, "prym": cmd_prym,
        "verify-duality": cmd_verify_duality,
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            if ns.cmd == "hecke":
                report, text, code = cmd_hecke(cfg, ns.lam)
            elif ns.cmd == "sweep":
                if ns.count < 0 or ns.jobs < 1:
                    raise UsageError("count must be >= 0 and jobs >= 1")
                report, text, code = cmd_sweep(cfg, ns)
            else:
                report, text, code = handlers[ns.cmd](cfg)
        except (UsageError, CoverError, RootDatumError, LatticeError) as e:
            print(f"hitchin-duality: error: {e}", file=err)
            return EXIT_USAGE
        except (ValidationError, InfeasibleCover) as e:
            if cfg.fmt == "json":
                rep = getattr(e, "report", None)
                res = {"error": str(e)}
                if rep is not None:
                    res["validation"] = rep.to_json()
                print(_dump(_report({"subcommand": ns.cmd}, res, "fail")), file=out)
            print(f"hitchin-duality: validation failed: {e}", file=err)
            return EXIT_INVALID
        except CapExceeded as e:
            print(f"hitchin-duality: error: {e}", file=err)
            return EXIT_INVALID
        except GateError as e:
            if cfg.fmt == "json":
                print(_dump(_report({"subcommand": ns.cmd}, {"error": str(e), "details": _jsonable(e.details)},
                                    "fail")), file=out)
            print(f"hitchin-duality: internal gate failed: {e}", file=err)
            return EXIT_GATE
    if cfg.fmt == "json":
        print(_dump(report), file=out)
    else:
        for line in text:
            print(line, file=out)
    return code


def _jsonable(x):
    try:
        json.dumps(x)
        return x
    except TypeError:
        return str(x)


def main() -> None:
    sys.exit(run())
