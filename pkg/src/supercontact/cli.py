"""Command line front end.

Every command can print a canonical JSON report (sorted keys, exact
fractions as "p/q" strings). Expensive commands are cached on disk when a
cache directory is given (``--cache-dir`` or ``SUPERCONTACT_CACHE_DIR``).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import __version__

CACHE_ENV = "SUPERCONTACT_CACHE_DIR"
CACHED = {"search-invariant", "h1-dim", "relative-h1", "report"}
_RAT = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    if not _RAT.match(text.strip()):
        raise argparse.ArgumentTypeError(f"not a rational 'p/q' or integer: {text!r}")
    return Fraction(text.strip())


def natural(text: str) -> int:
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return int(text)


def jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def canonical(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


# -- cache ---------------------------------------------------------------------------------

class Cache:
    """One JSON file per report; advisory locking through ``filelock``."""

    def __init__(self, directory: Optional[str]):
        self.dir: Optional[Path] = None
        if not directory:
            return
        try:
            p = Path(directory)
            p.mkdir(parents=True, exist_ok=True)
            probe = p / ".probe"
            probe.write_text("")
            probe.unlink()
            self.dir = p
        except OSError as exc:
            warn(f"cache directory {directory!r} unusable ({exc}); continuing without cache")

    def _paths(self, key: str):
        h = hashlib.sha256(key.encode()).hexdigest()[:32]
        return self.dir / f"{h}.json", self.dir / f"{h}.lock"

    def get(self, key: str) -> Optional[dict]:
        if self.dir is None:
            return None
        from filelock import FileLock
        path, lock = self._paths(key)
        with FileLock(str(lock)):
            if not path.exists():
                return None
            try:
                blob = json.loads(path.read_text())
                if blob["engine_version"] != __version__ or blob["key"] != key:
                    return None
                return blob["report"]
            except (ValueError, KeyError, TypeError):
                warn(f"ignoring corrupted cache file {path}")
                return None

    def put(self, key: str, report: dict) -> None:
        if self.dir is None:
            return
        from filelock import FileLock
        path, lock = self._paths(key)
        try:
            with FileLock(str(lock)):
                tmp = path.with_suffix(".tmp")
                tmp.write_text(json.dumps({"engine_version": __version__, "key": key,
                                           "report": jsonable(report)}, sort_keys=True))
                tmp.replace(path)
        except OSError as exc:
            warn(f"could not write cache ({exc})")


def warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


# -- helpers ---------------------------------------------------------------------------------

def _normalized(form):
    """Scale so the first coefficient (in key order) is 1."""
    if not form.terms:
        return form
    first = min(form.terms, key=repr)
    return form.scale(1 / form.terms[first])


def cochain_text(Y) -> str:
    from .diffops import cochain_eta_terms, format_cochain_terms
    return format_cochain_terms(cochain_eta_terms(_normalized(Y.form)))


def _report(command: str, params: dict, result: dict, verified: bool, truncation=None) -> dict:
    out = {"command": command, "params": params, "result": result, "verified": bool(verified),
           "engine_version": __version__}
    if truncation is not None:
        out["truncation"] = truncation
    return out


# -- commands -----------------------------------------------------------------------------------

def cmd_verify_bracket(a) -> dict:
    from . import forms as F
    from .contact import contact_bracket, generators
    gens = generators(a.n, a.dmax)
    bad = None
    for X in gens:
        for Y in gens:
            L = F.compose(F.field_operator(X.form(), X.parity), F.field_operator(Y.form(), Y.parity))
            R = F.compose(F.field_operator(Y.form(), Y.parity), F.field_operator(X.form(), X.parity))
            comm = L + R if (X.parity & Y.parity) else L - R
            b = contact_bracket(X.generator, Y.generator)
            ok = comm == F.field_operator(F.Form.from_poly(b), (X.parity + Y.parity) & 1)
            if not ok:
                bad = [repr(X), repr(Y)]
                break
        if bad:
            break
    return _report("verify-bracket", {"n": a.n, "dmax": a.dmax},
                   {"pairs": len(gens) ** 2 if bad is None else None, "witness": bad}, bad is None)


def cmd_verify_action(a) -> dict:
    from . import forms as F
    from .contact import contact_bracket, generators
    gens = generators(a.n, a.dmax)
    lam = a.lam
    bad = None
    for X in gens:
        for Y in gens:
            LX = F.field_operator(X.form(), X.parity, lam)
            LY = F.field_operator(Y.form(), Y.parity, lam)
            comm = F.compose(LX, LY) - F.compose(LY, LX).scale(-1 if X.parity & Y.parity else 1)
            b = F.Form.from_poly(contact_bracket(X.generator, Y.generator))
            if comm != F.field_operator(b, (X.parity + Y.parity) & 1, lam):
                bad = [repr(X), repr(Y)]
                break
        if bad:
            break
    return _report("verify-action", {"n": a.n, "lambda": lam, "dmax": a.dmax},
                   {"witness": bad}, bad is None)


def cmd_verify_poisson(a) -> dict:
    from .invariants import verify_poisson_laws
    ws = [Fraction(0), Fraction(1, 2), Fraction(-1, 3)]
    r = verify_poisson_laws(a.n, ws, dmax=a.dmax if a.dmax is not None else 1)
    wit = None if r.ok else [str(x) for x in r.witness]
    return _report("verify-poisson", {"n": a.n, "weights": ws}, {"checked": r.checked, "witness": wit}, r.ok)


def cmd_catalog(a) -> dict:
    from .diffops import format_binary
    from .invariants import catalog, catalog_names, is_invariant
    if a.lam is None or a.mu is None or a.nu is None:
        return _report("catalog", {"n": a.n}, {"names": catalog_names(a.n)}, True)
    entries = []
    ok = True
    for e in catalog(a.n, a.lam, a.mu, a.nu):
        inv = bool(is_invariant(e, a.dmax))
        ok &= inv
        entries.append({"name": e.name, "operator": format_binary(e.operator()),
                        "provenance": e.provenance, "invariant": inv})
    return _report("catalog", {"n": a.n, "lambda": a.lam, "mu": a.mu, "nu": a.nu, "dmax": a.dmax},
                   {"entries": entries}, ok)


def cmd_search(a) -> dict:
    from .diffops import format_binary
    from .invariants import SearchConfig, search_invariant
    r = search_invariant(a.n, a.lam, a.mu, a.nu, config=SearchConfig(max_order=a.max_order))
    basis = [format_binary(op) for op in sorted(r.operators(), key=format_binary)]
    return _report("search-invariant",
                   {"n": a.n, "lambda": a.lam, "mu": a.mu, "nu": a.nu, "max_order": a.max_order},
                   {"dim": r.dim, "basis": basis, "ansatz_size": r.ansatz_size}, r.verified,
                   {"max_order": a.max_order, "generator_dmax": 5})


def cmd_list_cocycles(a) -> dict:
    from .cocycles import catalog_entries
    rows = [{"name": c.name, "n": c.n, "mu_minus_lambda": c.shift, "provenance": c.provenance}
            for c in catalog_entries(a.n)]
    return _report("list-cocycles", {"n": a.n}, {"cocycles": rows}, True)


def cmd_verify_cocycle(a) -> dict:
    from .cocycles import entry, is_cocycle
    from .grassmann import format_poly
    try:
        ent = entry(a.name)
    except KeyError:
        raise UsageError(f"unknown cocycle {a.name!r}; see list-cocycles")
    if not ent.condition(a.lam):
        raise UsageError(f"{a.name} does not apply at lambda = {a.lam}")
    Y = ent.build(a.lam)
    r = is_cocycle(Y, a.dmax)
    wit = None
    if not r.ok:
        g, h = r.witness
        wit = [format_poly(g), format_poly(h) if h is not None else None]
    return _report("verify-cocycle", {"name": a.name, "lambda": a.lam, "dmax": a.dmax},
                   {"cocycle": r.ok, "cochain": cochain_text(Y), "parity": Y.parity, "witness": wit},
                   r.ok, {"max_order": None, "generator_dmax": a.dmax})


def _h1_payload(rep, dmax) -> dict:
    from .cocycles import is_cocycle, match_report
    match_report(rep)
    verified = all(is_cocycle(Y, dmax) for Y in rep.representatives)
    result = {"z_dim": rep.cocycle_space_dim, "b_dim": rep.coboundary_space_dim,
              "h1_dim": rep.h1_dim, "representatives": [cochain_text(Y) for Y in rep.representatives],
              "matched": rep.matched}
    return result, verified


def cmd_h1(a, relative: Optional[int] = None) -> dict:
    from .cohomology import h1_dim, relative_h1_dim
    i = relative if relative is not None else a.relative
    if i is not None:
        rep = relative_h1_dim(a.n, i, a.lam, a.mu, a.max_order, dmax=a.dmax)
        cmd = "relative-h1"
    else:
        rep = h1_dim(a.n, a.lam, a.mu, a.max_order, dmax=a.dmax)
        cmd = "h1-dim"
    result, verified = _h1_payload(rep, a.dmax)
    params = {"n": a.n, "lambda": a.lam, "mu": a.mu, "max_order": a.max_order}
    if i is not None:
        params["relative"] = i
    return _report(cmd, params, result, verified, {"max_order": a.max_order, "generator_dmax": a.dmax})


def cmd_relative(a) -> dict:
    if a.relative is None:
        raise UsageError("relative-h1 needs --relative I")
    return cmd_h1(a, a.relative)


GRID = [Fraction(x) for x in ("-3/2", "-1", "-1/2", "-1/3", "0", "1/4", "1")]
OFFSETS = [Fraction(x) for x in ("-1/2", "0", "1/2", "1", "3/2", "2")]
H1_TABLE = {
    2: ([0, 1, 2], ["1/2", "3/2", "5/2", "3"], {0: 2, 1: 1, 2: 2}),
    3: ([0, "1/2", "3/2"], ["-1/2", 1, 2, "5/2"], {}),
    4: ([0, 1], ["1/2", "3/2", 2], {}),
    5: ([0], ["1/2", 1], {}),
}
H1_LAMBDAS = [Fraction(1, 3), Fraction(-2, 5)]


def invariant_grid(n: int) -> dict:
    from .invariants import expected_dim, search_invariant
    rows, ok = [], True
    for lam in GRID:
        for mu in GRID:
            for off in OFFSETS:
                nu = lam + mu + off
                r = search_invariant(n, lam, mu, nu)
                exp = expected_dim(n, lam, mu, nu)
                good = r.dim == exp and r.verified
                ok &= good
                rows.append({"lambda": lam, "mu": mu, "nu": nu, "dim": r.dim, "expected": exp, "pass": good})
    return {"points": rows, "all_pass": ok}


def h1_table(n: int, max_order: Optional[Fraction] = None) -> dict:
    from .cohomology import h1_dim
    mo = max_order if max_order is not None else Fraction(5 if n <= 3 else 4)
    ones, zeros, special = H1_TABLE[n]
    rows, ok = [], True
    for shift, exp_default in [(Fraction(s), 1) for s in ones] + [(Fraction(s), 0) for s in zeros]:
        exp = special.get(shift, exp_default)
        for lam in H1_LAMBDAS:
            rep = h1_dim(n, lam, lam + shift, mo)
            good = rep.h1_dim == exp
            ok &= good
            rows.append({"lambda": lam, "mu": lam + shift, "h1_dim": rep.h1_dim,
                         "z_dim": rep.cocycle_space_dim, "b_dim": rep.coboundary_space_dim,
                         "expected": exp, "pass": good})
    return {"points": rows, "all_pass": ok, "max_order": mo}


def cmd_report(a) -> dict:
    if a.kind == "invariants":
        if a.n < 2:
            raise UsageError("the invariant grid needs n >= 2")
        res = invariant_grid(a.n)
        trunc = {"max_order": None, "generator_dmax": 5}
    else:
        if a.n not in H1_TABLE:
            raise UsageError(f"no H^1 table for n = {a.n}")
        res = h1_table(a.n, a.max_order)
        trunc = {"max_order": res["max_order"], "generator_dmax": 3}
    return _report("report", {"kind": a.kind, "n": a.n, "max_order": a.max_order}, res, res["all_pass"], trunc)


COMMANDS: Dict[str, Callable] = {
    "verify-bracket": cmd_verify_bracket,
    "verify-action": cmd_verify_action,
    "verify-poisson": cmd_verify_poisson,
    "catalog": cmd_catalog,
    "search-invariant": cmd_search,
    "list-cocycles": cmd_list_cocycles,
    "verify-cocycle": cmd_verify_cocycle,
    "h1-dim": lambda a: cmd_h1(a),
    "relative-h1": cmd_relative,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supercontact",
                                description="Invariant operators and H^1 of contact superalgebras K(n).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n=True, n_required=True):
        if n:
            sp.add_argument("--n", type=natural, required=n_required)
        sp.add_argument("--json", action="store_true", help="print the canonical JSON report")
        sp.add_argument("--out", metavar="FILE", help="also write the JSON report to FILE")
        sp.add_argument("--cache-dir", metavar="DIR", help=f"report cache (default ${CACHE_ENV})")

    sp = sub.add_parser("verify-bracket", help="[X_F, X_G] = X_{F,G} on generators(n, dmax)")
    common(sp)
    sp.add_argument("--dmax", type=natural, default=2)
    sp = sub.add_parser("verify-action", help="[L_F, L_G] = L_{F,G} on weighted densities")
    common(sp)
    sp.add_argument("--lambda", dest="lam", type=rational, required=True)
    sp.add_argument("--dmax", type=natural, default=2)
    sp = sub.add_parser("verify-poisson", help="Jacobi and Leibniz for the Poisson bracket")
    common(sp)
    sp.add_argument("--dmax", type=natural, default=None)
    sp = sub.add_parser("catalog", help="catalog of invariant binary operators")
    common(sp)
    sp.add_argument("--lambda", dest="lam", type=rational)
    sp.add_argument("--mu", type=rational)
    sp.add_argument("--nu", type=rational)
    sp.add_argument("--dmax", type=natural, default=3)
    sp = sub.add_parser("search-invariant", help="basis of invariant operators F_lam x F_mu -> F_nu")
    common(sp)
    sp.add_argument("--lambda", dest="lam", type=rational, required=True)
    sp.add_argument("--mu", type=rational, required=True)
    sp.add_argument("--nu", type=rational, required=True)
    sp.add_argument("--max-order", type=rational, default=None)
    sp = sub.add_parser("list-cocycles", help="names of the explicit cocycles")
    common(sp, n_required=False)
    sp = sub.add_parser("verify-cocycle", help="check a catalog cocycle exactly")
    common(sp, n=False)
    sp.add_argument("--name", required=True)
    sp.add_argument("--lambda", dest="lam", type=rational, required=True)
    sp.add_argument("--dmax", type=natural, default=3)
    for name, text in (("h1-dim", "dimension of H^1 at bounded operator order"),
                       ("relative-h1", "H^1 of cochains vanishing on the fields avoiding theta_I")):
        sp = sub.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--lambda", dest="lam", type=rational, required=True)
        sp.add_argument("--mu", type=rational, required=True)
        sp.add_argument("--max-order", type=rational, default=None)
        sp.add_argument("--relative", type=natural, default=None, metavar="I")
        sp.add_argument("--dmax", type=natural, default=3)
    sp = sub.add_parser("report", help="acceptance tables: invariant grid or H^1 table")
    common(sp)
    sp.add_argument("--kind", choices=("invariants", "h1"), required=True)
    sp.add_argument("--max-order", type=rational, default=None)
    return p


def _cache_key(a) -> str:
    params = {k: v for k, v in sorted(vars(a).items()) if k not in ("json", "out", "cache_dir")}
    return canonical(params)


def human(report: dict) -> str:
    lines = [f"{report['command']}: {'ok' if report['verified'] else 'FAILED'}"]
    for k, v in sorted(jsonable(report["result"]).items()):
        if isinstance(v, list) and v and isinstance(v[0], (dict, str)):
            lines.append(f"  {k}:")
            for item in v:
                lines.append(f"    {json.dumps(item, sort_keys=True) if isinstance(item, dict) else item}")
        else:
            lines.append(f"  {k}: {v}")
    if "truncation" in report:
        lines.append(f"  truncation: {jsonable(report['truncation'])}")
    return "\n".join(lines)


_VALUE_FLAGS = {"--lambda", "--mu", "--nu", "--max-order"}


def _glue_negatives(argv: List[str]) -> List[str]:
    """argparse reads "-1/2" as a flag; glue such values onto their option."""
    out, i = [], 0
    while i < len(argv):
        t = argv[i]
        if t in _VALUE_FLAGS and i + 1 < len(argv) and _RAT.match(argv[i + 1]):
            out.append(f"{t}={argv[i + 1]}")
            i += 2
            continue
        out.append(t)
        i += 1
    return out


def run(argv: List[str]) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(_glue_negatives(list(argv)))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    if getattr(a, "n", None) is not None and a.n < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2
    cache = Cache(a.cache_dir or os.environ.get(CACHE_ENV)) if a.command in CACHED else Cache(None)
    key = _cache_key(a)
    report = cache.get(key)
    if report is not None:
        print("cache: hit", file=sys.stderr)
    else:
        try:
            report = jsonable(COMMANDS[a.command](a))
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            parser.print_usage(sys.stderr)
            return 2
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        cache.put(key, report)
    text = canonical(report)
    if a.out:
        Path(a.out).write_text(text + "\n")
    print(text if a.json else human(report))
    return 0 if report["verified"] else 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
