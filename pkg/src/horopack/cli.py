"""Command-line interface: ``horopack {list,validate,density,verify}``.

Exit codes: 0 all OK, 1 mismatch, 2 usage error or unknown symbol,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .catalog import load_catalog, validate_simplex
from .errors import (HoroError, InvalidConfiguration, ParseError, UnknownSymbol,
                     ValidationError)
from .packing import VerificationRow, optimize, verify_all
from .volume import decomposition_check, DECOMPOSITIONS, quadrature_volume

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
ORACLE_TOL = 1e-5
REPORT_FIELDS = ("witt", "class", "n_ideal", "density", "paper_density",
                 "residual", "status", "ratios")


@dataclass(frozen=True)
class ReportRow:
    witt: str
    cls: str
    n_ideal: int
    density: float
    paper_density: float
    residual: float
    ratios: tuple
    status: str

    @classmethod
    def from_verification(cls, row: VerificationRow) -> "ReportRow":
        return cls(row.key, row.commensurability_class, row.n_ideal, row.density,
                   row.paper_density, row.residual, format_ratios(row.ratios),
                   row.status)

    def cells(self) -> dict:
        return {"witt": self.witt, "class": self.cls, "n_ideal": str(self.n_ideal),
                "density": fmt_density(self.density),
                "paper_density": fmt_density(self.paper_density),
                "residual": fmt_residual(self.residual),
                "status": self.status, "ratios": "|".join(self.ratios)}

    def as_json(self) -> dict:
        return {"witt": self.witt, "class": self.cls, "n_ideal": self.n_ideal,
                "density": float(fmt_density(self.density)),
                "paper_density": self.paper_density,
                "residual": float(fmt_residual(self.residual)),
                "ratios": list(self.ratios), "status": self.status}


def fmt_density(x: float) -> str:
    return f"{x:.9g}"


def fmt_residual(x: float) -> str:
    return f"{x:.3e}"


def format_ratios(ratios, max_denominator: int = 48, tol: float = 1e-9) -> tuple:
    """Ratios in vertex order: slash fractions if all are exact, else decimals."""
    vals = [ratios[i] for i in sorted(ratios)]
    fracs = [Fraction(v).limit_denominator(max_denominator) for v in vals]
    if all(abs(float(f) - v) <= tol for f, v in zip(fracs, vals)):
        return tuple(f"{f.numerator}/{f.denominator}" for f in fracs)
    return tuple(fmt_density(v) for v in vals)


def _render(rows: list, fields: tuple, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows({k: r[k] for k in fields} for r in rows)
        return buf.getvalue()
    widths = {f: max(len(f), *(len(str(r[f])) for r in rows)) if rows else len(f)
              for f in fields}
    buf.write("  ".join(f.ljust(widths[f]) for f in fields).rstrip() + "\n")
    for r in rows:
        buf.write("  ".join(str(r[f]).ljust(widths[f]) for f in fields).rstrip() + "\n")
    return buf.getvalue()


# -- subcommands ------------------------------------------------------------

def cmd_list(args, out) -> int:
    cat = load_catalog(args.catalog)
    if args.format == "json":
        out.write(cat.to_json() + "\n")
        return EXIT_OK
    fields = ("witt", "symbol", "schlafli", "class", "n_ideal", "volume", "volume_value")
    rows = [{"witt": s.key, "symbol": s.witt, "schlafli": s.schlafli,
             "class": s.commensurability_class, "n_ideal": s.n_ideal,
             "volume": str(s.volume), "volume_value": f"{s.volume.evaluate():.9g}"}
            for s in cat]
    out.write(_render(rows, fields, args.format))
    return EXIT_OK


def cmd_validate(args, out) -> int:
    cat = load_catalog(args.catalog, validate=False)
    rows, bad = [], False
    for s in cat:
        rep = validate_simplex(s)
        fails = [c.name for c in rep.failures()]
        warns = [c.detail or c.name for c in rep.warnings]
        bad |= bool(fails)
        rows.append({"witt": s.key,
                     "status": "FAIL" if fails else ("WARN" if warns else "OK"),
                     "failed": ";".join(fails), "warnings": ";".join(warns)})
    out.write(_render(rows, ("witt", "status", "failed", "warnings"), args.format))
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_density(args, out) -> int:
    cat = load_catalog(args.catalog)
    s = cat.get(args.witt)
    res = optimize(s, n_samples=args.samples, seed=args.seed, jobs=args.jobs)
    residual = abs(res.density - s.reference.density)
    status = "OK" if residual <= args.tolerance else "MISMATCH"
    if res.falsification is not None and not res.falsification.ok:
        status = "MISMATCH"
    row = ReportRow(s.key, s.commensurability_class, s.n_ideal, res.density,
                    s.reference.density, residual, format_ratios(res.ratios), status)
    if args.format == "table":
        lines = [("witt", s.key), ("symbol", s.witt),
                 ("density", fmt_density(res.density)),
                 ("paper_density", fmt_density(s.reference.density)),
                 ("residual", fmt_residual(residual)),
                 ("ratios", "|".join(row.ratios)),
                 ("anchor", str(res.anchor)),
                 ("s", " ".join(f"{i}:{v + 0.0:.9g}" for i, v in res.s.items())),
                 ("pieces", " ".join(f"{i}:{v:.9g}" for i, v in res.piece_volumes.items())),
                 ("maximizers", " ".join(str(m.anchor) for m in res.maximizers)),
                 ("status", status)]
        w = max(len(k) for k, _ in lines)
        out.write("".join(f"{k.ljust(w)}  {v}\n" for k, v in lines))
    elif args.format == "json":
        d = row.as_json()
        d.update(anchor=res.anchor,
                 s={str(i): v for i, v in res.s.items()},
                 pieces={str(i): v for i, v in res.piece_volumes.items()})
        out.write(json.dumps(d, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(_render([row.cells()], REPORT_FIELDS, "csv"))
    return EXIT_OK if status == "OK" else EXIT_MISMATCH


def _oracle_rows(cat) -> tuple:
    rows, ok = [], True
    for s in cat:
        q = quadrature_volume(s)
        target = s.volume.evaluate()
        r = abs(q.volume - target)
        ok &= r < ORACLE_TOL
        rows.append({"witt": s.key, "closed_form": f"{target:.9g}",
                     "quadrature": f"{q.volume:.9g}", "residual": fmt_residual(r),
                     "status": "OK" if r < ORACLE_TOL else "MISMATCH"})
    for key in DECOMPOSITIONS:
        d = decomposition_check(key, cat)
        ok &= d.ok
        rows.append({"witt": f"{key}:decomposition", "closed_form": f"{d.target:.9g}",
                     "quadrature": f"{d.total:.9g}", "residual": fmt_residual(d.residual),
                     "status": "OK" if d.ok else "MISMATCH"})
    return rows, ok


def cmd_verify(args, out) -> int:
    cat = load_catalog(args.catalog)
    vrows = verify_all(cat, tolerance=args.tolerance, samples=args.samples,
                       seed=args.seed, jobs=args.jobs)
    rows = [ReportRow.from_verification(r) for r in vrows]
    code = EXIT_OK if all(r.status in ("OK", "FLAGGED") for r in rows) else EXIT_MISMATCH
    if args.format == "json":
        doc = {"rows": [r.as_json() for r in rows]}
        if args.oracle == "on":
            orows, ok = _oracle_rows(cat)
            doc["oracle"] = orows
            code = code if ok else EXIT_MISMATCH
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        return code
    out.write(_render([r.cells() for r in rows], REPORT_FIELDS, args.format))
    if args.format == "table":
        for v in vrows:
            if v.note:
                out.write(f"note {v.key}: {v.note}\n")
    if args.oracle == "on":
        orows, ok = _oracle_rows(cat)
        out.write("\n")
        out.write(_render(orows, ("witt", "closed_form", "quadrature", "residual",
                                  "status"), args.format))
        code = code if ok else EXIT_MISMATCH
    return code


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--catalog", default=None, help="catalog JSON to use instead of the built-in one")
    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--tolerance", type=float, default=1e-6)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--samples", type=int, default=10000)
    run.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    p = argparse.ArgumentParser(prog="horopack",
                                description="Optimal horoball packings of Coxeter simplex tilings")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", parents=[common], help="list catalog entries")
    sub.add_parser("validate", parents=[common], help="check catalog geometry")
    d = sub.add_parser("density", parents=[common, run], help="optimal density of one tiling")
    d.add_argument("witt")
    v = sub.add_parser("verify", parents=[common, run], help="verify every tiling")
    v.add_argument("--oracle", choices=("on", "off"), default="off")
    return p


COMMANDS = {"list": cmd_list, "validate": cmd_validate,
            "density": cmd_density, "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1 or getattr(args, "samples", 0) < 0:
        print("horopack: --jobs must be >= 1 and --samples >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UnknownSymbol as exc:
        print(f"horopack: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"horopack: bad catalog: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidConfiguration as exc:
        print(f"horopack: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HoroError as exc:
        print(f"horopack: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
