"""Command-line front end.

Subcommands: ``gallery``, ``check``, ``gamma``, ``levelset``, ``sample``,
``report``.  The seed comes from --seed, else the LCP_SEED environment
variable, else 0; every run is deterministic given its flags.  Exit codes:
0 success, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bodies, bounds, gallery
from .estimation import SamplerConfig
from .measures import measure_from_json
from .perimeter import gamma_search, gamma_search_1d


class UsageError(Exception):
    pass


def _atomic_write(path: str, text: str):
    p = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(p.parent) or ".", prefix=p.name + ".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _resolve_seed(args, env) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    raw = env.get("LCP_SEED")
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise UsageError(f"LCP_SEED must be an integer, got {raw!r}")
    return 0


def _resolve_measure(spec: str, n: int | None):
    if spec.startswith("gallery:"):
        name = spec.split(":", 1)[1]
        if n is None:
            raise UsageError("--n is required with gallery measures")
        entry = gallery.gallery_measure(name, n)
        return entry.measure, entry.name
    try:
        doc = json.loads(spec)
    except json.JSONDecodeError as e:
        raise UsageError(f"measure is neither gallery:<name> nor valid JSON: {e}")
    mu = measure_from_json(doc)
    return mu, doc.get("type", "measure")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_gallery(args, env) -> int:
    if args.action == "list":
        for name in gallery.gallery_names():
            print(name)
        return 0
    entry = gallery.gallery_measure(args.name, args.n)
    doc = {"name": entry.name, "meta": entry.meta, "notes": entry.notes}
    if entry.measure is not None:
        doc["measure"] = entry.measure.to_json()
    if entry.body is not None:
        doc["body"] = entry.body.to_json()
    text = _json_text(doc)
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args, env) -> int:
    if args.suite == "default":
        config = bounds.SuiteConfig()
    else:
        with open(args.suite) as f:
            config = bounds.SuiteConfig.from_json(json.load(f))
    config.seed = _resolve_seed(args, env)
    if args.samples is not None:
        config.samples = args.samples
    if args.threads is not None:
        config.threads = args.threads
    if args.corrupt_rhs is not None:
        config.corrupt_rhs = args.corrupt_rhs
    reports, summary = bounds.run_suite(config)
    doc = {
        "suite": config.name,
        "seed": config.seed,
        "samples": config.samples,
        "summary": summary,
        "reports": [r.to_dict() for r in reports],
    }
    if args.out:
        _atomic_write(args.out, _json_text(doc))
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(bounds.CSV_COLUMNS)
        for r in reports:
            w.writerow(r.csv_row())
        _atomic_write(args.csv, buf.getvalue())
    for verdict in ("PASS", "PASS_WITHIN_MARGIN", "FALSIFICATION_ONLY_PASS", "SKIPPED", "FAIL"):
        if summary.get(verdict):
            print(f"{verdict:>24}: {summary[verdict]}")
    print(f"{'total':>24}: {summary['total']}")
    fails = [r for r in reports if r.verdict == bounds.FAIL]
    for r in fails[:50]:
        print(
            f"FAIL {r.check_id} n={r.n} measure={r.measure} body={r.body} "
            f"lhs={_fmt(r.lhs)} rhs={_fmt(r.rhs)} margin={_fmt(r.margin)}"
        )
    return 1 if fails else 0


def cmd_gamma(args, env) -> int:
    seed = _resolve_seed(args, env)
    mu, name = _resolve_measure(args.measure, args.n)
    cfg = SamplerConfig(seed=seed, samples=args.samples or 100_000)
    if mu.dim == 1 and args.family == "intervals":
        from .measures import ProductMeasure

        factor = mu.factors[0] if isinstance(mu, ProductMeasure) else None
        if factor is None:
            raise UsageError("interval search needs a product measure with one factor")
        best, iv = gamma_search_1d(factor)
        doc = {"measure": name, "gamma_lower": best, "interval": list(iv), "stderr": 0.0}
        text = _json_text(doc)
        sys.stdout.write(text)
        if args.out:
            _atomic_write(args.out, text)
        return 0
    families = tuple(args.family.split(",")) if args.family else ("level_dilates", "slabs", "gallery", "random")
    best, body, bname, trace = gamma_search(mu, families=families, cfg=cfg)
    if best is None:
        raise UsageError("no candidate body could be evaluated")
    doc = {
        "measure": name,
        "gamma_lower": best.value,
        "stderr": best.stderr,
        "samples": best.samples,
        "seed": seed,
        "body_name": bname,
        "body": body.to_json(),
    }
    text = _json_text(doc)
    sys.stdout.write(text)
    if args.out:
        _atomic_write(args.out, text)
    if args.trace_csv:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["candidate", "perimeter", "stderr"])
        for row in trace:
            w.writerow([row[0], repr(row[1]), repr(row[2])])
        _atomic_write(args.trace_csv, buf.getvalue())
    return 0


def cmd_levelset(args, env) -> int:
    mu, name = _resolve_measure(args.measure, args.n)
    ls = mu.level_set(args.t)
    doc = {"measure": name, "t": args.t, "explicit": ls.explicit}
    if ls.explicit:
        doc["body"] = ls.body.to_json()
    text = _json_text(doc)
    sys.stdout.write(text)
    if args.out:
        _atomic_write(args.out, text)
    return 0


def cmd_sample(args, env) -> int:
    from .estimation import draw_samples

    seed = _resolve_seed(args, env)
    mu, _ = _resolve_measure(args.measure, args.n)
    X = draw_samples(mu, SamplerConfig(seed=seed, samples=args.samples or 1000))
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([f"x{i}" for i in range(mu.dim)])
    for row in X:
        w.writerow([repr(float(v)) for v in row])
    if args.out:
        _atomic_write(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


_GAMMA_EVIDENCE_CHECKS = (
    "symmetric_gamma",
    "general_gamma_envelope",
    "unconditional_gamma",
    "product_gamma",
    "perimeter_inradius",
    "perimeter_incenter",
)


def cmd_report(args, env) -> int:
    with open(args.report) as f:
        doc = json.load(f)
    if not isinstance(doc, dict) or "reports" not in doc:
        raise UsageError("not a suite report file (missing 'reports')")
    records = doc["reports"]
    cols = ["check_id", "n", "measure", "body", "lhs", "rhs", "slack", "margin", "verdict"]
    widths = {c: len(c) for c in cols}
    rows = []
    for r in sorted(records, key=lambda r: (r["check_id"], r["n"], r["measure"], r["body"])):
        row = {
            c: (_fmt(r[c]) if isinstance(r[c], float) else str(r[c]))
            for c in cols
        }
        rows.append(row)
        for c in cols:
            widths[c] = max(widths[c], len(row[c]))
    header = "  ".join(c.ljust(widths[c]) for c in cols)
    print(header)
    print("-" * len(header))
    for row in rows:
        print("  ".join(row[c].ljust(widths[c]) for c in cols))
    verdicts = {}
    for r in records:
        verdicts[r["verdict"]] = verdicts.get(r["verdict"], 0) + 1
    print("summary: " + ", ".join(f"{k}={v}" for k, v in sorted(verdicts.items())))

    if args.csv:
        dims = sorted(
            {
                r["n"]
                for r in records
                if r["check_id"] in _GAMMA_EVIDENCE_CHECKS and math.isfinite(r["lhs"])
            }
        )
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "gamma_lower", "cube_gamma", "sqrt2_n", "two_n", "four_n", "main_envelope"])
        for n in dims:
            evidence = [
                r["lhs"]
                for r in records
                if r["n"] == n and r["check_id"] in _GAMMA_EVIDENCE_CHECKS and math.isfinite(r["lhs"])
            ]
            glow = max(evidence) if evidence else float("nan")
            w.writerow(
                [
                    n,
                    repr(glow),
                    repr(n / math.sqrt(3.0)),
                    repr(math.sqrt(2.0) * n),
                    repr(2.0 * n),
                    repr(4.0 * n),
                    repr(14.0 * n ** 1.5),
                ]
            )
        _atomic_write(args.csv, buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="lcperim", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p, with_samples=True):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (wins over LCP_SEED)")
        if with_samples:
            p.add_argument("--samples", type=int, default=None)
        p.add_argument("--out", default=None, help="write JSON output to this path")

    g = sub.add_parser("gallery", help="list or dump the named constructions")
    g.add_argument("action", choices=["list", "dump"])
    g.add_argument("name", nargs="?", default=None)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=cmd_gallery)

    c = sub.add_parser("check", help="run a verification suite")
    c.add_argument("--suite", default="default", help="'default' or a JSON config path")
    add_common(c)
    c.add_argument("--csv", default=None, help="write a CSV of the reports")
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--corrupt-rhs", type=float, default=None, dest="corrupt_rhs",
                   help="harness self-test: scale every bound by this factor")
    c.set_defaults(fn=cmd_check)

    m = sub.add_parser("gamma", help="search for the maximal perimeter")
    m.add_argument("--measure", required=True, help="gallery:<name> or measure JSON")
    m.add_argument("--n", type=int, default=None)
    m.add_argument("--family", default=None, help="comma list: level_dilates,slabs,gallery,random,intervals")
    add_common(m)
    m.add_argument("--trace-csv", default=None, dest="trace_csv")
    m.set_defaults(fn=cmd_gamma)

    l = sub.add_parser("levelset", help="describe a super-level set")
    l.add_argument("--measure", required=True)
    l.add_argument("--n", type=int, default=None)
    l.add_argument("--t", type=float, required=True)
    l.add_argument("--out", default=None)
    l.set_defaults(fn=cmd_levelset)

    s = sub.add_parser("sample", help="draw samples as CSV")
    s.add_argument("--measure", required=True)
    s.add_argument("--n", type=int, default=None)
    add_common(s)
    s.set_defaults(fn=cmd_sample)

    r = sub.add_parser("report", help="render a report file as a table and envelope CSV")
    r.add_argument("report")
    r.add_argument("--csv", default=None, help="plot-data CSV: dimension vs bound envelopes")
    r.set_defaults(fn=cmd_report)
    return top


def main(argv=None, env=None) -> int:
    env = dict(os.environ) if env is None else env
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args, env)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
