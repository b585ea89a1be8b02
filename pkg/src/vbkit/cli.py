"""Command line: ``vbkit check`` and ``vbkit build``.

Exit codes: 0 when every expectation is met, 1 on a mismatch, 2 on parse
or internal errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .dsl import CONSTRUCTORS, DSLError, evaluate, parse, print_document
from .dsl.evaluate import kind_of, resolve_args
from .dsl.lexer import Loc
from .report import FAIL, Report

SCHEMA = "vbkit-report/1"
EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


class InternalError(Exception):
    pass


def corpus_files() -> list:
    from .corpus import files

    return files()


# ---------------------------------------------------------------------------
# running checks

_CACHE: dict = {}


def _prepared(text: str):
    if text not in _CACHE:
        doc = parse(text)
        _CACHE.clear()
        _CACHE[text] = (doc, evaluate(doc))
    return _CACHE[text]


def check_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def run_one(text: str, index: int, seed: int, timing: bool = False) -> dict:
    """Run the ``index``-th check of a document; safe to call in a worker."""
    from .checks import CHECKS
    from .poisson import InternalConsistencyError

    doc, env = _prepared(text)
    c = doc.checks[index]
    out = {"index": index, "line": c.loc.line, "check": c.invocation(), "expect": c.expect}
    t0 = time.perf_counter()
    try:
        args = resolve_args(env, c.args, CHECKS[c.kind].kinds, c.kind, c.loc)
        rep = CHECKS[c.kind].fn(args, check_rng(seed, index))
    except InternalConsistencyError as exc:
        out.update({"verdict": "error", "met": False, "error": f"internal inconsistency: {exc}"})
        return out
    except ValueError as exc:
        rep = Report(c.kind)
        rep.fail("construction", type(exc).__name__ + ": " + str(exc), "")
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        out.update({"verdict": "error", "met": False, "error": f"{type(exc).__name__}: {exc}"})
        return out
    js = rep.to_json()
    out.update({"verdict": js["verdict"], "met": js["verdict"] == c.expect,
                "violations": js["violations"], "details": js["details"]})
    if timing:
        out["seconds"] = round(time.perf_counter() - t0, 6)
    return out


def run_text(text: str, seed: int = 0, jobs: int = 1, timing: bool = False) -> list:
    doc, _ = _prepared(text)
    n = len(doc.checks)
    if jobs > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(run_one, [text] * n, range(n), [seed] * n, [timing] * n))
    return [run_one(text, i, seed, timing) for i in range(n)]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=str) if isinstance(x, (set, frozenset)) else items
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _text_result(r: dict) -> list:
    mark = "ok " if r["met"] else "MISMATCH"
    lines = [f"{mark:8} line {r['line']:>3}  {r['check']}: {r['verdict']} (expected {r['expect']})"]
    if "seconds" in r:
        lines[0] += f"  [{r['seconds']:.3f}s]"
    if r.get("error"):
        lines.append(f"           error: {r['error']}")
    if not r["met"] or r["verdict"] == FAIL:
        for v in r.get("violations", [])[:8]:
            rhs = f" != {v['rhs']}" if v["rhs"] else ""
            lines.append(f"           - {v['where']}: {v['lhs']}{rhs}")
        extra = len(r.get("violations", [])) - 8
        if extra > 0:
            lines.append(f"           ... {extra} more")
    return lines


def cmd_check(ns) -> int:
    paths = list(ns.files)
    if ns.corpus:
        paths += [str(p) for p in corpus_files()]
    if not paths:
        print("vbkit check: no input files (give FILE... or --corpus)", file=sys.stderr)
        return EXIT_ERROR
    report = {"schema": SCHEMA, "version": __version__, "seed": ns.seed, "files": []}
    code = EXIT_OK
    text_out = []
    for p in paths:
        entry = {"file": _display(p)}
        try:
            text = Path(p).read_text(encoding="utf-8")
            results = run_text(text, ns.seed, ns.jobs, ns.timing)
        except DSLError as exc:
            entry["error"] = exc.to_json()
            report["files"].append(entry)
            text_out.append(f"{_display(p)}:{exc.loc or Loc(0, 0)}: {exc.kind} error: {exc.message}")
            code = EXIT_ERROR
            continue
        except OSError as exc:
            entry["error"] = {"kind": "io", "message": str(exc)}
            report["files"].append(entry)
            text_out.append(f"{_display(p)}: {exc}")
            code = EXIT_ERROR
            continue
        entry["checks"] = results
        met = sum(r["met"] for r in results)
        entry["met"] = met
        entry["total"] = len(results)
        report["files"].append(entry)
        text_out.append(f"== {_display(p)}: {met}/{len(results)} expectations met")
        for r in results:
            text_out += _text_result(r)
        if any(r["verdict"] == "error" for r in results):
            code = EXIT_ERROR
        elif met != len(results) and code == EXIT_OK:
            code = EXIT_MISMATCH
    total = sum(f.get("total", 0) for f in report["files"])
    met = sum(f.get("met", 0) for f in report["files"])
    report["summary"] = {"checks": total, "met": met, "mismatched": total - met, "exit_code": code}
    if ns.emit == "json":
        sys.stdout.write(dumps(report))
    else:
        text_out.append(f"total: {met}/{total} expectations met, exit {code}")
        print("\n".join(text_out))
    return code


def _display(p) -> str:
    """Corpus files are reported by name only so reports do not depend on the install path."""
    path = Path(p)
    from .corpus import CORPUS_DIR

    try:
        return "corpus/" + str(path.resolve().relative_to(CORPUS_DIR.resolve()))
    except ValueError:
        return str(p)


def cmd_build(ns) -> int:
    from .dsl.ast import Document as Doc, LetDecl, Ref
    from .dsl.emit import declare

    if ns.constructor not in CONSTRUCTORS:
        print(f"vbkit build: unknown constructor {ns.constructor!r}; known: "
              + ", ".join(sorted(CONSTRUCTORS)), file=sys.stderr)
        return EXIT_ERROR
    try:
        text = Path(ns.file).read_text(encoding="utf-8")
        doc = parse(text)
        env = evaluate(doc)
        args = tuple(Ref(a) for a in ns.name.split(","))
        let = LetDecl(ns.output or f"{ns.constructor}_{'_'.join(a.name for a in args)}", ns.constructor, args)
        kinds, fn = CONSTRUCTORS[ns.constructor]
        values = resolve_args(env, let.args, kinds, ns.constructor, Loc(0, 0))
        value = fn(*values)
    except DSLError as exc:
        print(f"{ns.file}:{exc.loc or Loc(0, 0)}: {exc.kind} error: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"vbkit build: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = print_document(Doc(tuple(declare(let.name, value))))
    if ns.emit == "json":
        sys.stdout.write(dumps({"schema": SCHEMA, "version": __version__, "constructor": ns.constructor,
                                "arguments": [a.name for a in args], "kind": kind_of(value),
                                "name": let.name, "dsl": out}))
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_checks(ns) -> int:
    from .checks import CHECKS

    for name in sorted(CHECKS):
        c = CHECKS[name]
        print(f"{name}({', '.join(c.kinds)})  {c.summary}")
    print()
    for name in sorted(CONSTRUCTORS):
        print(f"let X = {name}({', '.join(CONSTRUCTORS[name][0])})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vbkit", description="Exact checks for VB-algebroids, groupoids and friends.")
    p.add_argument("--version", action="version", version=f"vbkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run every check in the given documents")
    c.add_argument("files", nargs="*", metavar="FILE")
    c.add_argument("--corpus", action="store_true", help="also run the shipped fixture corpus")
    c.add_argument("--emit", choices=("text", "json"), default="text")
    c.add_argument("--seed", type=int, default=0, help="seed for sampled verdicts (default 0)")
    c.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    c.add_argument("--timing", action="store_true", help="include per-check wall time")
    c.set_defaults(func=cmd_check)
    b = sub.add_parser("build", help="apply a constructor and print the result as declarations")
    b.add_argument("constructor")
    b.add_argument("name", help="declared name (comma-separated for two arguments)")
    b.add_argument("file")
    b.add_argument("--emit", choices=("text", "json"), default="text")
    b.add_argument("--output", "-o", help="name for the built value")
    b.set_defaults(func=cmd_build)
    k = sub.add_parser("checks", help="list available checks and constructors")
    k.set_defaults(func=cmd_checks)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if getattr(ns, "jobs", 1) < 1:
        print("vbkit: --jobs must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return ns.func(ns)
    except InternalError as exc:
        print(f"vbkit: internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
