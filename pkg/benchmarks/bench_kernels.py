"""Compiled vs pure-Python polynomial kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the raw term-dict kernels on random polynomials, then the full
corpus run in a subprocess under each backend (``VBKIT_PURE=1`` forces
the fallback).
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from vbkit import _kernels_py

try:
    from vbkit import _kernels
except ImportError:
    _kernels = None

VARS = ("l", "x", "y", "z", "w")


def random_terms(rng: random.Random, n: int, degree: int) -> dict:
    out = {}
    for _ in range(n):
        exps = {v: rng.randint(0, degree) for v in rng.sample(VARS, rng.randint(1, 3))}
        mono = tuple(sorted((v, e) for v, e in exps.items() if e))
        out[mono] = out.get(mono, 0) + Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    return {m: c for m, c in out.items() if c}


def bench_module(mod, pairs, repeat: int) -> dict:
    res = {}
    for name, fn in (("mul_terms", lambda: [mod.mul_terms(a, b) for a, b in pairs]),
                     ("add_terms", lambda: [mod.add_terms(a, b, -1) for a, b in pairs]),
                     ("scale_terms", lambda: [mod.scale_terms(a, Fraction(3, 7)) for a, _ in pairs])):
        res[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    return res


def corpus_seconds(pure: bool) -> float:
    env = dict(os.environ)
    env.pop("VBKIT_PURE", None)
    if pure:
        env["VBKIT_PURE"] = "1"
    code = ("import time, sys; from vbkit.cli import main; t = time.perf_counter(); "
            "rc = main(['check', '--corpus', '--emit', 'json']); "
            "sys.stderr.write(repr(time.perf_counter() - t)); sys.exit(rc)")
    p = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    if p.returncode != 0:
        raise SystemExit(f"corpus run failed (pure={pure}):\n{p.stdout[-2000:]}")
    return float(p.stderr.strip().splitlines()[-1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ns = ap.parse_args(argv)
    rng = random.Random(ns.seed)
    pairs = [(random_terms(rng, 12, 3), random_terms(rng, 12, 3)) for _ in range(ns.pairs)]

    # both backends must agree before timing means anything
    if _kernels is not None:
        for a, b in pairs[:50]:
            assert _kernels.mul_terms(a, b) == _kernels_py.mul_terms(a, b)
            assert _kernels.add_terms(a, b, -1) == _kernels_py.add_terms(a, b, -1)

    py = bench_module(_kernels_py, pairs, ns.repeat)
    print(f"{'kernel':<14}{'python (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    if _kernels is None:
        for k, v in py.items():
            print(f"{k:<14}{v:>12.4f}{'n/a':>14}{'':>10}")
        print("compiled kernels not built; only the fallback was timed")
    else:
        cy = bench_module(_kernels, pairs, ns.repeat)
        for k in py:
            print(f"{k:<14}{py[k]:>12.4f}{cy[k]:>14.4f}{py[k] / cy[k]:>9.2f}x")
    pure = corpus_seconds(True)
    line = f"{'corpus run':<14}{pure:>12.3f}"
    if _kernels is not None:
        comp = corpus_seconds(False)
        line += f"{comp:>14.3f}{pure / comp:>9.2f}x"
    print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
