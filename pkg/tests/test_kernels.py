"""Both polynomial backends compute the same term dicts."""

import pytest
from hypothesis import given

from oracles import laurent, polys
from vbkit import _kernels_py, scalar

try:
    from vbkit import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def test_backend_reported():
    assert scalar.KERNEL in ("compiled", "python")


@needs_compiled
@given(laurent(), laurent())
def test_mul_agrees(a, b):
    assert _kernels.mul_terms(a.terms, b.terms) == _kernels_py.mul_terms(a.terms, b.terms)


@needs_compiled
@given(polys(), polys())
def test_add_agrees(a, b):
    for sign in (1, -1):
        assert _kernels.add_terms(a.terms, b.terms, sign) == _kernels_py.add_terms(a.terms, b.terms, sign)


@needs_compiled
@given(polys())
def test_scale_agrees(a):
    from fractions import Fraction

    assert _kernels.scale_terms(a.terms, Fraction(-2, 3)) == _kernels_py.scale_terms(a.terms, Fraction(-2, 3))
    assert _kernels.scale_terms(a.terms, 0) == _kernels_py.scale_terms(a.terms, 0) == {}


@needs_compiled
def test_mono_mul_cancels_parameter():
    a = (("l", 2), ("x", 1))
    b = (("l", -2), ("y", 3))
    assert _kernels.mono_mul(a, b) == _kernels_py.mono_mul(a, b) == (("x", 1), ("y", 3))


def test_pure_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    env = dict(os.environ, VBKIT_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import vbkit; print(vbkit.KERNEL)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
