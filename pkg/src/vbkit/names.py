"""Naming conventions for derived coordinates.

* ``dual(n)`` toggles a trailing ``_s`` (linear coordinate on the dual
  bundle); applying it twice returns ``n``.
* ``dot(n, tag)`` appends ``_<tag>``; tangent charts use tag ``t``, a second
  tangent direction uses ``v``.
* ``copy(n, k)`` names the ``k``-th factor of a self-product (``n__2``).
"""

DUAL_SUFFIX = "_s"


def dual(name: str) -> str:
    if name.endswith(DUAL_SUFFIX):
        return name[: -len(DUAL_SUFFIX)]
    return name + DUAL_SUFFIX


def dot(name: str, tag: str = "t") -> str:
    return f"{name}_{tag}"


def free_tag(coords, tag: str = "t") -> str:
    """``tag``, lengthened with underscores until no dotted name collides with ``coords``."""
    taken = set(coords)
    while any(dot(c, tag) in taken for c in taken):
        tag += "_"
    return tag


def copy(name: str, k: int) -> str:
    return name if k == 1 else f"{name}__{k}"


def flip_dots(name: str, a: str = "t", b: str = "v") -> str:
    """Canonical flip on double-tangent names: swap the two last decorations.

    ``n_v_t`` <-> ``n_t_v``; names with a single decoration or none are
    returned unchanged.
    """
    sa, sb = f"_{a}", f"_{b}"
    if name.endswith(sb + sa):
        return name[: -len(sb + sa)] + sa + sb
    if name.endswith(sa + sb):
        return name[: -len(sa + sb)] + sb + sa
    return name
