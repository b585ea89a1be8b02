from hypothesis import given, strategies as st

from vbkit import names

ident = st.from_regex(r"[a-z][a-z0-9]{0,4}(_[tsv])?", fullmatch=True)


@given(ident)
def test_dual_is_an_involution(n):
    assert names.dual(names.dual(n)) == n
    assert names.dual(n) != n


@given(ident)
def test_flip_dots_is_an_involution(n):
    for m in (n, names.dot(names.dot(n, "t"), "v"), names.dot(names.dot(n, "v"), "t")):
        assert names.flip_dots(names.flip_dots(m)) == m


def test_flip_dots_swaps_only_double_decorations():
    assert names.flip_dots("x_t_v") == "x_v_t"
    assert names.flip_dots("x_v_t") == "x_t_v"
    assert names.flip_dots("x_t") == "x_t"


@given(st.lists(ident, max_size=6))
def test_free_tag_avoids_collisions(coords):
    tag = names.free_tag(coords)
    assert tag.startswith("t")
    assert not any(names.dot(c, tag) in coords for c in coords)


def test_free_tag_lengthens_on_clash():
    assert names.free_tag(["x", "y"]) == "t"
    assert names.free_tag(["x", "x_t"]) == "t_"
    assert names.copy("p", 1) == "p" and names.copy("p", 2) == "p__2"
