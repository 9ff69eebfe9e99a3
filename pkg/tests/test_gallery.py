import pytest

from mbca import compare, invariants, wadge_name
from mbca.gallery import ClassSpec, UnsupportedSpec, canonical, gallery_box, parse_class_spec
from mbca.hierarchy import OrdinalW2


def test_parse_class_spec():
    spec = parse_class_spec("E_2^3 C_1^w*1+1")
    assert spec.letter == "E" and spec.m == 2
    assert spec.tail is not None and spec.tail.letter == "C"
    assert spec.render() == "E_2^3 C_1^w*1+1"
    bare = parse_class_spec("E_2^3")
    assert bare.tail is None and bare.render() == "E_2^3 E"


@pytest.mark.parametrize(
    "text",
    ["C_1^1", "C_1^2", "D_1^1", "D_1^3", "E_1^1", "C_2^1", "D_2^2", "E_2^3"],
)
def test_round_trip_finite(text):
    spec = parse_class_spec(text)
    assert wadge_name(canonical(spec)).render() == spec.render()


@pytest.mark.parametrize(
    "text",
    ["C_1^w*1+1", "D_1^w*1+2", "C_2^w*1", "D_2^w*1", "C_2^w*1+1", "C_2^w*2", "E_2^w*1"],
)
def test_round_trip_transfinite(text):
    spec = parse_class_spec(text)
    assert wadge_name(canonical(spec)).render() == spec.render()


@pytest.mark.parametrize("text", ["E_2^1 C_1^1", "E_2^1 D_1^1", "E_2^2 E_1^1", "E_3^1 E_2^1 C_1^1"])
def test_round_trip_composites(text):
    spec = parse_class_spec(text)
    assert wadge_name(canonical(spec)).render() == spec.render()


def test_canonical_c11_equivalent_to_a_all(a_all):
    machine = canonical("C_1^1")
    assert compare(wadge_name(machine), wadge_name(a_all)) == "equivalent"


def test_canonical_d1w1_matches_g_omega_class(g_omega):
    machine = canonical("D_1^w*1+1")
    assert compare(wadge_name(machine), wadge_name(g_omega)) == "equivalent"
    inv = invariants(machine)
    assert (inv.m, inv.n, inv.s) == (1, OrdinalW2(1, 1), -1)


def test_unsupported_specs():
    with pytest.raises(UnsupportedSpec):
        canonical(ClassSpec("C", 5, OrdinalW2(0, 1)))
    with pytest.raises(UnsupportedSpec):
        canonical(ClassSpec("C", 1, OrdinalW2(0, 0)))
    with pytest.raises(UnsupportedSpec):
        canonical(ClassSpec("C", 2, OrdinalW2(0, 1), tail=ClassSpec("C", 1, OrdinalW2(0, 1))))
    # m = 1 limit lengths denote empty classes: the feeding pump always
    # prefixes the omega unit, pushing n to w*p + 1 at least
    for text in ["C_1^w*1", "D_1^w*1", "E_1^w*1", "C_1^w*2"]:
        with pytest.raises(UnsupportedSpec):
            canonical(text)


def test_monotone_gallery_ordering():
    specs = ["C_1^1", "C_1^2", "D_1^w*1+1", "C_2^1", "C_2^w*1", "C_2^w*1+1"]
    names = [wadge_name(canonical(s)) for s in specs]
    for i in range(len(names) - 1):
        assert compare(names[i], names[i + 1]) == "less", (specs[i], specs[i + 1])


def test_gallery_box_skips_empty_classes():
    box = gallery_box(max_m=2, alphas=(1, 2, "w", "w+1", "w*2"))
    rendered = {spec.render() for spec in box}
    assert "C_1^w*1 E" not in rendered and "C_1^w*1" not in rendered
    assert any(s.startswith("C_2^w*1") for s in rendered)
