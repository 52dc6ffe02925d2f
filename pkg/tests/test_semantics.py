import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iterative_rsa import (
    BoundingBox,
    DescriptorKind,
    Distribution,
    GradedObject,
    GradedRelation,
    GradedScene,
    ThresholdTable,
    categorize,
    salience_prior,
    truth,
)
from iterative_rsa.errors import SemanticsError

K = DescriptorKind


def scene(objects, relations=()):
    return GradedScene("s", 500, 500, tuple(objects), tuple(relations))


def o(oid, types, attrs=None, box=(0, 0, 10, 10)):
    return GradedObject(oid, BoundingBox(*box), types, attrs or {})


def test_type_descriptor():
    space = categorize(scene([o("d1", {"dog": 0.9})]))
    assert space.lookup(K.TYPE, "dog").extension == {"d1"}


def test_relation_descriptor_grounded_by_object_class():
    s = scene(
        [o("dog1", {"dog": 0.9}), o("dog2", {"dog": 0.8}, box=(50, 0, 10, 10)), o("frisbee1", {"frisbee": 0.7}, box=(20, 0, 5, 5))],
        [GradedRelation("dog1", "with", "frisbee1", 0.8), GradedRelation("dog2", "with", "frisbee1", 0.3)],
    )
    space = categorize(s)
    d = space.lookup(K.RELATION, "with frisbee")
    assert d.extension == {"dog1"}
    assert truth(d, "dog1") == 1
    # dog2's relation score 0.3 is below theta_rel=0.5
    assert truth(d, "dog2", space) == 0


def test_attribute_below_threshold_absent():
    s = scene([o("a", {"dog": 0.9}, {"red": 0.29}), o("b", {"dog": 0.9}, {"red": 0.3}, box=(20, 0, 10, 10))])
    d = categorize(s, ThresholdTable(theta_attr=0.3)).lookup(K.ATTRIBUTE, "red")
    assert d.extension == {"b"}


def test_ordinals_become_descriptors_and_merge_across_categories():
    s = scene([
        o("t1", {"train": 0.9}, box=(0, 0, 10, 10)), o("t2", {"train": 0.9}, box=(100, 0, 10, 10)),
        o("p1", {"person": 0.9}, box=(200, 0, 5, 5)), o("p2", {"person": 0.9}, box=(300, 0, 5, 5)),
    ])
    space = categorize(s)
    assert space.lookup(K.ORDINAL, "right").extension == {"t2", "p2"}
    assert space.lookup(K.ORDINAL, "left").extension == {"t1", "p1"}


def test_space_order_and_dedup():
    s = scene([o("a", {"dog": 0.9, "cat": 0.4}, {"red": 0.9}), o("b", {"dog": 0.9}, {"red": 0.8}, box=(30, 0, 10, 10))])
    space = categorize(s)
    keys = [(d.kind, d.surface) for d in space]
    assert keys == [(K.TYPE, "cat"), (K.TYPE, "dog"), (K.ATTRIBUTE, "red"), (K.ORDINAL, "left"), (K.ORDINAL, "right")]
    assert len(set(keys)) == len(keys)


def test_empty_space_rejected():
    with pytest.raises(SemanticsError, match="no descriptors"):
        categorize(scene([o("a", {"dog": 0.1})]))


def test_truth_unknown_object():
    space = categorize(scene([o("a", {"dog": 0.9})]))
    with pytest.raises(KeyError):
        truth(space[0], "zz", space)
    assert truth(space[0], "a", space) == 1


@pytest.mark.parametrize(
    "areas, expected",
    [((100, 300), (0.25, 0.75)), ((4, 4, 4, 4), (0.25,) * 4), ((7,), (1.0,))],
)
def test_salience_prior(areas, expected):
    objs = [o(f"o{i}", {"dog": 1}, box=(0, 0, a, 1)) for i, a in enumerate(areas)]
    p = salience_prior(scene(objs))
    assert tuple(p.values()) == pytest.approx(expected, abs=1e-15)


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution({"a": 0.5, "b": 0.6})
    with pytest.raises(ValueError):
        Distribution({"a": -0.1, "b": 1.1})
    assert Distribution({"a": 0.3, "b": 0.7}).support == {"a", "b"}
    assert Distribution({"a": 0.0, "b": 1.0}).support == {"b"}


graded = st.floats(0, 1, allow_nan=False)


@st.composite
def graded_scenes(draw):
    n = draw(st.integers(1, 6))
    objs = [
        o(
            f"o{i}",
            draw(st.dictionaries(st.sampled_from(["dog", "cat", "car"]), graded, min_size=1, max_size=3)),
            draw(st.dictionaries(st.sampled_from(["red", "big", "wet"]), graded, max_size=3)),
            box=(draw(st.integers(0, 400)), draw(st.integers(0, 400)), draw(st.integers(1, 50)), draw(st.integers(1, 50))),
        )
        for i in range(n)
    ]
    rels = []
    if n > 1:
        for _ in range(draw(st.integers(0, 5))):
            a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            rels.append(GradedRelation(f"o{a}", draw(st.sampled_from(["on", "with"])), f"o{b}", draw(graded)))
    return scene(objs, rels)


def _extensions(s, theta):
    try:
        return {d.key: d.extension for d in categorize(s, theta)}
    except SemanticsError:
        return {}


@settings(max_examples=150, deadline=None)
@given(graded_scenes(), graded, graded, graded, st.sampled_from(["theta_type", "theta_attr", "theta_rel"]), graded)
def test_raising_threshold_never_enlarges_extension(s, tt, ta, tr, which, bump):
    lo = ThresholdTable(tt, ta, tr)
    hi = ThresholdTable(**{**vars(lo), which: max(getattr(lo, which), bump)})
    ext_lo, ext_hi = _extensions(s, lo), _extensions(s, hi)
    for key, ext in ext_hi.items():
        assert ext <= ext_lo.get(key, frozenset())


@settings(max_examples=100, deadline=None)
@given(graded_scenes())
def test_space_invariants_and_prior(s):
    p = salience_prior(s)
    assert all(v >= 0 for v in p.values())
    assert abs(math.fsum(p.values()) - 1) <= 1e-9
    try:
        space = categorize(s)
    except SemanticsError:
        return
    for d in space:
        assert d.extension and d.extension <= set(s.ids)
