"""Instance documents: parsing, validation, round trips, partitions."""

import pytest

from mpeccert.errors import InfeasiblePoint, ParseError, PartitionLimitExceeded
from mpeccert.instances import (
    MpccInstance,
    Partition,
    active_sets,
    canonical_json,
    enumerate_partitions,
    parse_instance,
    serialize,
)
from mpeccert.rationals import rat, vec

from cases import biactive_descent_document, biactive_descent_case, fd


def test_parse_worked_document():
    inst = parse_instance(biactive_descent_document())
    assert isinstance(inst, MpccInstance)
    assert inst.n == 3
    assert len(inst.g) == 2 and len(inst.G) == 1
    assert inst == biactive_descent_case()


def test_parse_rejects_violated_complementarity():
    doc = biactive_descent_document()
    doc["G"][0]["value"] = "1"
    doc["H"][0]["value"] = "1"
    with pytest.raises(InfeasiblePoint):
        parse_instance(doc)


def test_parse_rejects_positive_inequality():
    doc = biactive_descent_document()
    doc["g"][0]["value"] = "1/2"
    with pytest.raises(InfeasiblePoint):
        parse_instance(doc)


def test_parse_rejects_bad_rational():
    doc = biactive_descent_document()
    doc["f_grad"][0] = "1.5"
    with pytest.raises(ParseError):
        parse_instance(doc)


def test_parse_rejects_float():
    doc = biactive_descent_document()
    doc["f_grad"][0] = 1.5
    with pytest.raises(ParseError):
        parse_instance(doc)


def test_empty_pair_block_is_valid():
    doc = biactive_descent_document()
    doc["G"] = []
    doc["H"] = []
    inst = parse_instance(doc)
    assert active_sets(inst).i00 == ()


def test_round_trip_identity():
    inst = biactive_descent_case()
    again = parse_instance(serialize(inst))
    assert again == inst
    assert canonical_json(serialize(again)) == canonical_json(serialize(inst))


def test_round_trip_ge():
    from mpeccert.oracle import random_ge

    for seed in range(6):
        inst = random_ge(seed)
        assert parse_instance(serialize(inst)) == inst


def test_round_trip_mpvc():
    from mpeccert.oracle import random_mpvc

    for seed in range(6):
        inst = random_mpvc(seed)
        assert parse_instance(serialize(inst)) == inst


def test_active_set_partition_covers_range():
    from mpeccert.oracle import random_mpcc, random_mpvc

    for seed in range(10):
        inst = random_mpcc(seed)
        act = active_sets(inst)
        groups = (act.i0plus, act.i00, act.iplus0)
        flat = [i for grp in groups for i in grp]
        assert sorted(flat) == list(range(len(inst.G)))
        inst_v = random_mpvc(seed)
        act_v = active_sets(inst_v)
        groups_v = (act_v.i0minus, act_v.i00, act_v.i0plus, act_v.iplus0, act_v.iplusminus)
        flat_v = [i for grp in groups_v for i in grp]
        assert sorted(flat_v) == list(range(len(inst_v.G)))


def test_partition_enumeration_order_and_count():
    assert enumerate_partitions(()) == (Partition((), ()),)
    assert enumerate_partitions((1,)) == (Partition((), (1,)), Partition((1,), ()))
    four = enumerate_partitions((1, 2))
    assert len(four) == 4
    assert len(set(four)) == 4
    assert all(set(p.beta1) | set(p.beta2) == {1, 2} for p in four)
    assert all(not (set(p.beta1) & set(p.beta2)) for p in four)
    # lexicographic in the first block
    assert [p.beta1 for p in four] == sorted([p.beta1 for p in four])


def test_partition_cap():
    with pytest.raises(PartitionLimitExceeded):
        enumerate_partitions(tuple(range(20)), cap=1000)


def test_infeasible_equality_named():
    with pytest.raises(InfeasiblePoint) as err:
        MpccInstance(
            n=1,
            f_grad=vec([0]),
            h=(fd(1, [1]),),
            g=(),
            G=(),
            H=(),
        )
    assert "h[0]" in str(err.value)
