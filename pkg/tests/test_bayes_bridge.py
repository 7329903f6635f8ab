import json

import numpy as np
import pytest

from proofnets.bayes_bridge import (
    apply_evidence,
    bn_from_dict,
    bn_to_dict,
    compile_bn,
    dump_bn,
    evidence_bn,
    extract_bn,
    joint,
    parse_bn,
    random_bn,
    valuation_from_dict,
    valuation_to_dict,
)
from proofnets.errors import (
    CycleInDag,
    NotBpn,
    RowNotNormalized,
    SchemaError,
    StateSpaceTooLarge,
    UnknownParent,
    UnknownVariable,
    ValuationMismatch,
)
from proofnets.factors import project
from proofnets.interpret import interpret_naive
from proofnets.net_core import NodeKind, bnet, is_bpn
from proofnets.rewrite import ax_expand, cass_expand, cw_expand, is_normal


def single_variable(table=(0.2, 0.8)):
    return {
        "variables": [{"name": "A", "values": ["t", "f"]}],
        "cpts": [{"child": "A", "parents": [], "table": [list(table)]}],
    }


def test_parse_rain5(rain5_path):
    bn = parse_bn(rain5_path.read_bytes())
    assert bn.names == ["A", "B", "C", "D", "E"]
    assert bn.parents["D"] == ["B", "C"]
    assert bn.cpts["D"].value({"B": 1, "C": 1, "D": 1}) == pytest.approx(1.0)
    assert bn.state_space() == 32


def test_parse_errors():
    with pytest.raises(RowNotNormalized):
        bn_from_dict(single_variable((0.2, 0.7)))
    with pytest.raises(SchemaError):
        parse_bn(b"{not json")
    with pytest.raises(SchemaError):
        bn_from_dict({"variables": [{"name": "A", "values": ["t", "f"]}], "cpts": []})

    orphan = single_variable()
    orphan["cpts"][0]["parents"] = ["Z"]
    with pytest.raises(UnknownParent):
        bn_from_dict(orphan)

    loop = {
        "variables": [{"name": "A", "values": ["t", "f"]}, {"name": "B", "values": ["t", "f"]}],
        "cpts": [
            {"child": "A", "parents": ["B"], "table": [[0.5, 0.5], [0.5, 0.5]]},
            {"child": "B", "parents": ["A"], "table": [[0.5, 0.5], [0.5, 0.5]]},
        ],
    }
    with pytest.raises(CycleInDag) as info:
        bn_from_dict(loop)
    assert set(info.value.witness) == {"A", "B"}


def test_parent_order_is_presentation_only(rain5):
    doc = bn_to_dict(rain5)
    d_cpt = next(c for c in doc["cpts"] if c["child"] == "D")
    d_cpt["parents"] = ["C", "B"]
    rows = d_cpt["table"]
    d_cpt["table"] = [rows[0], rows[2], rows[1], rows[3]]
    assert bn_from_dict(doc).equivalent(rain5)


def test_json_document_survives_a_reload(rain5):
    again = bn_from_dict(json.loads(json.dumps(bn_to_dict(rain5))))
    assert again.equivalent(rain5)


def test_compile_positive(rain5_positive):
    net, valuation = rain5_positive
    assert len(net.boxes()) == 5
    assert [net.edges[e].label.name for e in net.conclusions] == ["A", "B", "C", "D", "E"]
    assert all(net.edges[e].label.positive for e in net.conclusions)
    assert is_bpn(net).ok and is_normal(net)
    assert set(valuation.cpts) == set(net.boxes())


def test_compile_empty(rain5_empty):
    net, _ = rain5_empty
    assert net.conclusions == []
    assert is_bpn(net).ok and is_normal(net)
    # D and E have no consumers
    assert len(net.nodes_of(NodeKind.WEAKENING)) == 2
    # A and C fan out to two consumers each
    assert len(net.nodes_of(NodeKind.CONTRACTION)) == 2


def test_compile_single_root_is_a_bare_box():
    net, valuation = compile_bn(bn_from_dict(single_variable()), "positive")
    assert list(net.nodes.values()) == [NodeKind.BOX]
    assert valuation.cpts[net.boxes()[0]].flat() == [0.2, 0.8]


def test_compile_rejects_unknown_mode(rain5):
    with pytest.raises(ValueError):
        compile_bn(rain5, "sideways")


def test_extract_round_trip(rain5, rain5_positive, rain5_empty):
    for net, valuation in (rain5_positive, rain5_empty):
        assert extract_bn(net, valuation).equivalent(rain5)
    assert bnet(rain5_positive[0]).edges() == sorted(rain5.dag().edges())


def test_extract_is_invariant_under_expansion(rain5, rain5_positive):
    net, valuation = rain5_positive
    contraction = net.nodes_of(NodeKind.CONTRACTION)[0]
    rewritten = ax_expand(net, net.positive_output(net.box_of("C")))
    rewritten = cass_expand(rewritten, contraction, rewritten.premises(contraction)[:2])
    rewritten = cw_expand(rewritten, rewritten.outputs(contraction)[0])
    assert extract_bn(rewritten, valuation).equivalent(rain5)


def test_extract_errors(rain5_positive, rain5_d):
    net, valuation = rain5_positive
    missing = valuation_from_dict(valuation_to_dict(valuation))
    del missing.cpts[net.box_of("B")]
    with pytest.raises(ValuationMismatch):
        extract_bn(net, missing)

    swapped = valuation_from_dict(valuation_to_dict(valuation))
    swapped.cpts[net.box_of("B")], swapped.cpts[net.box_of("C")] = (
        swapped.cpts[net.box_of("C")], swapped.cpts[net.box_of("B")])
    with pytest.raises(ValuationMismatch):
        extract_bn(net, swapped)

    d_net, d_valuation = rain5_d
    from proofnets.rewrite import show
    mixed = show(show(d_net, "A"), "B")
    assert extract_bn(mixed, d_valuation).names == ["A", "B", "C", "D", "E"]

    from proofnets.net_core import Net
    from proofnets.formula import neg, pos
    bad = Net()
    ax = bad.add_node(NodeKind.AX)
    bad.add_edge(ax, None, pos("X"))
    bad.add_edge(ax, None, neg("X"))
    with pytest.raises(NotBpn):
        extract_bn(bad, valuation)


def test_joint(rain5, rain5_positive):
    table = joint(rain5)
    assert table.total() == pytest.approx(1.0, abs=1e-9)
    assert project(table, ["A"]).flat() == pytest.approx([0.2, 0.8])
    assert project(table, ["B"]).flat() == pytest.approx([0.31, 0.69])
    assert project(table, ["C"]).flat() == pytest.approx([0.24, 0.76])

    net, valuation = rain5_positive
    naive = interpret_naive(net, valuation)
    assert np.allclose(naive.table, table.table, atol=1e-12)

    with pytest.raises(StateSpaceTooLarge):
        joint(rain5, cap=16)


def test_valuation_json(rain5_positive):
    _, valuation = rain5_positive
    restored = valuation_from_dict(json.loads(json.dumps(valuation_to_dict(valuation))))
    assert restored.domains == valuation.domains
    for box, cpt in valuation.cpts.items():
        assert restored.cpts[box].vars == cpt.vars
        assert np.allclose(restored.cpts[box].table, cpt.table)
    with pytest.raises(SchemaError):
        valuation_from_dict({"domains": {}, "boxes": [{"box": 0, "vars": ["A"], "table": [1.0]}]})


def test_evidence(rain5, rain5_positive):
    _, valuation = rain5_positive
    marked = apply_evidence(valuation, {"A": 0})
    # every CPT mentioning A is zero off the evidence
    for cpt in marked.cpts.values():
        if "A" in cpt.scope:
            assert project(cpt, ["A"]).value({"A": 1}) == 0.0

    weighted = evidence_bn(rain5, {"A": 0})
    assert joint(weighted).total() == pytest.approx(0.2)
    with pytest.raises(UnknownVariable):
        evidence_bn(rain5, {"Z": 0})


def test_random_bn_is_seeded_and_valid():
    first = random_bn(7, 12, max_parents=3, domain_sizes=(2, 3))
    second = random_bn(7, 12, max_parents=3, domain_sizes=(2, 3))
    assert first.equivalent(second)
    first.validate()
    assert first.names == sorted(first.names)
    net, valuation = compile_bn(first, "empty")
    assert is_bpn(net).ok
    assert extract_bn(net, valuation).equivalent(first)


def test_dump_bn_is_deterministic(rain5):
    text = dump_bn(rain5)
    assert text == dump_bn(parse_bn(text))
    assert parse_bn(text).equivalent(rain5)
