import json

import pytest

from proofnets.errors import NotFactorized, SchemaError
from proofnets.export import (
    bnet_to_dot,
    cliques_to_dot,
    dumps,
    fnet_from_dict,
    fnet_to_dict,
    is_factorized_doc,
    net_to_dot,
)
from proofnets.factorize import clique_tree_of, factorize_by_order
from proofnets.net_core import bnet, net_to_dict

ORDER = ["A", "B", "C", "E", "D"]


@pytest.fixture
def rain5_fnet(rain5_d):
    return factorize_by_order(rain5_d[0], ORDER)


def test_factorized_json_restores_the_tree(rain5_fnet):
    data = json.loads(dumps(fnet_to_dict(rain5_fnet)))
    assert is_factorized_doc(data)
    assert data["roots"] == ["w2"]
    assert [item["id"] for item in data["tree"]] == ["w0", "w1", "w2"]
    assert data["tree"][2]["output_atoms"] == ["D"]

    restored = fnet_from_dict(data)
    assert restored.components == rain5_fnet.components
    assert restored.parent == rain5_fnet.parent


def test_factorized_json_errors(rain5_fnet, rain5_d):
    assert not is_factorized_doc(net_to_dict(rain5_d[0]))

    data = fnet_to_dict(rain5_fnet)
    data["tree"][0]["id"] = "x0"
    with pytest.raises(SchemaError):
        fnet_from_dict(data)

    data = fnet_to_dict(rain5_fnet)
    data["tree"][1]["children"] = []
    with pytest.raises(NotFactorized):
        fnet_from_dict(data)


def test_net_to_dot_clusters_wirings(rain5_fnet, rain5_d):
    text = net_to_dot(rain5_fnet.net, rain5_fnet)
    assert text.startswith("digraph net {")
    for wid in ("w0", "w1", "w2"):
        assert f"subgraph cluster_{wid} {{" in text
    assert "cluster" not in net_to_dot(rain5_d[0])


def test_cliques_to_dot(rain5_fnet):
    text = cliques_to_dot(clique_tree_of(rain5_fnet))
    assert text.count('[label="{') == 3
    assert '[label="B,C"]' in text
    assert '[label="C,D"]' in text


def test_bnet_to_dot(rain5_positive):
    text = bnet_to_dot(bnet(rain5_positive[0]))
    assert text.count("[shape=ellipse]") == 5
    assert text.count("->") == 5
    assert '"A" -> "B";' in text
