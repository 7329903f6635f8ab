import math

import numpy as np
import pytest

from proofnets.bayes_bridge import bn_from_dict, compile_bn, joint, random_bn
from proofnets.errors import InvalidTree, OrderIncomplete, QueryInOrder, QueryNotInRoot, UnknownVariable
from proofnets.factors import CostCounter
from proofnets.oracle import (
    _eliminate,
    brute_force_marginal,
    clique_tree_from_order,
    collect_messages,
    forward_sample,
    forward_sample_arrays,
    forward_sample_net,
    heuristic_order,
    induced_width,
    message_passing,
    moral_graph,
    root_for,
    variable_elimination,
)

TF = ["t", "f"]


def chain():
    return bn_from_dict({
        "variables": [{"name": n, "values": TF} for n in "ABC"],
        "cpts": [
            {"child": "A", "parents": [], "table": [[0.3, 0.7]]},
            {"child": "B", "parents": ["A"], "table": [[0.9, 0.1], [0.4, 0.6]]},
            {"child": "C", "parents": ["B"], "table": [[0.5, 0.5], [0.2, 0.8]]},
        ],
    })


def assert_close(f1, f2, tol=1e-12):
    assert f1.vars == f2.vars
    assert np.allclose(f1.table, f2.table, atol=tol, rtol=0)


def test_brute_force_edges(rain5):
    assert brute_force_marginal(rain5, []).total() == pytest.approx(1.0, abs=1e-9)
    assert_close(brute_force_marginal(rain5, rain5.names), joint(rain5))
    with pytest.raises(UnknownVariable):
        brute_force_marginal(rain5, ["Z"])


def test_variable_elimination_on_rain5(rain5):
    order = ["E", "B", "C", "A"]
    assert_close(variable_elimination(rain5, "D", order), brute_force_marginal(rain5, ["D"]))
    _, steps = _eliminate(rain5, order)
    assert max(len(step.scope) - 1 for step in steps) == 3


def test_variable_elimination_is_order_independent(rain5):
    first = variable_elimination(rain5, ["D", "E"], ["A", "B", "C"])
    second = variable_elimination(rain5, ["D", "E"], ["C", "A", "B"])
    assert_close(first, second)


def test_variable_elimination_errors(rain5):
    with pytest.raises(QueryInOrder):
        variable_elimination(rain5, "D", ["D", "E", "B", "C", "A"])
    with pytest.raises(OrderIncomplete):
        variable_elimination(rain5, "D", ["E", "B"])
    with pytest.raises(UnknownVariable):
        variable_elimination(rain5, "Z", ["A", "B", "C", "D", "E"])


def test_single_variable_with_empty_order():
    bn = bn_from_dict({
        "variables": [{"name": "A", "values": TF}],
        "cpts": [{"child": "A", "parents": [], "table": [[0.2, 0.8]]}],
    })
    assert variable_elimination(bn, "A", []).flat() == pytest.approx([0.2, 0.8])


def test_clique_tree_of_chain():
    ctree = clique_tree_from_order(chain(), ["A", "B", "C"])
    assert [sorted(ctree.cliques[f"c{j}"]) for j in range(3)] == [["A", "B"], ["B", "C"], ["C"]]
    assert ctree.separator("c0", "c1") == {"B"}
    assert ctree.width == 1


def test_clique_tree_of_rain5(rain5):
    ctree = clique_tree_from_order(rain5, ["A", "B", "C", "E", "D"])
    cliques = set(ctree.cliques.values())
    for expected in ({"A", "B", "C"}, {"B", "C", "D"}, {"C", "D", "E"}):
        assert frozenset(expected) in cliques
    assert ctree.width == induced_width(rain5, ["A", "B", "C", "E", "D"]) == 2
    with pytest.raises(OrderIncomplete):
        clique_tree_from_order(rain5, ["A", "B"])


def test_message_passing_matches_brute_force(rain5):
    ctree = clique_tree_from_order(rain5, heuristic_order(rain5, "min-fill").variables)
    for name in rain5.names:
        root = root_for(ctree, [name])
        assert_close(message_passing(rain5, ctree, root, name), brute_force_marginal(rain5, [name]))


def test_messages_have_separator_scope(rain5):
    ctree = clique_tree_from_order(rain5, ["A", "B", "C", "E", "D"])
    root = root_for(ctree, ["D"])
    messages = collect_messages(rain5, ctree, root)
    assert len(messages) == len(ctree.cliques) - 1
    for message in messages:
        assert message.factor.scope == ctree.separator(message.source, message.target)


def test_message_passing_errors(rain5):
    ctree = clique_tree_from_order(rain5, ["A", "B", "C", "E", "D"])
    with pytest.raises(QueryNotInRoot):
        message_passing(rain5, ctree, root_for(ctree, ["A"]), "E")
    with pytest.raises(InvalidTree):
        collect_messages(rain5, ctree, "nowhere")
    with pytest.raises(QueryNotInRoot):
        root_for(ctree, ["A", "E"])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_oracles_agree_on_random_networks(seed):
    bn = random_bn(seed, 8, max_parents=3, domain_sizes=(2, 3))
    order = heuristic_order(bn, "min-degree").variables
    ctree = clique_tree_from_order(bn, order)
    for name in bn.names:
        expected = brute_force_marginal(bn, [name])
        rest = [v for v in order if v != name]
        assert_close(variable_elimination(bn, name, rest), expected)
        assert_close(message_passing(bn, ctree, root_for(ctree, [name]), name), expected)


def test_moral_graph_marries_parents(rain5):
    graph = moral_graph(rain5)
    assert graph.has_edge("B", "C")
    assert graph.number_of_edges() == 6


def test_heuristics(rain5):
    assert heuristic_order(rain5, "min-fill").induced_width == 2
    assert heuristic_order(chain(), "min-degree").induced_width == 1
    given = heuristic_order(rain5, "given", ["E", "D", "C", "B", "A"])
    assert given.variables == ["E", "D", "C", "B", "A"]
    with pytest.raises(OrderIncomplete):
        heuristic_order(rain5, "given", ["A"])
    with pytest.raises(ValueError):
        heuristic_order(rain5, "max-chaos")


def test_heuristic_order_on_a_net_matches_the_network(rain5, rain5_empty):
    assert heuristic_order(rain5_empty[0], "min-fill").variables == heuristic_order(rain5, "min-fill").variables


def test_variable_elimination_cost_is_bounded(rain5):
    counter = CostCounter()
    order = heuristic_order(rain5, "min-fill").variables
    variable_elimination(rain5, "D", [v for v in order if v != "D"], counter)
    assert counter.max_scope <= 3


def test_deterministic_cpts_always_sample_the_same_assignment():
    bn = bn_from_dict({
        "variables": [{"name": "A", "values": TF}, {"name": "B", "values": TF}],
        "cpts": [
            {"child": "A", "parents": [], "table": [[1.0, 0.0]]},
            {"child": "B", "parents": ["A"], "table": [[0.0, 1.0], [1.0, 0.0]]},
        ],
    })
    assert forward_sample(bn, 3, 50) == [{"A": 0, "B": 1}] * 50


def test_sampling_is_seeded(rain5, rain5_positive):
    assert forward_sample(rain5, 11, 200) == forward_sample(rain5, 11, 200)
    net, valuation = rain5_positive
    assert forward_sample_net(net, valuation, 11, 200) == forward_sample(rain5, 11, 200)


def test_sample_frequencies_match_marginals(rain5):
    count = 100_000
    samples = forward_sample_arrays(rain5, 2024, count)
    for name in rain5.names:
        p = brute_force_marginal(rain5, [name]).flat()[0]
        freq = float(np.mean(samples[name] == 0))
        sigma = math.sqrt(p * (1 - p) / count)
        assert abs(freq - p) <= 3 * sigma
