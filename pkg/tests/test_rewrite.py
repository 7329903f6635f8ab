import numpy as np
import pytest

from proofnets.bayes_bridge import compile_bn, random_bn
from proofnets.errors import NoSuchConclusion, NotInternal, StaleRedex
from proofnets.factors import project
from proofnets.formula import Par, Tensor, neg, parse_formula, pos
from proofnets.interpret import interpret_naive
from proofnets.net_core import (
    Net,
    NodeKind,
    bnet,
    check_pre_module,
    check_structure,
    internal_atoms,
    is_bpn,
    isomorphic,
    switching_acyclic,
)
from proofnets.rewrite import (
    Redex,
    RuleKind,
    apply,
    ax_expand,
    cass_expand,
    cid_expand,
    cuts_on,
    cw_expand,
    find_redexes,
    format_trace,
    hide,
    hide_all,
    is_normal,
    normalize,
    pick_cut,
    show,
)


def tensor_par_net():
    """(A+ * B+) cut against (A- | B-), each side fed by its own axioms."""
    net = Net()
    axes = [net.add_node(NodeKind.AX) for _ in range(4)]
    tensor = net.add_node(NodeKind.TENSOR)
    par = net.add_node(NodeKind.PAR)
    cut = net.add_node(NodeKind.CUT)
    net.add_edge(axes[0], tensor, pos("A"))
    net.add_edge(axes[0], None, neg("A"))
    net.add_edge(axes[1], tensor, pos("B"))
    net.add_edge(axes[1], None, neg("B"))
    net.add_edge(axes[2], None, pos("A"))
    net.add_edge(axes[2], par, neg("A"))
    net.add_edge(axes[3], None, pos("B"))
    net.add_edge(axes[3], par, neg("B"))
    net.add_edge(tensor, cut, parse_formula("A+ * B+"))
    net.add_edge(par, cut, parse_formula("A- | B-"))
    return net


def box_output(net, atom):
    return net.positive_output(net.box_of(atom))


def test_compiled_nets_are_normal(rain5_positive, rain5_empty):
    assert find_redexes(rain5_positive[0]) == []
    assert is_normal(rain5_empty[0])


def test_normalize_normal_net_takes_zero_steps(rain5_empty):
    result, trace = normalize(rain5_empty[0])
    assert trace == []
    assert isomorphic(result, rain5_empty[0])


def test_ax_expansion_reduces_back(rain5_positive):
    net = rain5_positive[0]
    expanded = ax_expand(net, box_output(net, "A"))
    redexes = find_redexes(expanded)
    assert redexes and all(r.rule == RuleKind.AX_CUT for r in redexes)
    result, trace = normalize(expanded)
    assert len(trace) == 1
    assert isomorphic(result, net)


def test_contraction_expansions_reduce_back(rain5_positive):
    net = rain5_positive[0]
    contraction = net.nodes_of(NodeKind.CONTRACTION)[0]
    premises = net.premises(contraction)[:2]
    for expanded in (
        cass_expand(net, contraction, premises),
        cw_expand(net, net.outputs(contraction)[0]),
        cid_expand(net, net.outputs(contraction)[0]),
    ):
        assert not is_normal(expanded)
        assert check_pre_module(expanded).is_proof_net
        result, _ = normalize(expanded)
        assert isomorphic(result, net)


def test_expansion_on_positive_edge_is_rejected(rain5_positive):
    net = rain5_positive[0]
    with pytest.raises(StaleRedex):
        cid_expand(net, box_output(net, "A"))
    with pytest.raises(StaleRedex):
        cass_expand(net, net.boxes()[0], [])


def test_tensor_par_reduction():
    net = tensor_par_net()
    check_structure(net)
    assert switching_acyclic(net) == (True, [])
    redexes = find_redexes(net)
    assert [r.rule for r in redexes] == [RuleKind.TENSOR_PAR]

    step = apply(net, redexes[0])
    check_structure(step)
    assert not step.nodes_of(NodeKind.TENSOR) and not step.nodes_of(NodeKind.PAR)
    assert len(step.nodes_of(NodeKind.CUT)) == 2
    assert switching_acyclic(step)[0]

    result, trace = normalize(net)
    assert trace[0].rule == RuleKind.TENSOR_PAR
    assert sorted(result.nodes.values()) == [NodeKind.AX, NodeKind.AX]
    assert len(result.conclusions) == 4


def test_random_strategies_agree(rain5_positive):
    net = hide_all(rain5_positive[0])
    first, _ = normalize(net, "random", seed=1)
    second, _ = normalize(net, "random", seed=7)
    leftmost, _ = normalize(net)
    assert isomorphic(first, second)
    assert isomorphic(first, leftmost)


def test_stale_redex(rain5_positive):
    with pytest.raises(StaleRedex):
        apply(rain5_positive[0], Redex((0, 1, 2), RuleKind.AX_CUT))


def test_format_trace():
    trace = [Redex((3, 5, 7), RuleKind.AX_CUT), Redex((4,), RuleKind.CID)]
    assert format_trace(trace) == "ax-cut 3 5 7\nc.id 4\n"


def test_hide_makes_atom_internal(rain5_d):
    net = rain5_d[0]
    hidden = hide(net, "D")
    assert hidden.conclusions == []
    assert "D" in hidden.atoms()
    assert is_bpn(hidden).ok
    with pytest.raises(NoSuchConclusion):
        hide(hidden, "D")


def test_hide_all_then_normalize_matches_empty_compilation(rain5_positive, rain5_empty):
    result, _ = normalize(hide_all(rain5_positive[0]))
    assert isomorphic(result, rain5_empty[0])


def test_show_after_hide_normalizes_back(rain5_positive):
    net = rain5_positive[0]
    for atom in ("A", "D"):
        restored, _ = normalize(show(hide(net, atom), atom))
        assert isomorphic(restored, net)


def test_show(rain5_d, rain5_positive):
    shown = show(rain5_d[0], "C")
    assert shown.conclusion_atoms() == {"C", "D"}
    assert is_bpn(shown).ok
    with pytest.raises(NotInternal):
        show(rain5_positive[0], "A")


def test_show_keeps_weakening_when_asked(rain5_empty):
    net = rain5_empty[0]
    plain = show(net, "E")
    kept = show(net, "E", preserve_weakening=True)
    assert len(kept.nodes_of(NodeKind.WEAKENING)) == len(plain.nodes_of(NodeKind.WEAKENING)) + 1
    assert plain.conclusion_atoms() == kept.conclusion_atoms() == {"E"}


def test_pick_cut_prefers_the_box_cut(rain5_positive):
    hidden = hide(rain5_positive[0], "A")
    assert len(cuts_on(hidden, "A")) == 2
    assert pick_cut(hidden, "A") == hidden.edges[box_output(hidden, "A")].dst


def random_expansion(net, rng):
    rule = str(rng.choice(["ax", "cass", "cw", "cid"]))
    contractions = [c for c in net.nodes_of(NodeKind.CONTRACTION) if len(net.premises(c)) >= 2]
    negatives = sorted(e for e, edge in net.edges.items() if not edge.label.positive)
    if rule == "cass" and contractions:
        node = contractions[int(rng.integers(len(contractions)))]
        premises = net.premises(node)
        size = int(rng.integers(2, len(premises) + 1))
        return cass_expand(net, node, [int(e) for e in rng.choice(premises, size=size, replace=False)])
    if rule == "cw" and negatives:
        return cw_expand(net, negatives[int(rng.integers(len(negatives)))])
    if rule == "cid" and negatives:
        return cid_expand(net, negatives[int(rng.integers(len(negatives)))])
    edges = sorted(net.edges)
    return ax_expand(net, edges[int(rng.integers(len(edges)))])


def random_rewrite(net, rng):
    """One rewrite chosen at random: (what was done, the new net)."""
    choice = str(rng.choice(["reduce", "expand", "hide", "show"], p=[0.35, 0.35, 0.15, 0.15]))
    if choice == "reduce":
        redexes = find_redexes(net)
        if redexes:
            return "reduce", apply(net, redexes[int(rng.integers(len(redexes)))])
    elif choice == "hide":
        visible = sorted(net.conclusion_atoms())
        if visible:
            return "hide", hide(net, str(rng.choice(visible)))
    elif choice == "show":
        hidden = sorted(internal_atoms(net))
        if hidden:
            return "show", show(net, str(rng.choice(hidden)))
    return "expand", random_expansion(net, rng)


@pytest.mark.parametrize("batch", range(5))
def test_random_rewrites_keep_bnet_and_meaning(batch):
    rng = np.random.default_rng(batch)
    for walk in range(10):
        bn = random_bn(10 * batch + walk, int(rng.integers(3, 6)), max_parents=2, domain_sizes=(2, 3))
        net, valuation = compile_bn(bn, "positive")
        dag = bnet(net).edges()
        before = interpret_naive(net, valuation)
        for _ in range(20):
            done, net = random_rewrite(net, rng)
            assert bnet(net).edges() == dag, done
            after = interpret_naive(net, valuation)
            if done == "hide":
                expected, actual = project(before, after.vars), after
            elif done == "show":
                expected, actual = before, project(after, before.vars)
            else:
                expected, actual = before, after
            assert actual.vars == expected.vars, done
            assert np.allclose(actual.table, expected.table, atol=1e-12, rtol=0), done
            before = after

        first, _ = normalize(net, "random", seed=walk)
        second, _ = normalize(net, "random", seed=walk + 100)
        assert is_normal(first)
        assert isomorphic(first, second)


def test_hiding_one_side_of_a_tensor(rain5_positive, rain5_d):
    """C+ * D+ cut against a par whose C- side is weakened normalizes to the net of D alone."""
    net = rain5_positive[0]
    for atom in ("A", "B", "E"):
        net = hide(net, atom)
    first, second = sorted(net.conclusions)
    names = [net.edges[e].label.name for e in (first, second)]
    assert sorted(names) == ["C", "D"]

    tensor = net.add_node(NodeKind.TENSOR)
    net.set_dst(first, tensor)
    net.set_dst(second, tensor)
    cut = net.add_node(NodeKind.CUT)
    net.add_edge(tensor, cut, Tensor(pos(names[0]), pos(names[1])))

    par = net.add_node(NodeKind.PAR)
    for name in names:
        if name == "C":
            net.add_edge(net.add_node(NodeKind.WEAKENING), par, neg(name))
        else:
            ax = net.add_node(NodeKind.AX)
            net.add_edge(ax, None, pos(name))
            net.add_edge(ax, par, neg(name))
    net.add_edge(par, cut, Par(neg(names[0]), neg(names[1])))
    check_structure(net)
    assert switching_acyclic(net)[0]

    result, trace = normalize(net)
    assert RuleKind.TENSOR_PAR in [r.rule for r in trace]
    assert result.conclusion_atoms() == {"D"}
    assert isomorphic(result, rain5_d[0])
