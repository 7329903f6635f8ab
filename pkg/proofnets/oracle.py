"""
Classical inference oracles over BayesNet: brute-force enumeration, variable
elimination, clique trees from elimination orders, single-traversal message
passing, greedy elimination heuristics and ancestral sampling.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from proofnets.bayes_bridge import BayesNet, Valuation, extract_bn, joint
from proofnets.env_loader import DEFAULT_STATE_CAP
from proofnets.errors import (
    InvalidTree,
    JointreeViolation,
    OrderIncomplete,
    QueryInOrder,
    QueryNotInRoot,
    UnknownVariable,
)
from proofnets.factorize import CliqueTree
from proofnets.factors import Assignment, CostCounter, Factor, expand, multiply_all, project, sum_out
from proofnets.net_core import Net, bnet

logger = logging.getLogger(__name__)

STRATEGIES = ("min-degree", "min-fill", "given")


@dataclass
class EliminationOrder:
    variables: List[str]
    induced_width: int


@dataclass
class Message:
    source: str
    target: str
    factor: Factor


def _query_list(query: Union[str, Sequence[str]]) -> List[str]:
    return [query] if isinstance(query, str) else list(query)


def brute_force_marginal(bn: BayesNet, keep: Iterable[str], cap: int = DEFAULT_STATE_CAP) -> Factor:
    """Project the full joint onto keep."""
    keep = set(keep)
    unknown = keep - set(bn.names)
    if unknown:
        raise UnknownVariable(f"unknown variables {sorted(unknown)}")
    return project(joint(bn, cap), keep)


# ---------------------------------------------------------- elimination

@dataclass
class _Step:
    variable: str
    scope: FrozenSet[str]
    cpts: List[str]
    taus: List[int]


def _eliminate(bn: BayesNet, order: Sequence[str],
               counter: Optional[CostCounter] = None) -> Tuple[List[Tuple[Tuple, Factor]], List[_Step]]:
    pool: List[Tuple[Tuple, Factor]] = [(("cpt", name), bn.cpts[name]) for name in bn.names]
    steps: List[_Step] = []
    for j, z in enumerate(order):
        hit = [(origin, f) for origin, f in pool if z in f.scope]
        pool = [(origin, f) for origin, f in pool if z not in f.scope]
        psi = multiply_all([f for _, f in hit], counter)
        steps.append(_Step(z, psi.scope,
                           [o[1] for o, _ in hit if o[0] == "cpt"],
                           [o[1] for o, _ in hit if o[0] == "tau"]))
        if z in psi.scope:
            pool.append((("tau", j), sum_out(psi, z, counter)))
        logger.debug(f"eliminated {z}: intermediate over {sorted(psi.scope)}")
    return pool, steps


def variable_elimination(bn: BayesNet, query: Union[str, Sequence[str]], order: Sequence[str],
                         counter: Optional[CostCounter] = None) -> Factor:
    """
    Sum-product variable elimination.

    Args:
        bn: the network (CPTs may carry evidence indicators)
        query: variable or variables to keep
        order: permutation of the remaining variables

    Returns:
        Factor over the query variables
    """
    query = _query_list(query)
    unknown = set(query) - set(bn.names)
    if unknown:
        raise UnknownVariable(f"unknown query variables {sorted(unknown)}")
    clash = sorted(set(query) & set(order))
    if clash:
        raise QueryInOrder(f"query variables {clash} appear in the elimination order")
    expected = set(bn.names) - set(query)
    if set(order) != expected or len(order) != len(expected):
        raise OrderIncomplete(f"order must eliminate exactly {sorted(expected)}")
    pool, _ = _eliminate(bn, order, counter)
    return multiply_all([f for _, f in pool], counter)


def _check_full_order(bn: BayesNet, order: Sequence[str]) -> None:
    if set(order) != set(bn.names) or len(order) != len(bn.names):
        raise OrderIncomplete(f"order {list(order)} is not a permutation of {bn.names}")


def _families(bn: BayesNet) -> Dict[str, FrozenSet[str]]:
    return {name: frozenset([name, *bn.parents.get(name, [])]) for name in bn.names}


def clique_tree_from_order(bn: BayesNet, order: Sequence[str]) -> CliqueTree:
    """One clique per elimination step, linked to the step that consumes its message."""
    _check_full_order(bn, order)
    _, steps = _eliminate(bn, order)

    tree = nx.Graph()
    cliques: Dict[str, FrozenSet[str]] = {}
    separators: Dict[FrozenSet[str], FrozenSet[str]] = {}
    assignment: Dict[str, str] = {}
    consumed = set()
    for j, step in enumerate(steps):
        cid = f"c{j}"
        tree.add_node(cid)
        cliques[cid] = step.scope
        for name in step.cpts:
            assignment[name] = cid
        for i in step.taus:
            tree.add_edge(f"c{i}", cid)
            separators[frozenset((f"c{i}", cid))] = steps[i].scope - {steps[i].variable}
            consumed.add(i)

    ends = [f"c{j}" for j in range(len(steps)) if j not in consumed]
    for a, b in zip(ends, ends[1:]):
        tree.add_edge(a, b)
        separators[frozenset((a, b))] = frozenset()

    ctree = CliqueTree(tree, cliques, separators, assignment)
    ctree.verify(_families(bn))
    return ctree


def _messages(bn: BayesNet, ctree: CliqueTree, root: str,
              counter: Optional[CostCounter] = None) -> Tuple[Factor, List[Message]]:
    domains = bn.domains
    upward = dict(nx.bfs_predecessors(ctree.tree, root))
    assigned: Dict[str, List[Factor]] = {}
    for name, cid in ctree.assignment.items():
        assigned.setdefault(cid, []).append(bn.cpts[name])

    inbox: Dict[str, List[Factor]] = {}
    messages: List[Message] = []
    psi = None
    for cid in nx.dfs_postorder_nodes(ctree.tree, root):
        psi = multiply_all(assigned.get(cid, []) + inbox.pop(cid, []), counter)
        if cid == root:
            break
        target = upward[cid]
        sep = ctree.separator(cid, target)
        message = expand(project(psi, sep & psi.scope, counter), {v: domains[v] for v in sep}, counter)
        messages.append(Message(cid, target, message))
        inbox.setdefault(target, []).append(message)
    return psi, messages


def collect_messages(bn: BayesNet, ctree: CliqueTree, root: str) -> List[Message]:
    """The messages of one upward pass towards root."""
    _validate_tree(bn, ctree, root)
    return _messages(bn, ctree, root)[1]


def _validate_tree(bn: BayesNet, ctree: CliqueTree, root: str) -> None:
    if root not in ctree.cliques:
        raise InvalidTree(f"root {root} is not a clique")
    if set(ctree.assignment) != set(bn.names):
        raise InvalidTree("clique tree assignment does not cover exactly the network's CPTs")
    try:
        ctree.verify(_families(bn))
    except JointreeViolation as e:
        raise InvalidTree(str(e)) from e


def message_passing(bn: BayesNet, ctree: CliqueTree, root: str, query: Union[str, Sequence[str]],
                    counter: Optional[CostCounter] = None) -> Factor:
    """
    Single-traversal message passing towards root.

    Returns:
        the marginal over the query, which must lie inside the root clique
    """
    query = _query_list(query)
    if not set(query) <= ctree.cliques.get(root, frozenset()):
        raise QueryNotInRoot(f"query {query} is not inside root clique {root}")
    _validate_tree(bn, ctree, root)
    psi, _ = _messages(bn, ctree, root, counter)
    result = project(psi, set(query) & psi.scope, counter)
    return expand(result, {v: bn.domains[v] for v in query}, counter)


def root_for(ctree: CliqueTree, variables: Iterable[str]) -> str:
    """Smallest clique containing the variables (ties by id)."""
    wanted = set(variables)
    candidates = [c for c, vs in ctree.cliques.items() if wanted <= vs]
    if not candidates:
        raise QueryNotInRoot(f"no clique holds {sorted(wanted)}")
    return min(candidates, key=lambda c: (len(ctree.cliques[c]), c))


# ------------------------------------------------------------ heuristics

def moral_graph(bn: BayesNet) -> nx.Graph:
    """Marry the parents of every variable and drop directions."""
    graph = nx.Graph()
    graph.add_nodes_from(bn.names)
    for child in bn.names:
        parents = bn.parents.get(child, [])
        graph.add_edges_from((p, child) for p in parents)
        graph.add_edges_from(combinations(parents, 2))
    return graph


def _net_graph(net: Net) -> nx.Graph:
    dag = bnet(net)
    graph = nx.Graph()
    graph.add_nodes_from(sorted(net.atoms()))
    for child in dag.graph.nodes:
        parents = dag.parents(child)
        graph.add_edges_from((p, child) for p in parents)
        graph.add_edges_from(combinations(parents, 2))
    return graph


def _simulate(graph: nx.Graph, order: Sequence[str]) -> int:
    g = graph.copy()
    result = 0
    for v in order:
        neighbours = list(g.neighbors(v))
        result = max(result, len(neighbours))
        g.add_edges_from(combinations(neighbours, 2))
        g.remove_node(v)
    return result


def induced_width(bn: BayesNet, order: Sequence[str]) -> int:
    """Induced width of the moral graph; variables missing from order go last."""
    graph = moral_graph(bn)
    rest = sorted(v for v in graph if v not in set(order))
    return _simulate(graph, list(order) + rest)


def _fill_in(graph: nx.Graph, v: str) -> int:
    neighbours = list(graph.neighbors(v))
    return sum(1 for a, b in combinations(neighbours, 2) if not graph.has_edge(a, b))


def heuristic_order(source: Union[BayesNet, Net], strategy: str = "min-fill",
                    given: Optional[Sequence[str]] = None) -> EliminationOrder:
    """
    Greedy elimination order on the moralized interaction graph.

    Args:
        source: a BayesNet, or a bpn (its bnet is moralized)
        strategy: "min-degree", "min-fill" or "given"
        given: the order to echo for strategy "given"

    Returns:
        EliminationOrder with its induced width; ties break by ascending name
    """
    graph = moral_graph(source) if isinstance(source, BayesNet) else _net_graph(source)
    if strategy == "given":
        order = list(given or [])
        if set(order) != set(graph.nodes) or len(order) != graph.number_of_nodes():
            raise OrderIncomplete(f"given order {order} is not a permutation of {sorted(graph.nodes)}")
    elif strategy in ("min-degree", "min-fill"):
        cost = (lambda g, n: g.degree(n)) if strategy == "min-degree" else _fill_in
        g = graph.copy()
        order = []
        while g.number_of_nodes():
            v = min(g.nodes, key=lambda n: (cost(g, n), n))
            neighbours = list(g.neighbors(v))
            g.add_edges_from(combinations(neighbours, 2))
            g.remove_node(v)
            order.append(v)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    return EliminationOrder(order, _simulate(graph, order))


# -------------------------------------------------------------- sampling

def forward_sample_arrays(bn: BayesNet, seed: int, count: int) -> Dict[str, np.ndarray]:
    """Ancestral sampling, vectorized: variable -> array of value indices."""
    rng = np.random.default_rng(seed)
    values: Dict[str, np.ndarray] = {}
    for name in nx.lexicographical_topological_sort(bn.dag()):
        cpt = bn.cpts[name]
        table = np.moveaxis(cpt.table, cpt.vars.index(name), -1)
        index = tuple(values[v] for v in cpt.vars if v != name)
        probs = table[index] if index else np.broadcast_to(table, (count, table.shape[-1]))
        cumulative = np.cumsum(probs, axis=-1)
        cumulative[..., -1] = 1.0
        draws = rng.random(count)
        values[name] = np.sum(cumulative <= draws[:, None], axis=-1)
    return values


def forward_sample(bn: BayesNet, seed: int, count: int) -> List[Assignment]:
    """Ancestral sampling in topological order; deterministic for a seed."""
    arrays = forward_sample_arrays(bn, seed, count)
    names = list(arrays)
    return [{name: int(arrays[name][i]) for name in names} for i in range(count)]


def forward_sample_net(net: Net, valuation: Valuation, seed: int, count: int) -> List[Assignment]:
    """Sample from a bpn, visiting its boxes in bnet order."""
    return forward_sample(extract_bn(net, valuation), seed, count)
