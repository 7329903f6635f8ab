"""
Bayesian networks, valuations, and the bridge between Bayesian networks and
Bayesian proof-nets (compile and extract).
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from proofnets.errors import (
    CycleInDag,
    NotBpn,
    SchemaError,
    StateSpaceTooLarge,
    UnknownParent,
    UnknownVariable,
    ValuationMismatch,
)
from proofnets.factors import (
    DEFAULT_CPT_TOL,
    Domain,
    Factor,
    indicator,
    make_factor,
    max_abs_diff,
    multiply,
    multiply_all,
    product_size,
    validate_cpt,
)
from proofnets.env_loader import DEFAULT_STATE_CAP
from proofnets.formula import Atom, neg, pos
from proofnets.net_core import Net, NodeKind, bnet, check_structure, is_bpn

logger = logging.getLogger(__name__)

MODES = ("positive", "empty")


@dataclass
class BayesNet:
    """A DAG over discrete variables with one CPT per variable."""
    variables: List[Tuple[str, Domain]]
    parents: Dict[str, List[str]]
    cpts: Dict[str, Factor]

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.variables]

    @property
    def domains(self) -> Dict[str, Domain]:
        return dict(self.variables)

    def dag(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.names)
        for child, parents in self.parents.items():
            for parent in parents:
                graph.add_edge(parent, child)
        return graph

    def state_space(self) -> int:
        return product_size(dom for _, dom in self.variables)

    def validate(self, tol: float = DEFAULT_CPT_TOL) -> None:
        known = set(self.names)
        for child, parents in self.parents.items():
            for parent in parents:
                if parent not in known:
                    raise UnknownParent(f"{child} lists unknown parent {parent}")
        try:
            cycle = nx.find_cycle(self.dag())
            raise CycleInDag(f"parent graph has a cycle: {[u for u, _ in cycle]}", [u for u, _ in cycle])
        except nx.NetworkXNoCycle:
            pass
        for child in self.names:
            cpt = self.cpts[child]
            expected = {child, *self.parents.get(child, [])}
            if cpt.scope != expected:
                raise ValuationMismatch(f"CPT of {child} is over {sorted(cpt.scope)}, expected {sorted(expected)}")
            validate_cpt(cpt, child, tol)

    def equivalent(self, other: "BayesNet", tol: float = 1e-12) -> bool:
        """Same variables, domains, parent sets and CPTs (parent order ignored)."""
        if self.domains != other.domains:
            return False
        for name in self.names:
            if set(self.parents.get(name, [])) != set(other.parents.get(name, [])):
                return False
            if max_abs_diff(self.cpts[name], other.cpts[name]) > tol:
                return False
        return True


@dataclass
class Valuation:
    """Value sets for atoms and a CPT for every box."""
    domains: Dict[str, Domain]
    cpts: Dict[int, Factor] = field(default_factory=dict)


# ------------------------------------------------------------------- JSON

def _rows_in_order(cpt: Factor, order: Sequence[str]) -> np.ndarray:
    perm = [cpt.vars.index(v) for v in order]
    return np.transpose(cpt.table, perm).reshape(-1, len(cpt.domain(order[-1])))


def bn_from_dict(data: Mapping, tol: float = DEFAULT_CPT_TOL) -> BayesNet:
    """Build and validate a BayesNet from its JSON document."""
    try:
        variables: List[Tuple[str, Domain]] = []
        for item in data["variables"]:
            name = str(item["name"])
            if name in dict(variables):
                raise SchemaError(f"variable {name} declared twice")
            variables.append((name, tuple(str(v) for v in item["values"])))
        domains = dict(variables)

        parents: Dict[str, List[str]] = {}
        cpts: Dict[str, Factor] = {}
        for item in data["cpts"]:
            child = str(item["child"])
            if child not in domains:
                raise SchemaError(f"CPT for undeclared variable {child}")
            if child in cpts:
                raise SchemaError(f"two CPTs for {child}")
            pa = [str(p) for p in item.get("parents", [])]
            for p in pa:
                if p not in domains:
                    raise UnknownParent(f"{child} lists unknown parent {p}")
            rows = item["table"]
            n_rows = product_size(domains[p] for p in pa)
            if len(rows) != n_rows or any(len(row) != len(domains[child]) for row in rows):
                raise SchemaError(
                    f"CPT of {child} needs {n_rows} rows of {len(domains[child])} entries")
            flat = [float(x) for row in rows for x in row]
            cpts[child] = make_factor(pa + [child], [domains[v] for v in pa + [child]], flat)
            parents[child] = pa
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"Error reading Bayesian network: {str(e)}") from e

    missing = [name for name, _ in variables if name not in cpts]
    if missing:
        raise SchemaError(f"no CPT for {missing}")
    bn = BayesNet(variables, parents, cpts)
    bn.validate(tol)
    return bn


def parse_bn(raw: Union[bytes, str], tol: float = DEFAULT_CPT_TOL) -> BayesNet:
    try:
        data = json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SchemaError(f"Error decoding Bayesian network JSON: {str(e)}") from e
    return bn_from_dict(data, tol)


def bn_to_dict(bn: BayesNet) -> Dict:
    cpts = []
    for name in bn.names:
        pa = bn.parents.get(name, [])
        rows = _rows_in_order(bn.cpts[name], pa + [name])
        cpts.append({"child": name, "parents": list(pa), "table": rows.tolist()})
    return {
        "variables": [{"name": name, "values": list(dom)} for name, dom in bn.variables],
        "cpts": cpts,
    }


def dump_bn(bn: BayesNet) -> str:
    return json.dumps(bn_to_dict(bn), indent=2) + "\n"


def valuation_to_dict(valuation: Valuation) -> Dict:
    return {
        "domains": {name: list(dom) for name, dom in sorted(valuation.domains.items())},
        "boxes": [
            {"box": box, "vars": list(cpt.vars), "table": cpt.flat()}
            for box, cpt in sorted(valuation.cpts.items())
        ],
    }


def valuation_from_dict(data: Mapping) -> Valuation:
    try:
        domains = {str(k): tuple(str(v) for v in vals) for k, vals in data["domains"].items()}
        cpts = {}
        for item in data["boxes"]:
            names = [str(v) for v in item["vars"]]
            cpts[int(item["box"])] = make_factor(names, [domains[v] for v in names], item["table"])
        return Valuation(domains, cpts)
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"Error reading valuation: {str(e)}") from e


# ------------------------------------------------------------ compilation

def compile_bn(bn: BayesNet, mode: str = "positive") -> Tuple[Net, Valuation]:
    """
    Compile a Bayesian network into a normal Bayesian proof-net.

    Args:
        bn: a valid BayesNet
        mode: "positive" keeps every X+ as a conclusion, "empty" hides them all

    Returns:
        (net, valuation) with one box per variable
    """
    if mode not in MODES:
        raise ValueError(f"unknown compile mode {mode!r}")
    net = Net()
    boxes: Dict[str, int] = {}
    outputs: Dict[str, int] = {}
    consumers: Dict[str, List[int]] = {name: [] for name in bn.names}

    for name in bn.names:
        box = net.add_node(NodeKind.BOX)
        boxes[name] = box
        outputs[name] = net.add_edge(box, None, pos(name))
        for parent in bn.parents.get(name, []):
            consumers[parent].append(net.add_edge(box, None, neg(parent)))

    conclusions: List[int] = []
    for name in bn.names:
        feeders = list(consumers[name])
        if mode == "positive":
            if not feeders:
                conclusions.append(outputs[name])
                continue
            ax = net.add_node(NodeKind.AX)
            conclusions.append(net.add_edge(ax, None, pos(name)))
            feeders.append(net.add_edge(ax, None, neg(name)))
        elif not feeders:
            weakening = net.add_node(NodeKind.WEAKENING)
            feeders.append(net.add_edge(weakening, None, neg(name)))

        if len(feeders) == 1:
            negative = feeders[0]
        else:
            contraction = net.add_node(NodeKind.CONTRACTION)
            for eid in feeders:
                net.set_dst(eid, contraction)
            negative = net.add_edge(contraction, None, neg(name))
        cut = net.add_node(NodeKind.CUT)
        net.set_dst(outputs[name], cut)
        net.set_dst(negative, cut)

    net.set_conclusion_order(conclusions)
    valuation = Valuation(bn.domains, {boxes[name]: bn.cpts[name] for name in bn.names})
    logger.debug(f"compiled {len(bn.names)} variables into {len(net.nodes)} nodes ({mode})")
    return net, valuation


def extract_bn(net: Net, valuation: Valuation, tol: float = DEFAULT_CPT_TOL) -> BayesNet:
    """Read the Bayesian network off a bpn and its valuation."""
    check_structure(net)
    report = is_bpn(net)
    if not report.ok:
        raise NotBpn(f"not a Bayesian proof-net: {'; '.join(report.violations)}")
    for eid in net.conclusions:
        label = net.edges[eid].label
        if not (isinstance(label, Atom) and label.positive):
            raise NotBpn(f"conclusion {label} is not positive")

    dag = bnet(net)
    variables: List[Tuple[str, Domain]] = []
    parents: Dict[str, List[str]] = {}
    cpts: Dict[str, Factor] = {}
    for box in net.boxes():
        name = net.box_atom(box)
        if box not in valuation.cpts:
            raise ValuationMismatch(f"valuation has no CPT for box {box} ({name})")
        if name not in valuation.domains:
            raise ValuationMismatch(f"valuation has no domain for {name}")
        cpt = valuation.cpts[box]
        pa = dag.parents(name)
        if cpt.scope != {name, *pa}:
            raise ValuationMismatch(f"CPT of box {box} is over {sorted(cpt.scope)}, box needs {sorted({name, *pa})}")
        variables.append((name, valuation.domains[name]))
        parents[name] = pa
        cpts[name] = cpt
    bn = BayesNet(variables, parents, cpts)
    bn.validate(tol)
    return bn


def joint(bn: BayesNet, cap: int = DEFAULT_STATE_CAP) -> Factor:
    """Product of all CPTs."""
    size = bn.state_space()
    if size > cap:
        raise StateSpaceTooLarge(f"joint over {len(bn.names)} variables has {size} states (cap {cap})")
    return multiply_all([bn.cpts[name] for name in bn.names])


# --------------------------------------------------------------- evidence

def _indicators(domains: Mapping[str, Domain], evidence: Mapping[str, int]) -> Dict[str, Factor]:
    result = {}
    for name, index in evidence.items():
        if name not in domains:
            raise UnknownVariable(f"evidence on unknown variable {name}")
        result[name] = indicator(name, domains[name], index)
    return result


def apply_evidence(valuation: Valuation, evidence: Mapping[str, int]) -> Valuation:
    """Multiply each box CPT by the 0/1 indicators of the evidence it mentions."""
    marks = _indicators(valuation.domains, evidence)
    cpts = {}
    for box, cpt in valuation.cpts.items():
        for name, mark in marks.items():
            if name in cpt.scope:
                cpt = multiply(cpt, mark)
        cpts[box] = cpt
    return Valuation(dict(valuation.domains), cpts)


def evidence_bn(bn: BayesNet, evidence: Mapping[str, int]) -> BayesNet:
    """Same DAG with evidence indicators folded into the child CPTs (unnormalized)."""
    marks = _indicators(bn.domains, evidence)
    cpts = dict(bn.cpts)
    for name, mark in marks.items():
        cpts[name] = multiply(cpts[name], mark)
    return BayesNet(list(bn.variables), dict(bn.parents), cpts)


# -------------------------------------------------------------- generators

def random_bn(seed: int, num_vars: int, max_parents: int = 2,
              domain_sizes: Sequence[int] = (2,), window: Optional[int] = None,
              prefix: str = "V") -> BayesNet:
    """
    Seeded random Bayesian network.

    Args:
        seed: RNG seed
        num_vars: number of variables
        max_parents: parents per variable are drawn from 0..max_parents
        domain_sizes: allowed domain sizes
        window: parents are drawn only among the last `window` variables
        prefix: variable name prefix (names are zero-padded so they sort in creation order)

    Returns:
        a valid BayesNet with Dirichlet CPT rows
    """
    rng = np.random.default_rng(seed)
    width = len(str(max(num_vars - 1, 0)))
    variables: List[Tuple[str, Domain]] = []
    parents: Dict[str, List[str]] = {}
    cpts: Dict[str, Factor] = {}
    for i in range(num_vars):
        name = f"{prefix}{i:0{width}d}"
        size = int(rng.choice(list(domain_sizes)))
        domain = tuple(f"v{k}" for k in range(size))
        pool = [n for n, _ in variables]
        if window is not None:
            pool = pool[-window:]
        k = int(rng.integers(0, min(max_parents, len(pool)) + 1))
        pa = sorted(str(p) for p in rng.choice(pool, size=k, replace=False)) if k else []
        variables.append((name, domain))
        doms = dict(variables)
        n_rows = product_size(doms[p] for p in pa)
        table = rng.dirichlet(np.ones(size), size=n_rows).reshape(-1)
        cpts[name] = make_factor(pa + [name], [doms[v] for v in pa + [name]], table)
        parents[name] = pa
    return BayesNet(variables, parents, cpts)
