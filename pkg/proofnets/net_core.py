"""
Proof-structure data model and correctness analyses.

A Net is a directed graph of typed nodes whose edges carry formulas. Edges may
be pending at either end: an edge with no source is a premise of the net, an
edge with no target is a conclusion. Node premises are ordered by ascending
edge id.

The analyses here cover switching acyclicity, the polarized orientation of
atomic nets, connected components and well-labelling of atomic modules,
Bayesian proof-net interface conditions, and bnet(R).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from proofnets.errors import (
    ArityViolation,
    InternalInconsistency,
    LabelMismatch,
    NotAtomic,
    NotMllAtomic,
    SchemaError,
)
from proofnets.formula import Atom, Bottom, Formula, One, Par, Tensor, parse_formula

logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    AX = "ax"
    BOX = "box"
    CUT = "cut"
    TENSOR = "tensor"
    PAR = "par"
    CONTRACTION = "@"
    WEAKENING = "w"
    ONE = "one"
    BOT = "bot"


MLL_MODULE_KINDS = frozenset({NodeKind.AX, NodeKind.CONTRACTION, NodeKind.WEAKENING, NodeKind.CUT})


@dataclass
class Edge:
    id: int
    src: Optional[int]
    dst: Optional[int]
    label: Formula


class Net:
    """
    Mutable graph container. Library operations copy before mutating, so a
    Net handed to an analysis or a rewrite is never changed in place.
    """

    def __init__(self):
        self.nodes: Dict[int, NodeKind] = {}
        self.edges: Dict[int, Edge] = {}
        self._ins: Dict[int, Set[int]] = {}
        self._outs: Dict[int, Set[int]] = {}
        self._order: List[int] = []
        self._next_node = 0
        self._next_edge = 0

    # ------------------------------------------------------------ building

    def add_node(self, kind: NodeKind, node_id: Optional[int] = None) -> int:
        nid = self._next_node if node_id is None else node_id
        if nid in self.nodes:
            raise ArityViolation(f"node id {nid} already used")
        self.nodes[nid] = NodeKind(kind)
        self._ins[nid] = set()
        self._outs[nid] = set()
        self._next_node = max(self._next_node, nid + 1)
        return nid

    def add_edge(self, src: Optional[int], dst: Optional[int], label: Formula,
                 edge_id: Optional[int] = None) -> int:
        eid = self._next_edge if edge_id is None else edge_id
        if eid in self.edges:
            raise ArityViolation(f"edge id {eid} already used")
        for end in (src, dst):
            if end is not None and end not in self.nodes:
                raise ArityViolation(f"edge {eid} refers to unknown node {end}")
        self.edges[eid] = Edge(eid, src, dst, label)
        if src is not None:
            self._outs[src].add(eid)
        if dst is not None:
            self._ins[dst].add(eid)
        else:
            self._order.append(eid)
        self._next_edge = max(self._next_edge, eid + 1)
        return eid

    def set_src(self, eid: int, src: Optional[int]) -> None:
        edge = self.edges[eid]
        if edge.src is not None:
            self._outs[edge.src].discard(eid)
        edge.src = src
        if src is not None:
            self._outs[src].add(eid)

    def set_dst(self, eid: int, dst: Optional[int]) -> None:
        edge = self.edges[eid]
        if edge.dst is not None:
            self._ins[edge.dst].discard(eid)
        edge.dst = dst
        if dst is not None:
            self._ins[dst].add(eid)
        elif eid not in self._order:
            self._order.append(eid)

    def remove_edge(self, eid: int) -> None:
        self.set_src(eid, None)
        edge = self.edges[eid]
        if edge.dst is not None:
            self._ins[edge.dst].discard(eid)
        del self.edges[eid]

    def remove_node(self, nid: int) -> None:
        if self._ins[nid] or self._outs[nid]:
            raise ArityViolation(f"node {nid} still has edges")
        del self.nodes[nid]
        del self._ins[nid]
        del self._outs[nid]

    def copy(self) -> "Net":
        other = Net()
        other.nodes = dict(self.nodes)
        other.edges = {eid: Edge(e.id, e.src, e.dst, e.label) for eid, e in self.edges.items()}
        other._ins = {n: set(s) for n, s in self._ins.items()}
        other._outs = {n: set(s) for n, s in self._outs.items()}
        other._order = list(self._order)
        other._next_node = self._next_node
        other._next_edge = self._next_edge
        return other

    # ------------------------------------------------------------- queries

    def kind(self, nid: int) -> NodeKind:
        return self.nodes[nid]

    def premises(self, nid: int) -> List[int]:
        return sorted(self._ins[nid])

    def outputs(self, nid: int) -> List[int]:
        return sorted(self._outs[nid])

    def incident(self, nid: int) -> List[int]:
        return sorted(self._ins[nid] | self._outs[nid])

    def nodes_of(self, kind: NodeKind) -> List[int]:
        return sorted(n for n, k in self.nodes.items() if k == kind)

    def boxes(self) -> List[int]:
        return self.nodes_of(NodeKind.BOX)

    @property
    def conclusions(self) -> List[int]:
        seen: Set[int] = set()
        ordered = []
        for eid in self._order:
            edge = self.edges.get(eid)
            if edge is not None and edge.dst is None and eid not in seen:
                seen.add(eid)
                ordered.append(eid)
        return ordered

    def set_conclusion_order(self, order: Sequence[int]) -> None:
        self._order = list(order) + [e for e in self._order if e not in set(order)]

    def pending_premises(self) -> List[int]:
        return sorted(eid for eid, e in self.edges.items() if e.src is None)

    def is_atomic(self) -> bool:
        return all(isinstance(e.label, Atom) for e in self.edges.values())

    def atoms(self) -> Set[str]:
        return {e.label.name for e in self.edges.values() if isinstance(e.label, Atom)}

    def conclusion_atoms(self) -> Set[str]:
        return {self.edges[e].label.name for e in self.conclusions if isinstance(self.edges[e].label, Atom)}

    def positive_output(self, box: int) -> int:
        for eid in self.outputs(box):
            label = self.edges[eid].label
            if isinstance(label, Atom) and label.positive:
                return eid
        raise ArityViolation(f"box {box} has no positive conclusion")

    def box_atom(self, box: int) -> str:
        return self.edges[self.positive_output(box)].label.name

    def box_of(self, atom: str) -> Optional[int]:
        for box in self.boxes():
            if self.box_atom(box) == atom:
                return box
        return None

    def __repr__(self) -> str:
        return f"Net(nodes={len(self.nodes)}, edges={len(self.edges)}, conclusions={self.conclusions})"


# ------------------------------------------------------------------- JSON

def net_to_dict(net: Net) -> Dict:
    """Deterministic JSON-ready form (ids ascending)."""
    edges = []
    for eid in sorted(net.edges):
        e = net.edges[eid]
        item = {
            "id": eid,
            "src": "pending" if e.src is None else e.src,
            "dst": "pending" if e.dst is None else e.dst,
        }
        if isinstance(e.label, Atom):
            item["atom"] = e.label.name
            item["pol"] = "+" if e.label.positive else "-"
        else:
            item["label"] = str(e.label)
        edges.append(item)
    return {
        "nodes": [{"id": nid, "kind": net.nodes[nid].value} for nid in sorted(net.nodes)],
        "edges": edges,
        "conclusions": net.conclusions,
    }


def net_from_dict(data: Dict) -> Net:
    try:
        net = Net()
        for node in data["nodes"]:
            net.add_node(NodeKind(node["kind"]), int(node["id"]))
        for item in data["edges"]:
            if "label" in item:
                label = parse_formula(item["label"])
            else:
                if item["pol"] not in ("+", "-"):
                    raise ValueError(f"bad polarity {item['pol']!r}")
                label = Atom(str(item["atom"]), item["pol"] == "+")
            src = None if item["src"] == "pending" else int(item["src"])
            dst = None if item["dst"] == "pending" else int(item["dst"])
            net.add_edge(src, dst, label, int(item["id"]))
        order = [int(e) for e in data.get("conclusions", [])]
        net.set_conclusion_order(order)
        return net
    except (KeyError, TypeError, ValueError, ArityViolation) as e:
        raise SchemaError(f"Error reading net: {str(e)}") from e


# ------------------------------------------------------- structural checks

def check_structure(net: Net) -> None:
    """Validate node arities and the label discipline of every node."""
    for nid in sorted(net.nodes):
        kind = net.nodes[nid]
        ins = [net.edges[e].label for e in net.premises(nid)]
        outs = [net.edges[e].label for e in net.outputs(nid)]

        def arity(n_in, n_out, at_least_in=False, at_least_out=False):
            ok_in = len(ins) >= n_in if at_least_in else len(ins) == n_in
            ok_out = len(outs) >= n_out if at_least_out else len(outs) == n_out
            if not (ok_in and ok_out):
                raise ArityViolation(
                    f"{kind.value}-node {nid} has {len(ins)} premises and {len(outs)} conclusions")

        if kind == NodeKind.AX:
            arity(0, 2)
            if outs[0].dual() != outs[1]:
                raise LabelMismatch(f"axiom {nid} conclusions {outs[0]}, {outs[1]} are not dual", nid)
        elif kind == NodeKind.BOX:
            arity(0, 1, at_least_out=True)
            if not all(isinstance(l, Atom) for l in outs):
                raise LabelMismatch(f"box {nid} has a non-atomic conclusion", nid)
            if sum(1 for l in outs if l.positive) != 1:
                raise LabelMismatch(f"box {nid} must have exactly one positive conclusion", nid)
        elif kind == NodeKind.CUT:
            arity(2, 0)
            if ins[0].dual() != ins[1]:
                raise LabelMismatch(f"cut {nid} premises {ins[0]}, {ins[1]} are not dual", nid)
        elif kind in (NodeKind.TENSOR, NodeKind.PAR):
            arity(2, 1)
            expected = Tensor(ins[0], ins[1]) if kind == NodeKind.TENSOR else Par(ins[0], ins[1])
            if outs[0] != expected:
                raise LabelMismatch(f"{kind.value}-node {nid} concludes {outs[0]}, expected {expected}", nid)
        elif kind == NodeKind.CONTRACTION:
            arity(1, 1, at_least_in=True)
            out = outs[0]
            if not (isinstance(out, Atom) and not out.positive) or any(l != out for l in ins):
                raise LabelMismatch(f"contraction {nid} needs one negative atom on all its edges", nid)
        elif kind == NodeKind.WEAKENING:
            arity(0, 1)
            if not (isinstance(outs[0], Atom) and not outs[0].positive):
                raise LabelMismatch(f"weakening {nid} must conclude a negative atom", nid)
        elif kind == NodeKind.ONE:
            arity(0, 1)
            if outs[0] != One():
                raise LabelMismatch(f"one-node {nid} must conclude 1", nid)
        elif kind == NodeKind.BOT:
            arity(0, 1)
            if outs[0] != Bottom():
                raise LabelMismatch(f"bot-node {nid} must conclude bot", nid)


# --------------------------------------------------- switching acyclicity

def _switching_nodes(net: Net) -> List[int]:
    return [n for n in sorted(net.nodes)
            if net.nodes[n] in (NodeKind.PAR, NodeKind.CONTRACTION) and len(net.premises(n)) >= 2]


def _endpoints(edge: Edge) -> Tuple[Hashable, Hashable]:
    src = edge.src if edge.src is not None else ("pending", edge.id, "src")
    dst = edge.dst if edge.dst is not None else ("pending", edge.id, "dst")
    return src, dst


class _Forest:
    """Union-find that also keeps the spanning forest, for witness paths."""

    def __init__(self):
        self.parent: Dict[Hashable, Hashable] = {}
        self.adj: Dict[Hashable, List[Tuple[Hashable, int]]] = {}

    def find(self, v):
        self.parent.setdefault(v, v)
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def link(self, u, v, eid: int) -> None:
        self.parent[self.find(u)] = self.find(v)
        self.adj.setdefault(u, []).append((v, eid))
        self.adj.setdefault(v, []).append((u, eid))

    def path(self, u, v) -> List[int]:
        if u == v:
            return []
        back = {u: None}
        queue = [u]
        while queue:
            x = queue.pop(0)
            for y, eid in self.adj.get(x, []):
                if y not in back:
                    back[y] = (x, eid)
                    if y == v:
                        queue = []
                        break
                    queue.append(y)
        edges = []
        x = v
        while back[x] is not None:
            x, eid = back[x]
            edges.append(eid)
        return edges[::-1]


def switching_acyclic(net: Net) -> Tuple[bool, List[int]]:
    """
    Decide whether some switching graph of the net contains a cycle.

    Ordinary edges and premise groups whose sources all lie in one block are
    contracted with a union-find; only premise groups that straddle several
    blocks are left for an explicit search.

    Returns:
        (True, []) when correct, else (False, edge ids of one switching cycle)
    """
    forest = _Forest()
    switching = _switching_nodes(net)
    grouped = {eid: n for n in switching for eid in net.premises(n)}

    for eid in sorted(net.edges):
        if eid in grouped:
            continue
        u, v = _endpoints(net.edges[eid])
        forest.find(u)
        forest.find(v)
        if forest.find(u) == forest.find(v):
            return False, [eid] + forest.path(v, u)
        forest.link(u, v, eid)

    pending = list(switching)
    changed = True
    while changed:
        changed = False
        for node in list(pending):
            sources = [(eid, _endpoints(net.edges[eid])[0]) for eid in net.premises(node)]
            for eid, src in sources:
                if forest.find(src) == forest.find(node):
                    return False, [eid] + forest.path(node, src)
            blocks = {forest.find(src) for _, src in sources}
            if len(blocks) == 1:
                eid, src = sources[0]
                forest.link(src, node, eid)
                pending.remove(node)
                changed = True

    # residual premise edges, each (block of node, block of source, group, edge, node, source)
    residual = []
    for node in pending:
        for eid in net.premises(node):
            src = _endpoints(net.edges[eid])[0]
            residual.append((forest.find(node), forest.find(src), node, eid, node, src))
    if not residual:
        return True, []

    incident: Dict[Hashable, List[Tuple]] = {}
    for r in residual:
        incident.setdefault(r[0], []).append(r)
        incident.setdefault(r[1], []).append(r)

    def other(r, block):
        return (r[1], r[5], r[4]) if r[0] == block else (r[0], r[4], r[5])

    def search(start, block, entry, groups, visited, trail):
        for r in incident.get(block, []):
            if r[2] in groups:
                continue
            nxt, arrive, leave = other(r, block)
            step = (entry, leave, r[3], arrive)
            if nxt == start and trail:
                return trail + [step]
            if nxt not in visited:
                found = search(start, nxt, arrive, groups | {r[2]}, visited | {nxt}, trail + [step])
                if found:
                    return found
        return None

    for start in sorted(incident, key=str):
        cycle = search(start, start, None, frozenset(), {start}, [])
        if cycle:
            witness: List[int] = []
            first_entry = cycle[-1][3]
            for i, (entry, leave, eid, _) in enumerate(cycle):
                entry = first_entry if i == 0 else entry
                witness += forest.path(entry, leave)
                witness.append(eid)
            return False, witness
    return True, []


# -------------------------------------------------- polarized orientation

@dataclass
class PolarizedOrder:
    graph: nx.MultiDiGraph
    order: List[Hashable]
    witness: List[int]

    @property
    def acyclic(self) -> bool:
        return not self.witness


def _tail_head(edge: Edge) -> Tuple[Hashable, Hashable]:
    src, dst = _endpoints(edge)
    return (src, dst) if edge.label.positive else (dst, src)


def polarized_orient(net: Net) -> PolarizedOrder:
    """Orient positive edges downwards and negative edges upwards."""
    if not net.is_atomic():
        raise NotAtomic("polarized orientation needs an atomic net")
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(sorted(net.nodes))
    for eid in sorted(net.edges):
        tail, head = _tail_head(net.edges[eid])
        graph.add_edge(tail, head, key=eid)
    try:
        cycle = nx.find_cycle(graph)
        return PolarizedOrder(graph, [], [key for _, _, key in cycle])
    except nx.NetworkXNoCycle:
        return PolarizedOrder(graph, list(nx.lexicographical_topological_sort(graph, key=str)), [])


def initial_edges(net: Net, order: Optional[PolarizedOrder] = None) -> List[int]:
    """Edges whose tail has no incoming edge in the polarized orientation."""
    order = order or polarized_orient(net)
    result = []
    for eid in sorted(net.edges):
        tail, _ = _tail_head(net.edges[eid])
        if order.graph.in_degree(tail) == 0:
            result.append(eid)
    return result


@dataclass
class CorrectnessReport:
    switching_acyclic: bool
    switching_witness: List[int]
    is_atomic: bool
    polarized_dag: Optional[bool] = None
    polarized_witness: List[int] = field(default_factory=list)
    pending_premises: List[int] = field(default_factory=list)

    @property
    def is_proof_net(self) -> bool:
        return self.switching_acyclic and not self.pending_premises

    def to_dict(self) -> Dict:
        return {
            "switching_acyclic": self.switching_acyclic,
            "switching_witness": self.switching_witness,
            "polarized_dag": self.polarized_dag,
            "polarized_witness": self.polarized_witness,
            "is_atomic": self.is_atomic,
            "pending_premises": self.pending_premises,
        }


def check_pre_module(net: Net) -> CorrectnessReport:
    """Validate structure, then run both correctness algorithms."""
    check_structure(net)
    ok, witness = switching_acyclic(net)
    report = CorrectnessReport(ok, witness, net.is_atomic(), pending_premises=net.pending_premises())
    if report.is_atomic:
        polar = polarized_orient(net)
        report.polarized_dag = polar.acyclic
        report.polarized_witness = polar.witness
        if polar.acyclic != ok:
            raise InternalInconsistency(
                f"switching check says {ok} but polarized orientation says {polar.acyclic}")
    return report


# ------------------------------------------------------ atomic MLL modules

@dataclass(frozen=True)
class Component:
    edges: Tuple[int, ...]
    nodes: Tuple[int, ...]
    atom: str
    initial: Tuple[int, ...]


def _require_module(module: Net) -> PolarizedOrder:
    if not module.is_atomic():
        raise NotMllAtomic("module has a non-atomic edge")
    extra = sorted(n for n, k in module.nodes.items() if k not in MLL_MODULE_KINDS)
    if extra:
        raise NotMllAtomic(f"module has nodes outside ax/@/w/cut: {extra}")
    polar = polarized_orient(module)
    if not polar.acyclic:
        raise NotMllAtomic(f"module has a switching cycle through edges {polar.witness}")
    return polar


def connected_components(module: Net) -> List[Component]:
    """Connected components of an atomic box-free module, with their initial edges."""
    polar = _require_module(module)
    graph = nx.Graph()
    for eid in module.edges:
        graph.add_node(("e", eid))
        edge = module.edges[eid]
        for end in (edge.src, edge.dst):
            if end is not None:
                graph.add_edge(("e", eid), ("n", end))
    initial = set(initial_edges(module, polar))

    components = []
    for part in nx.connected_components(graph):
        edges = tuple(sorted(x[1] for x in part if x[0] == "e"))
        nodes = tuple(sorted(x[1] for x in part if x[0] == "n"))
        atoms = {module.edges[e].label.name for e in edges}
        if len(atoms) != 1:
            raise InternalInconsistency(f"component {edges} carries several atoms {sorted(atoms)}")
        components.append(Component(edges, nodes, atoms.pop(), tuple(e for e in edges if e in initial)))
    components.sort(key=lambda c: c.edges)
    return components


@dataclass
class WellLabelling:
    verdict: bool
    same_atom_connected: bool
    components_distinct_atoms: bool
    initial_edges_distinct_atoms: bool
    interface_positives_distinct: bool


def well_labelled(module: Net) -> WellLabelling:
    """Evaluate the four equivalent well-labelling conditions and check they agree."""
    components = connected_components(module)
    where = {e: i for i, c in enumerate(components) for e in c.edges}

    by_atom: Dict[str, Set[int]] = {}
    for eid, edge in module.edges.items():
        by_atom.setdefault(edge.label.name, set()).add(where[eid])
    same_atom_connected = all(len(parts) == 1 for parts in by_atom.values())

    components_distinct = len({c.atom for c in components}) == len(components)

    initial_atoms = [module.edges[e].label.name for c in components for e in c.initial]
    initial_distinct = len(set(initial_atoms)) == len(initial_atoms)

    positives = [module.edges[e].label.name for e in module.pending_premises()
                 if module.edges[e].label.positive]
    positives += [module.edges[e].label.name for e in module.conclusions
                  if not module.edges[e].label.positive]
    interface_distinct = len(set(positives)) == len(positives)

    verdicts = (same_atom_connected, components_distinct, initial_distinct, interface_distinct)
    if len(set(verdicts)) != 1:
        raise InternalInconsistency(f"well-labelling conditions disagree: {verdicts}")
    return WellLabelling(verdicts[0], *verdicts)


# ---------------------------------------------------------- decomposition

@dataclass
class Decomposition:
    boxes: Dict[int, Net]
    module: Net


def nax(net: Net) -> Net:
    """The net with its boxes removed; box conclusions become pending premises."""
    module = net.copy()
    for box in net.boxes():
        for eid in module.outputs(box):
            module.set_src(eid, None)
        module.remove_node(box)
    return module


def decompose(net: Net) -> Decomposition:
    boxes = {}
    for box in net.boxes():
        piece = Net()
        piece.add_node(NodeKind.BOX, box)
        for eid in net.outputs(box):
            piece.add_edge(box, None, net.edges[eid].label, eid)
        boxes[box] = piece
    return Decomposition(boxes, nax(net))


def glue(decomposition: Decomposition) -> Net:
    net = decomposition.module.copy()
    for box, piece in sorted(decomposition.boxes.items()):
        net.add_node(NodeKind.BOX, box)
        for eid in piece.edges:
            net.set_src(eid, box)
    return net


def _as_graph(net: Net) -> nx.MultiDiGraph:
    graph = nx.MultiDiGraph()
    for nid, kind in net.nodes.items():
        graph.add_node(nid, kind=kind.value)
    for eid, edge in net.edges.items():
        src, dst = _endpoints(edge)
        for end in (src, dst):
            if end not in graph:
                graph.add_node(end, kind="pending")
        graph.add_edge(src, dst, label=str(edge.label))
    return graph


def isomorphic(a: Net, b: Net) -> bool:
    """Structural isomorphism ignoring ids (and premise order of contractions)."""
    return nx.is_isomorphic(
        _as_graph(a), _as_graph(b),
        node_match=isomorphism.categorical_node_match("kind", None),
        edge_match=isomorphism.categorical_multiedge_match("label", None),
    )


# -------------------------------------------------------- Bayesian nets

@dataclass
class BpnReport:
    repetition_free_conclusions: bool
    repetition_free_box_interfaces: bool
    unique_positive_per_atom: bool
    violations: List[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            "repetition_free_conclusions": self.repetition_free_conclusions,
            "repetition_free_box_interfaces": self.repetition_free_box_interfaces,
            "unique_positive_per_atom": self.unique_positive_per_atom,
            "violations": self.violations,
        }


def is_bpn(net: Net) -> BpnReport:
    """Check the interface conditions of a Bayesian proof-net."""
    violations: List[str] = []
    if not net.is_atomic():
        return BpnReport(False, False, False, ["net is not atomic"])
    ok, witness = switching_acyclic(net)
    if not ok:
        violations.append(f"switching cycle through edges {witness}")
    if net.pending_premises():
        violations.append(f"pending premises {net.pending_premises()}")

    concl = [net.edges[e].label.name for e in net.conclusions]
    rep_free_concl = len(set(concl)) == len(concl)
    if not rep_free_concl:
        violations.append(f"conclusions repeat an atom: {[str(net.edges[e].label) for e in net.conclusions]}")

    rep_free_boxes = True
    for box in net.boxes():
        names = [net.edges[e].label.name for e in net.outputs(box)]
        if len(set(names)) != len(names):
            rep_free_boxes = False
            violations.append(f"box {box} interface repeats an atom: {names}")

    outputs: Dict[str, int] = {}
    unique_positive = True
    for box in net.boxes():
        atom = net.box_atom(box)
        if atom in outputs:
            unique_positive = False
            violations.append(f"boxes {outputs[atom]} and {box} both output {atom}+")
        outputs[atom] = box
    for eid in net.conclusions:
        label = net.edges[eid].label
        if not label.positive and label.name in outputs:
            unique_positive = False
            violations.append(f"conclusion {label} while box {outputs[label.name]} outputs {label.name}+")

    if rep_free_concl and rep_free_boxes and ok:
        labelled = well_labelled(nax(net)).verdict
        if labelled != unique_positive:
            raise InternalInconsistency(
                f"interface conditions say {unique_positive} but nax well-labelling says {labelled}")

    return BpnReport(rep_free_concl, rep_free_boxes, unique_positive, violations)


@dataclass
class BoxDag:
    """DAG over boxes, vertices named by their positive atom."""
    graph: nx.DiGraph

    def parents(self, atom: str) -> List[str]:
        return sorted(self.graph.predecessors(atom))

    def edges(self) -> List[Tuple[str, str]]:
        return sorted(self.graph.edges())

    def box(self, atom: str) -> int:
        return self.graph.nodes[atom]["box"]


def bnet(net: Net) -> BoxDag:
    """Immediate polarized precedence between boxes (no intervening box)."""
    polar = polarized_orient(net)
    graph = nx.DiGraph()
    names = {box: net.box_atom(box) for box in net.boxes()}
    for box, atom in names.items():
        graph.add_node(atom, box=box)
    for box, atom in names.items():
        seen = {box}
        stack = [box]
        while stack:
            current = stack.pop()
            for _, succ in polar.graph.out_edges(current):
                if succ in seen:
                    continue
                seen.add(succ)
                if succ in names:
                    graph.add_edge(atom, names[succ])
                else:
                    stack.append(succ)
    return BoxDag(graph)


def internal_atoms(net: Net) -> Set[str]:
    return net.atoms() - net.conclusion_atoms()


def atoms_at(net: Net, nodes: Iterable[int]) -> Set[str]:
    """Atoms of all edges incident to the given nodes."""
    result: Set[str] = set()
    for nid in nodes:
        for eid in net.incident(nid):
            label = net.edges[eid].label
            if isinstance(label, Atom):
                result.add(label.name)
    return result
