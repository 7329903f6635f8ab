"""
Cut-nets and factorized forms of Bayesian proof-nets.

A factorized net partitions a bpn into components joined by cuts: one
component per box (the leaves) and cut-free wirings above them. Components
are named "b<box node id>" and "w<k>". The correction graph of the partition
is a forest; each of its trees is rooted at the component that carries the
conclusions, so the turbo interpretation can run bottom-up.

factorize_by_order builds such a form from an elimination order. The working
state is a set of units (already factorized sub-nets, each a tree of
components) plus the wiring module M left between them. Eliminating an atom Z
selects the units that have a Z conclusion, moves the part of M they touch
into a fresh wiring (splitting contractions and ax-expanding the edges that
cross the new boundary) and puts that wiring on top of the selected units.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from proofnets.errors import (
    AtomNotInModule,
    IntraComponentCut,
    InternalInconsistency,
    InvalidPartition,
    InvalidTree,
    JointreeViolation,
    NonEmptyConclusion,
    NotATree,
    NotBpn,
    NotFactorized,
    NotNormal,
    OrderIncomplete,
    UnknownAtom,
    UnknownWiring,
)
from proofnets.formula import Atom
from proofnets.net_core import (
    Net,
    NodeKind,
    atoms_at,
    check_structure,
    is_bpn,
    well_labelled,
)
from proofnets.rewrite import (
    ax_expand_in_place,
    cass_expand_in_place,
    find_redexes,
    is_normal,
    pick_cut,
    show_in_place,
)

logger = logging.getLogger(__name__)


def component_key(cid: str) -> Tuple[str, int]:
    return cid[0], int(cid[1:])


def subnet(net: Net, nodes: Iterable[int]) -> Net:
    """The sub-net on the given nodes; edges leaving them become pending."""
    nodes = set(nodes)
    part = Net()
    for nid in sorted(nodes):
        part.add_node(net.kind(nid), nid)
    for eid in sorted(net.edges):
        edge = net.edges[eid]
        if edge.src in nodes or edge.dst in nodes:
            part.add_edge(edge.src if edge.src in nodes else None,
                          edge.dst if edge.dst in nodes else None,
                          edge.label, eid)
    return part


def _cut_atom(net: Net, cut: int) -> str:
    return net.edges[net.premises(cut)[0]].label.name


# ---------------------------------------------------------------- cut-nets

@dataclass
class CutNet:
    net: Net
    components: List[FrozenSet[int]]
    cut_pairs: List[Tuple[int, int, int]]
    correction_graph: nx.Graph

    @property
    def is_tree(self) -> bool:
        return nx.is_tree(self.correction_graph)


def as_cutnet(net: Net, partition: Sequence[Iterable[int]]) -> CutNet:
    """
    Validate a partition of a net into components joined by cuts.

    Cut nodes left out of every part are the joining cuts; a cut listed
    inside a part is internal to it and both its premises must come from
    that part.

    Args:
        net: the net to partition
        partition: node sets covering every non-cut node exactly once

    Returns:
        CutNet whose correction graph links two components when a cut joins them
    """
    parts = [frozenset(p) for p in partition]
    owner: Dict[int, int] = {}
    for i, part in enumerate(parts):
        for nid in sorted(part):
            if nid not in net.nodes:
                raise InvalidPartition(f"part {i} names unknown node {nid}")
            if nid in owner:
                raise InvalidPartition(f"node {nid} is in parts {owner[nid]} and {i}")
            owner[nid] = i
    missing = [n for n in sorted(net.nodes) if n not in owner and net.kind(n) != NodeKind.CUT]
    if missing:
        raise InvalidPartition(f"nodes {missing} are in no part")

    for eid in sorted(net.edges):
        edge = net.edges[eid]
        if edge.src in owner and edge.dst in owner and owner[edge.src] != owner[edge.dst]:
            raise InvalidPartition(f"edge {eid} joins parts {owner[edge.src]} and {owner[edge.dst]} without a cut")

    graph = nx.Graph()
    graph.add_nodes_from(range(len(parts)))
    pairs: List[Tuple[int, int, int]] = []
    for cut in net.nodes_of(NodeKind.CUT):
        if cut in owner:
            continue
        sources = [net.edges[e].src for e in net.premises(cut)]
        if any(s is None for s in sources):
            raise InvalidPartition(f"cut {cut} has a pending premise")
        i, j = owner[sources[0]], owner[sources[1]]
        if i == j:
            raise IntraComponentCut(f"cut {cut} joins part {i} to itself")
        pairs.append((cut, i, j))
        if graph.has_edge(i, j):
            graph[i][j]["cuts"].append(cut)
        else:
            graph.add_edge(i, j, cuts=[cut])

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return CutNet(net, parts, pairs, graph)
    witness = [graph[u][v]["cuts"][0] for u, v in cycle]
    raise NotATree(f"correction graph has a cycle through cuts {witness}", witness)


# ---------------------------------------------------------- factorized nets

@dataclass
class FactorizedNet:
    """A bpn partitioned into box leaves and wirings, as a rooted forest."""
    net: Net
    components: Dict[str, FrozenSet[int]]
    parent: Dict[str, Optional[str]]
    _owner: Dict[int, str] = field(init=False, repr=False, compare=False)
    _cut_owners: Dict[int, FrozenSet[str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._owner = {}
        for cid in sorted(self.components, key=component_key):
            for nid in self.components[cid]:
                if nid in self._owner:
                    raise NotFactorized(f"node {nid} is in components {self._owner[nid]} and {cid}")
                self._owner[nid] = cid
        self._cut_owners = {}
        for cut in self.net.nodes_of(NodeKind.CUT):
            if cut in self._owner:
                continue
            self._cut_owners[cut] = frozenset(self._owner.get(self.net.edges[e].src)
                                              for e in self.net.premises(cut))

    def owner(self, nid: int) -> Optional[str]:
        return self._owner.get(nid)

    def is_box(self, cid: str) -> bool:
        return cid.startswith("b")

    def box_node(self, cid: str) -> int:
        return int(cid[1:])

    def boxes(self) -> List[str]:
        return sorted((c for c in self.components if self.is_box(c)), key=component_key)

    def wirings(self) -> List[str]:
        return sorted((c for c in self.components if not self.is_box(c)), key=component_key)

    @property
    def roots(self) -> List[str]:
        return sorted((c for c, p in self.parent.items() if p is None), key=component_key)

    def children(self, cid: str) -> List[str]:
        return sorted((c for c, p in self.parent.items() if p == cid), key=component_key)

    def subtree(self, cid: str) -> List[str]:
        result, stack = [], [cid]
        while stack:
            current = stack.pop()
            result.append(current)
            stack.extend(self.children(current))
        return result

    def postorder(self) -> List[str]:
        order: List[str] = []
        for root in self.roots:
            stack = [(root, False)]
            while stack:
                cid, done = stack.pop()
                if done:
                    order.append(cid)
                    continue
                stack.append((cid, True))
                for child in reversed(self.children(cid)):
                    stack.append((child, False))
        return order

    def atoms(self, cid: str) -> Set[str]:
        return atoms_at(self.net, self.components[cid])

    def interface_cuts(self, cid: str) -> List[int]:
        """Cuts joining a component to its parent."""
        up = self.parent.get(cid)
        if up is None:
            return []
        pair = frozenset((cid, up))
        return sorted(c for c, owners in self._cut_owners.items() if owners == pair)

    def interface_atoms(self, cid: str) -> List[str]:
        return sorted({_cut_atom(self.net, c) for c in self.interface_cuts(cid)})

    def conclusion_atoms(self, cid: str) -> Set[str]:
        """Atoms of the net conclusions leaving the component."""
        nodes = self.components[cid]
        return {self.net.edges[e].label.name for e in self.net.conclusions if self.net.edges[e].src in nodes}

    def output_atoms(self, cid: str) -> List[str]:
        """Interface atoms with the parent plus the conclusions carried by the subtree."""
        atoms = set(self.interface_atoms(cid))
        for sub in self.subtree(cid):
            atoms |= self.conclusion_atoms(sub)
        return sorted(atoms)

    @property
    def num_components(self) -> int:
        return len(self.components)

    @property
    def m_r(self) -> int:
        return len(self.components) - 1


def validate_factorized(fnet: FactorizedNet, deep: bool = True) -> None:
    """
    Check that a FactorizedNet describes a valid factorized form.

    Args:
        fnet: the factorized net
        deep: also check that every wiring is a well-labelled atomic module
    """
    net = fnet.net
    for cid, nodes in fnet.components.items():
        if fnet.is_box(cid):
            if nodes != {fnet.box_node(cid)} or net.nodes.get(fnet.box_node(cid)) != NodeKind.BOX:
                raise NotFactorized(f"component {cid} is not a single box")
            if fnet.children(cid):
                raise NotFactorized(f"box component {cid} has children")
        elif any(net.kind(n) == NodeKind.BOX for n in nodes):
            raise NotFactorized(f"wiring {cid} contains a box")
    for box in net.boxes():
        if fnet.owner(box) != f"b{box}":
            raise NotFactorized(f"box {box} is not its own component")
    for cid, up in fnet.parent.items():
        if cid not in fnet.components or (up is not None and up not in fnet.components):
            raise NotFactorized(f"tree edge {cid} -> {up} names an unknown component")

    partition = [fnet.components[c] for c in sorted(fnet.components, key=component_key)]
    names = sorted(fnet.components, key=component_key)
    try:
        cutnet = as_cutnet(net, partition)
    except (InvalidPartition, IntraComponentCut, NotATree) as e:
        raise NotFactorized(f"components do not form a cut-net: {str(e)}") from e
    actual = {frozenset((names[u], names[v])) for u, v in cutnet.correction_graph.edges()}
    declared = {frozenset((c, p)) for c, p in fnet.parent.items() if p is not None}
    if actual != declared:
        raise NotFactorized(f"tree edges {sorted(map(sorted, declared))} differ from the correction graph")
    if len(fnet.parent) != len(fnet.components):
        raise NotFactorized("every component needs a parent entry")

    if deep:
        for cid in fnet.wirings():
            part = subnet(net, fnet.components[cid])
            if not well_labelled(part).verdict:
                raise NotFactorized(f"wiring {cid} is not well-labelled")


def _single_box(net: Net) -> Optional[FactorizedNet]:
    boxes = net.boxes()
    if len(boxes) == 1 and len(net.nodes) == 1:
        cid = f"b{boxes[0]}"
        return FactorizedNet(net.copy(), {cid: frozenset(boxes)}, {cid: None})
    return None


def trivial_factorization(net: Net) -> FactorizedNet:
    """
    One root wiring holding everything but the boxes, with every box as a leaf.

    Box conclusions that are pending or that do not enter a cut are
    ax-expanded, as are negative box conclusions cut directly against
    another box.
    """
    check_structure(net)
    report = is_bpn(net)
    if not report.ok:
        raise NotBpn(f"not a Bayesian proof-net: {'; '.join(report.violations)}")
    single = _single_box(net)
    if single is not None:
        return single

    out = net.copy()
    boxes = out.boxes()
    for box in boxes:
        for eid in out.outputs(box):
            edge = out.edges[eid]
            if edge.dst is None or out.kind(edge.dst) != NodeKind.CUT:
                ax_expand_in_place(out, eid)
                continue
            other = [e for e in out.premises(edge.dst) if e != eid][0]
            src = out.edges[other].src
            if src is not None and out.kind(src) == NodeKind.BOX and not edge.label.positive:
                ax_expand_in_place(out, eid)

    box_set = set(boxes)
    wiring = set()
    for nid in out.nodes:
        if nid in box_set:
            continue
        if out.kind(nid) == NodeKind.CUT and any(out.edges[e].src in box_set for e in out.premises(nid)):
            continue
        wiring.add(nid)

    components = {f"b{b}": frozenset({b}) for b in boxes}
    parent: Dict[str, Optional[str]] = {f"b{b}": "w0" for b in boxes}
    components["w0"] = frozenset(wiring)
    parent["w0"] = None
    fnet = FactorizedNet(out, components, parent)
    validate_factorized(fnet, deep=False)
    return fnet


# ------------------------------------------------------------- elimination

@dataclass
class EliminationState:
    """Units built so far (a forest of components) and the module M between them."""
    net: Net
    components: Dict[str, FrozenSet[int]]
    parent: Dict[str, Optional[str]]
    processed: List[str] = field(default_factory=list)
    next_wiring: int = 0

    def copy(self) -> "EliminationState":
        return EliminationState(self.net.copy(), dict(self.components), dict(self.parent),
                                list(self.processed), self.next_wiring)

    def top(self, cid: str) -> str:
        while self.parent[cid] is not None:
            cid = self.parent[cid]
        return cid

    def units(self) -> Dict[int, str]:
        """Node id -> top component of the unit containing it."""
        tops = {cid: self.top(cid) for cid in self.components}
        return {nid: tops[cid] for cid, nodes in self.components.items() for nid in nodes}

    def module_nodes(self, unit_of: Optional[Mapping[int, str]] = None) -> Set[int]:
        unit_of = self.units() if unit_of is None else unit_of
        module = set()
        for nid in self.net.nodes:
            if nid in unit_of:
                continue
            if self.net.kind(nid) == NodeKind.CUT:
                owners = {unit_of.get(self.net.edges[e].src) for e in self.net.premises(nid)}
                if len(owners) == 1 and None not in owners:
                    continue
            module.add(nid)
        return module

    def module_atoms(self) -> Set[str]:
        return atoms_at(self.net, self.module_nodes())

    def factorized(self) -> FactorizedNet:
        return FactorizedNet(self.net, dict(self.components), dict(self.parent))


def initial_state(net: Net) -> EliminationState:
    """Every box is a unit of its own; everything else is the module."""
    boxes = net.boxes()
    return EliminationState(net.copy(), {f"b{b}": frozenset({b}) for b in boxes},
                            {f"b{b}": None for b in boxes})


def _unit_conclusions(net: Net, unit_of: Mapping[int, str], module: Set[int]) -> Dict[str, List[int]]:
    result: Dict[str, List[int]] = {}
    for eid in sorted(net.edges):
        edge = net.edges[eid]
        if edge.src in unit_of and (edge.dst is None or edge.dst in module):
            result.setdefault(unit_of[edge.src], []).append(eid)
    return result


def _positive_boundary(net: Net, unit_of: Mapping[int, str], module: Set[int], atom: str) -> Optional[int]:
    for eid in sorted(net.edges):
        edge = net.edges[eid]
        if (edge.label == Atom(atom, True) and edge.src in unit_of
                and (edge.dst is None or edge.dst in module)):
            return eid
    return None


def _complete_atom(net: Net, unit_of: Mapping[int, str], module: Set[int], atom: str,
                   selected: Set[str], wiring: Set[int]) -> None:
    """Move the module structure of one atom of the selected interface into the wiring."""
    positive = _positive_boundary(net, unit_of, module, atom)
    if positive is None:
        raise InternalInconsistency(f"{atom}+ is not a conclusion of any unit")
    inside = unit_of[net.edges[positive].src] in selected

    def expand(eid: int) -> None:
        wiring.add(ax_expand_in_place(net, eid)["ax"])

    cut = net.edges[positive].dst
    if cut is None:
        if inside:
            expand(positive)
        return
    negative = [e for e in net.premises(cut) if e != positive][0]
    source = net.edges[negative].src
    kind = net.kind(source)

    if source in unit_of:
        # a unit already owns the negative side
        consumer = unit_of[source]
        if not inside and consumer not in selected:
            return
        if inside and consumer not in selected:
            expand(positive)
        else:
            expand(negative)
        return
    if kind == NodeKind.WEAKENING:
        if inside:
            wiring.add(source)
        return
    if kind != NodeKind.CONTRACTION:
        consumer = unit_of.get(source)
        if inside and consumer not in selected:
            expand(positive)
        else:
            expand(negative)
        return

    premises = net.premises(source)
    chosen = [e for e in premises if unit_of.get(net.edges[e].src) in selected]
    others = [e for e in premises if e not in chosen]
    if not others:
        wiring.add(source)
        for eid in premises:
            expand(eid)
    elif inside:
        if not chosen:
            expand(positive)
            return
        if len(others) >= 2:
            cass_expand_in_place(net, source, others)
        wiring.add(source)
        for eid in net.premises(source):
            expand(eid)
    elif len(chosen) >= 2:
        split = cass_expand_in_place(net, source, chosen)
        wiring.add(split["inner"])
        for eid in chosen:
            expand(eid)
    elif chosen:
        expand(chosen[0])


def _eliminate_in_place(state: EliminationState, atom: str) -> None:
    net = state.net
    unit_of = state.units()
    module = state.module_nodes(unit_of)
    if atom not in atoms_at(net, module):
        raise AtomNotInModule(f"{atom} does not occur in the wiring module")

    conclusions = _unit_conclusions(net, unit_of, module)
    selected = {top for top, edges in conclusions.items()
                if any(net.edges[e].label.name == atom for e in edges)}
    interface = sorted({net.edges[e].label.name for top in selected for e in conclusions[top]})

    wiring: Set[int] = set()
    for x in interface:
        _complete_atom(net, unit_of, module, x, selected, wiring)

    wid = f"w{state.next_wiring}"
    state.next_wiring += 1
    state.components[wid] = frozenset(wiring)
    state.parent[wid] = None
    for top in selected:
        state.parent[top] = wid
    state.processed.append(atom)
    logger.debug(f"eliminated {atom}: wiring {wid} over {sorted(atoms_at(net, wiring))} "
                 f"above {sorted(selected, key=component_key)}")


def eliminate_atom(state: EliminationState, atom: str) -> EliminationState:
    """One elimination step on a copy of the state."""
    out = state.copy()
    _eliminate_in_place(out, atom)
    return out


def check_invariants(state: EliminationState) -> None:
    """
    Verify the state invariants: units are factorized, M is a normal wiring
    module, and processed atoms no longer occur in M.
    """
    net = state.net
    unit_of = state.units()
    module = state.module_nodes(unit_of)

    owner = {nid: cid for cid, nodes in state.components.items() for nid in nodes}
    declared = {frozenset((c, p)) for c, p in state.parent.items() if p is not None}
    actual = set()
    for cut in net.nodes_of(NodeKind.CUT):
        if cut in module:
            continue
        owners = frozenset(owner.get(net.edges[e].src) for e in net.premises(cut))
        if len(owners) != 2:
            raise InternalInconsistency(f"cut {cut} lies inside one component")
        actual.add(owners)
    if actual != declared:
        raise InternalInconsistency("unit trees differ from their correction graphs")
    for cid, nodes in state.components.items():
        if cid.startswith("w"):
            if any(net.kind(n) not in (NodeKind.AX, NodeKind.CONTRACTION, NodeKind.WEAKENING) for n in nodes):
                raise InternalInconsistency(f"wiring {cid} has a node outside ax/@/w")
            if not well_labelled(subnet(net, nodes)).verdict:
                raise InternalInconsistency(f"wiring {cid} is not well-labelled")

    part = subnet(net, module)
    if any(k not in (NodeKind.CONTRACTION, NodeKind.WEAKENING, NodeKind.CUT) for k in part.nodes.values()):
        raise InternalInconsistency("module has a node outside @/w/cut")
    if find_redexes(part):
        raise InternalInconsistency(f"module is not normal: {[str(r) for r in find_redexes(part)]}")

    left = set(state.processed) & atoms_at(net, module)
    if left:
        raise InternalInconsistency(f"processed atoms {sorted(left)} still occur in the module")


def _check_order(net: Net, order: Sequence[str]) -> None:
    atoms = net.atoms()
    seen = list(order)
    unknown = sorted(set(seen) - atoms)
    missing = sorted(atoms - set(seen))
    if unknown or missing or len(set(seen)) != len(seen):
        raise OrderIncomplete(f"order must list every atom once (unknown {unknown}, missing {missing})")


def factorize_by_order(net: Net, order: Sequence[str], check: bool = False) -> FactorizedNet:
    """
    Factorized form of a normal bpn induced by an elimination order.

    Args:
        net: normal bpn whose conclusions, if any, are positive box outputs
        order: a permutation of the atoms of the net
        check: verify the state invariants after every step

    Returns:
        FactorizedNet with at most 2n components for n atoms
    """
    check_structure(net)
    report = is_bpn(net)
    if not report.ok:
        raise NotBpn(f"not a Bayesian proof-net: {'; '.join(report.violations)}")
    if not is_normal(net):
        raise NotNormal("factorize_by_order needs a net in normal form")
    for eid in net.conclusions:
        edge = net.edges[eid]
        if not edge.label.positive or edge.src is None or net.kind(edge.src) != NodeKind.BOX:
            raise NonEmptyConclusion(f"conclusion {edge.label} (edge {eid}) is not a positive box output")
    _check_order(net, order)

    state = initial_state(net)
    for atom in order:
        if atom not in state.module_atoms():
            logger.debug(f"skipping {atom}: no longer in the module")
            state.processed.append(atom)
            continue
        _eliminate_in_place(state, atom)
        if check:
            check_invariants(state)

    leftover = state.module_nodes()
    if leftover:
        raise InternalInconsistency(f"module still holds nodes {sorted(leftover)} after the full order")
    fnet = state.factorized()
    logger.debug(f"factorized into {len(fnet.boxes())} boxes and {len(fnet.wirings())} wirings")
    return fnet


# ------------------------------------------------------- roots and marginals

def _forest(fnet: FactorizedNet) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(fnet.components)
    graph.add_edges_from((c, p) for c, p in fnet.parent.items() if p is not None)
    return graph


def reroot(fnet: FactorizedNet, wiring_id: str) -> FactorizedNet:
    """Re-express the tree containing a wiring with that wiring as its root."""
    if wiring_id not in fnet.components or fnet.is_box(wiring_id):
        raise UnknownWiring(f"{wiring_id} is not a wiring of the factorized net")
    parent = dict(fnet.parent)
    parent[wiring_id] = None
    for u, v in nx.bfs_edges(_forest(fnet), wiring_id):
        parent[v] = u
    return FactorizedNet(fnet.net.copy(), dict(fnet.components), parent)


def marginal_net(fnet: FactorizedNet, atoms: Union[str, Sequence[str]]) -> FactorizedNet:
    """
    Factorized net whose conclusions are the given atoms, all positive: each
    atom is shown inside the wiring that consumes its cut, and the wiring of
    the first atom becomes the root.
    """
    names = [atoms] if isinstance(atoms, str) else list(dict.fromkeys(atoms))
    if not names:
        raise UnknownAtom("marginal_net needs at least one atom")
    for atom in names:
        if atom not in fnet.net.atoms():
            raise UnknownAtom(f"{atom} is not an atom of the net")
    if fnet.net.conclusions:
        raise NonEmptyConclusion("marginal_net needs an empty-conclusion factorized net")
    net = fnet.net.copy()
    components = dict(fnet.components)
    homes: List[str] = []
    for atom in names:
        cut = pick_cut(net, atom)
        negative = [e for e in net.premises(cut) if not net.edges[e].label.positive][0]
        home = fnet.owner(net.edges[negative].src)
        if home is None or fnet.is_box(home):
            raise NotFactorized(f"cut {cut} on {atom} is not fed by a wiring")
        added = show_in_place(net, atom, cut, preserve_weakening=True)
        components[home] = components[home] | frozenset(added)
        homes.append(home)
    return reroot(FactorizedNet(net, components, dict(fnet.parent)), homes[0])


def width(fnet: FactorizedNet) -> int:
    """Largest wiring atom count minus one; 0 when there is no wiring."""
    sizes = [len(fnet.atoms(w)) for w in fnet.wirings()]
    return max(sizes) - 1 if sizes else 0


# ------------------------------------------------------------ clique trees

@dataclass
class CliqueTree:
    tree: nx.Graph
    cliques: Dict[str, FrozenSet[str]]
    separators: Dict[FrozenSet[str], FrozenSet[str]]
    assignment: Dict[str, str]

    def separator(self, a: str, b: str) -> FrozenSet[str]:
        return self.separators[frozenset((a, b))]

    @property
    def width(self) -> int:
        return max((len(c) for c in self.cliques.values()), default=1) - 1

    def to_dict(self) -> Dict:
        return {
            "cliques": {cid: sorted(c) for cid, c in sorted(self.cliques.items())},
            "edges": [
                {"between": sorted(pair), "separator": sorted(sep)}
                for pair, sep in sorted(self.separators.items(), key=lambda kv: sorted(kv[0]))
            ],
            "assignment": dict(sorted(self.assignment.items())),
        }

    def verify(self, families: Mapping[str, Iterable[str]]) -> None:
        """
        Check the tree shape, separators, family preservation and the
        jointree property.

        Args:
            families: variable -> its family {X} ∪ Pa(X)
        """
        if not self.cliques or not nx.is_tree(self.tree) or set(self.tree.nodes) != set(self.cliques):
            raise InvalidTree("clique graph is not a tree over the cliques")
        for a, b in self.tree.edges():
            sep = self.separators.get(frozenset((a, b)))
            if sep is None or sep != self.cliques[a] & self.cliques[b]:
                raise JointreeViolation(f"separator of {a}-{b} is not the clique intersection")
        for var, family in families.items():
            home = self.assignment.get(var)
            if home not in self.cliques:
                raise InvalidTree(f"CPT of {var} is not assigned to a clique")
            if not set(family) <= self.cliques[home]:
                raise JointreeViolation(f"family of {var} is not inside clique {home}")
        for var in set().union(*self.cliques.values()):
            holding = [c for c, vs in self.cliques.items() if var in vs]
            if not nx.is_connected(self.tree.subgraph(holding)):
                raise JointreeViolation(f"cliques holding {var} are not connected: {sorted(holding)}")


def clique_tree_of(fnet: FactorizedNet) -> CliqueTree:
    """Clique tree of the wirings: C_i = At(D_i), CPTs assigned to the parent wiring."""
    tree = nx.Graph()
    cliques: Dict[str, FrozenSet[str]] = {}
    separators: Dict[FrozenSet[str], FrozenSet[str]] = {}
    assignment: Dict[str, str] = {}
    families: Dict[str, FrozenSet[str]] = {}

    for cid in fnet.wirings():
        tree.add_node(cid)
        cliques[cid] = frozenset(fnet.atoms(cid))
    for cid in fnet.boxes():
        home = fnet.parent[cid]
        if home is None:
            home = cid
            tree.add_node(cid)
            cliques[cid] = frozenset(fnet.atoms(cid))
        atom = fnet.net.box_atom(fnet.box_node(cid))
        assignment[atom] = home
        families[atom] = frozenset(fnet.atoms(cid))

    for cid in fnet.wirings():
        up = fnet.parent[cid]
        if up is None:
            continue
        declared = frozenset(fnet.interface_atoms(cid))
        if declared != cliques[cid] & cliques[up]:
            raise JointreeViolation(
                f"cut interface {sorted(declared)} of {cid}-{up} is not the clique intersection "
                f"{sorted(cliques[cid] & cliques[up])}")
        tree.add_edge(cid, up)
        separators[frozenset((cid, up))] = declared

    roots = [r for r in fnet.roots if r in cliques]
    for a, b in zip(roots, roots[1:]):
        tree.add_edge(a, b)
        separators[frozenset((a, b))] = frozenset()

    ctree = CliqueTree(tree, cliques, separators, assignment)
    try:
        ctree.verify(families)
    except InvalidTree as e:
        raise JointreeViolation(str(e)) from e
    return ctree
