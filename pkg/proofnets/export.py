"""
File formats: FactorizedNet JSON and Graphviz DOT renderings of nets, box
DAGs and clique trees.
"""
import json
from typing import Dict, List, Optional

from proofnets.errors import SchemaError
from proofnets.factorize import CliqueTree, FactorizedNet, component_key, validate_factorized
from proofnets.net_core import BoxDag, Net, NodeKind, net_from_dict, net_to_dict

_SHAPES = {
    NodeKind.AX: "point",
    NodeKind.BOX: "box",
    NodeKind.CUT: "diamond",
    NodeKind.CONTRACTION: "circle",
    NodeKind.WEAKENING: "circle",
}


def dumps(data: Dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def fnet_to_dict(fnet: FactorizedNet) -> Dict:
    data = net_to_dict(fnet.net)
    data["tree"] = [
        {
            "id": wid,
            "wiring": sorted(fnet.components[wid]),
            "output_atoms": fnet.output_atoms(wid),
            "children": fnet.children(wid),
        }
        for wid in fnet.wirings()
    ]
    data["roots"] = fnet.roots
    return data


def fnet_from_dict(data: Dict) -> FactorizedNet:
    net = net_from_dict(data)
    try:
        components = {f"b{box}": frozenset({box}) for box in net.boxes()}
        parent: Dict[str, Optional[str]] = {cid: None for cid in components}
        for item in data["tree"]:
            wid = str(item["id"])
            if not wid.startswith("w"):
                raise ValueError(f"wiring id {wid!r} must start with 'w'")
            components[wid] = frozenset(int(n) for n in item["wiring"])
            parent.setdefault(wid, None)
        for item in data["tree"]:
            for child in item["children"]:
                if str(child) not in components:
                    raise ValueError(f"unknown child component {child!r}")
                parent[str(child)] = str(item["id"])
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"Error reading factorized net: {str(e)}") from e
    fnet = FactorizedNet(net, components, parent)
    validate_factorized(fnet)
    return fnet


def is_factorized_doc(data: Dict) -> bool:
    return isinstance(data, dict) and "tree" in data


# -------------------------------------------------------------------- DOT

def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def net_to_dot(net: Net, fnet: Optional[FactorizedNet] = None) -> str:
    """Nodes labelled by kind (boxes by their atoms); edges by formula."""
    lines = ["digraph net {", "    rankdir=TB;"]
    groups: Dict[str, List[int]] = {}
    if fnet is not None:
        for wid in fnet.wirings():
            groups[wid] = sorted(fnet.components[wid])

    def node_line(nid: int) -> str:
        kind = net.kind(nid)
        if kind == NodeKind.BOX:
            label = "box " + " ".join(str(net.edges[e].label) for e in net.outputs(nid))
        else:
            label = f"{kind.value} {nid}"
        return f"    n{nid} [label={_quote(label)} shape={_SHAPES.get(kind, 'ellipse')}];"

    grouped = set()
    for wid, nodes in sorted(groups.items(), key=lambda kv: component_key(kv[0])):
        lines.append(f"    subgraph cluster_{wid} {{")
        lines.append(f"        label={_quote(wid)};")
        for nid in nodes:
            lines.append("    " + node_line(nid))
            grouped.add(nid)
        lines.append("    }")
    for nid in sorted(net.nodes):
        if nid not in grouped:
            lines.append(node_line(nid))

    for eid in sorted(net.edges):
        edge = net.edges[eid]
        src = f"n{edge.src}" if edge.src is not None else f"in{eid}"
        dst = f"n{edge.dst}" if edge.dst is not None else f"out{eid}"
        for end in (src, dst):
            if not end.startswith("n"):
                lines.append(f"    {end} [label=\"\" shape=none];")
        lines.append(f"    {src} -> {dst} [label={_quote(str(edge.label))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def bnet_to_dot(dag: BoxDag) -> str:
    lines = ["digraph bnet {"]
    for atom in sorted(dag.graph.nodes):
        lines.append(f"    {_quote(atom)} [shape=ellipse];")
    for u, v in dag.edges():
        lines.append(f"    {_quote(u)} -> {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cliques_to_dot(ctree: CliqueTree) -> str:
    """Cliques as record nodes, separators as edge labels."""
    lines = ["graph cliques {", "    node [shape=record];"]
    for cid in sorted(ctree.cliques):
        atoms = "|".join(sorted(ctree.cliques[cid]))
        lines.append(f"    {_quote(cid)} [label={_quote('{' + cid + '|' + atoms + '}')}];")
    for a, b in sorted(tuple(sorted(e)) for e in ctree.tree.edges()):
        sep = ",".join(sorted(ctree.separator(a, b)))
        lines.append(f"    {_quote(a)} -- {_quote(b)} [label={_quote(sep)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
