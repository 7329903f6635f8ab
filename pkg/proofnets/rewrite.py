"""
Reduction and expansion rules on proof-nets, normalization, Hide and Show.

Contractions are n-ary: c.ass flattens a contraction feeding another one,
c.id removes a unary contraction, c.w drops a weakened premise. Rules that
splice two edges into one keep the id of the edge entering the surviving
target, so conclusion ids and ordered premise slots survive rewriting.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from proofnets.errors import (
    NoSuchConclusion,
    NotInternal,
    StaleRedex,
    StepLimitExceeded,
)
from proofnets.formula import Atom, neg, pos
from proofnets.net_core import Net, NodeKind

logger = logging.getLogger(__name__)


class RuleKind(str, Enum):
    AX_CUT = "ax-cut"
    CW = "c.w"
    CASS = "c.ass"
    CID = "c.id"
    TENSOR_PAR = "tensor-par"
    AX_EXPAND = "ax-expand"
    CASS_EXPAND = "c.ass-expand"
    CW_EXPAND = "c.w-expand"
    CID_EXPAND = "c.id-expand"


A_RULES = frozenset({RuleKind.AX_CUT, RuleKind.CW, RuleKind.CASS, RuleKind.CID})
EXPANSIONS = frozenset({RuleKind.AX_EXPAND, RuleKind.CASS_EXPAND, RuleKind.CW_EXPAND, RuleKind.CID_EXPAND})


@dataclass(frozen=True, order=True)
class Redex:
    site: Tuple[int, ...]
    rule: RuleKind

    def __str__(self) -> str:
        return f"{self.rule.value} {' '.join(str(s) for s in self.site)}"


def find_redexes(net: Net) -> List[Redex]:
    """Every occurrence of a reduction left-hand side, ordered by site."""
    found: List[Redex] = []
    for nid in sorted(net.nodes):
        kind = net.kind(nid)
        if kind == NodeKind.AX:
            for eid in net.outputs(nid):
                cut = net.edges[eid].dst
                if cut is None or net.kind(cut) != NodeKind.CUT:
                    continue
                other = [e for e in net.premises(cut) if e != eid]
                if other and net.edges[other[0]].src == nid:
                    continue
                found.append(Redex((nid, cut, eid), RuleKind.AX_CUT))
        elif kind == NodeKind.CONTRACTION:
            premises = net.premises(nid)
            if len(premises) == 1:
                found.append(Redex((nid,), RuleKind.CID))
            for eid in premises:
                src = net.edges[eid].src
                if src is None:
                    continue
                if net.kind(src) == NodeKind.WEAKENING:
                    found.append(Redex((nid, src), RuleKind.CW))
                elif net.kind(src) == NodeKind.CONTRACTION:
                    found.append(Redex((nid, src), RuleKind.CASS))
        elif kind == NodeKind.CUT:
            kinds = {net.kind(net.edges[e].src) for e in net.premises(nid) if net.edges[e].src is not None}
            if kinds == {NodeKind.TENSOR, NodeKind.PAR}:
                found.append(Redex((nid,), RuleKind.TENSOR_PAR))
    return sorted(found)


# ------------------------------------------------------------ reductions

def _ax_cut(net: Net, ax: int, cut: int, a: int) -> None:
    b = [e for e in net.outputs(ax) if e != a][0]
    d = [e for e in net.premises(cut) if e != a][0]
    src = net.edges[d].src
    net.remove_edge(a)
    net.remove_edge(d)
    net.set_src(b, src)
    net.remove_node(ax)
    net.remove_node(cut)


def _cw(net: Net, contraction: int, weakening: int) -> None:
    premise = [e for e in net.premises(contraction) if net.edges[e].src == weakening][0]
    if len(net.premises(contraction)) > 1:
        net.remove_edge(premise)
        net.remove_node(weakening)
        return
    out = net.outputs(contraction)[0]
    net.remove_edge(premise)
    net.set_src(out, weakening)
    net.remove_node(contraction)


def _cass(net: Net, outer: int, inner: int) -> None:
    link = [e for e in net.premises(outer) if net.edges[e].src == inner][0]
    for eid in net.premises(inner):
        net.set_dst(eid, outer)
    net.remove_edge(link)
    net.remove_node(inner)


def _cid(net: Net, contraction: int) -> None:
    premise = net.premises(contraction)[0]
    out = net.outputs(contraction)[0]
    src = net.edges[premise].src
    net.remove_edge(premise)
    net.set_src(out, src)
    net.remove_node(contraction)


def _tensor_par(net: Net, cut: int) -> None:
    by_kind = {net.kind(net.edges[e].src): e for e in net.premises(cut)}
    t_edge, p_edge = by_kind[NodeKind.TENSOR], by_kind[NodeKind.PAR]
    tensor, par = net.edges[t_edge].src, net.edges[p_edge].src
    lefts, rights = net.premises(tensor), net.premises(par)
    for e in (t_edge, p_edge):
        net.remove_edge(e)
    net.remove_node(cut)
    for a, b in zip(lefts, rights):
        new_cut = net.add_node(NodeKind.CUT)
        net.set_dst(a, new_cut)
        net.set_dst(b, new_cut)
    net.remove_node(tensor)
    net.remove_node(par)


# ------------------------------------------------------------ expansions

def _insert_contraction(net: Net, eid: int) -> Tuple[int, int]:
    """Put a unary contraction on a negative edge; the edge keeps its target."""
    edge = net.edges[eid]
    if not isinstance(edge.label, Atom) or edge.label.positive:
        raise StaleRedex(f"cannot insert a contraction on edge {eid} labelled {edge.label}")
    contraction = net.add_node(NodeKind.CONTRACTION)
    upper = net.add_edge(edge.src, contraction, edge.label)
    net.set_src(eid, contraction)
    return contraction, upper


def ax_expand_in_place(net: Net, eid: int) -> Dict[str, int]:
    """
    Split an edge s -> t labelled A into s -> cut <- ax and ax -> t.

    Returns:
        ids of the new axiom ("ax") and cut ("cut"), the edge now leaving s
        ("upper") and the axiom's edge into the cut ("partner")
    """
    if eid not in net.edges:
        raise StaleRedex(f"no edge {eid} to ax-expand")
    edge = net.edges[eid]
    cut = net.add_node(NodeKind.CUT)
    ax = net.add_node(NodeKind.AX)
    upper = net.add_edge(edge.src, cut, edge.label)
    net.set_src(eid, ax)
    partner = net.add_edge(ax, cut, edge.label.dual())
    return {"ax": ax, "cut": cut, "upper": upper, "partner": partner}


def cass_expand_in_place(net: Net, contraction: int, premises: Sequence[int]) -> Dict[str, int]:
    if contraction not in net.nodes or net.kind(contraction) != NodeKind.CONTRACTION:
        raise StaleRedex(f"node {contraction} is not a contraction")
    chosen = sorted(set(premises))
    if not chosen or not set(chosen) <= set(net.premises(contraction)):
        raise StaleRedex(f"edges {list(premises)} are not premises of contraction {contraction}")
    label = net.edges[chosen[0]].label
    inner = net.add_node(NodeKind.CONTRACTION)
    for eid in chosen:
        net.set_dst(eid, inner)
    link = net.add_edge(inner, contraction, label)
    return {"inner": inner, "link": link}


def _cw_expand(net: Net, eid: int) -> Dict[str, int]:
    contraction, upper = _insert_contraction(net, eid)
    weakening = net.add_node(NodeKind.WEAKENING)
    net.add_edge(weakening, contraction, net.edges[eid].label)
    return {"contraction": contraction, "upper": upper, "weakening": weakening}


def _cid_expand(net: Net, eid: int) -> Dict[str, int]:
    if eid not in net.edges:
        raise StaleRedex(f"no edge {eid} to expand")
    contraction, upper = _insert_contraction(net, eid)
    return {"contraction": contraction, "upper": upper}


def ax_expand(net: Net, eid: int) -> Net:
    out = net.copy()
    ax_expand_in_place(out, eid)
    return out


def cass_expand(net: Net, contraction: int, premises: Sequence[int]) -> Net:
    out = net.copy()
    cass_expand_in_place(out, contraction, premises)
    return out


def cw_expand(net: Net, eid: int) -> Net:
    out = net.copy()
    _cw_expand(out, eid)
    return out


def cid_expand(net: Net, eid: int) -> Net:
    out = net.copy()
    _cid_expand(out, eid)
    return out


def apply(net: Net, redex: Redex) -> Net:
    """Rewrite one redex (or expansion site) on a copy of the net."""
    if redex.rule == RuleKind.AX_EXPAND:
        return ax_expand(net, redex.site[0])
    if redex.rule == RuleKind.CASS_EXPAND:
        return cass_expand(net, redex.site[0], redex.site[1:])
    if redex.rule == RuleKind.CW_EXPAND:
        return cw_expand(net, redex.site[0])
    if redex.rule == RuleKind.CID_EXPAND:
        return cid_expand(net, redex.site[0])

    if redex not in find_redexes(net):
        raise StaleRedex(f"redex {redex} is not present")
    out = net.copy()
    if redex.rule == RuleKind.AX_CUT:
        _ax_cut(out, *redex.site)
    elif redex.rule == RuleKind.CW:
        _cw(out, *redex.site)
    elif redex.rule == RuleKind.CASS:
        _cass(out, *redex.site)
    elif redex.rule == RuleKind.CID:
        _cid(out, *redex.site)
    elif redex.rule == RuleKind.TENSOR_PAR:
        _tensor_par(out, *redex.site)
    return out


def step_limit(net: Net) -> int:
    return max(10 * len(net.nodes) ** 2, 10)


def normalize(net: Net, strategy: str = "leftmost", seed: Optional[int] = None) -> Tuple[Net, List[Redex]]:
    """
    Rewrite until no redex remains.

    Args:
        net: a proof-net
        strategy: "leftmost" (lowest site first) or "random"
        seed: seed for the random strategy

    Returns:
        the normal form and the list of applied redexes
    """
    rng = np.random.default_rng(seed) if strategy == "random" else None
    limit = step_limit(net)
    trace: List[Redex] = []
    current = net
    while True:
        redexes = find_redexes(current)
        if not redexes:
            break
        if len(trace) >= limit:
            raise StepLimitExceeded(f"normalization did not finish within {limit} steps")
        redex = redexes[int(rng.integers(len(redexes)))] if rng is not None else redexes[0]
        current = apply(current, redex)
        trace.append(redex)
    logger.debug(f"normalized in {len(trace)} steps")
    return current, trace


def is_normal(net: Net) -> bool:
    return not find_redexes(net)


# ------------------------------------------------------------ hide / show

def _conclusion_edge(net: Net, atom: str) -> int:
    for eid in net.conclusions:
        label = net.edges[eid].label
        if isinstance(label, Atom) and label.positive and label.name == atom:
            return eid
    raise NoSuchConclusion(f"{atom}+ is not a conclusion of the net")


def hide(net: Net, atom: str) -> Net:
    """Cut the conclusion atom+ against a fresh weakening."""
    out = net.copy()
    eid = _conclusion_edge(out, atom)
    cut = out.add_node(NodeKind.CUT)
    weakening = out.add_node(NodeKind.WEAKENING)
    out.set_dst(eid, cut)
    out.add_edge(weakening, cut, neg(atom))
    return out


def hide_all(net: Net) -> Net:
    out = net
    for eid in net.conclusions:
        label = net.edges[eid].label
        if isinstance(label, Atom) and label.positive:
            out = hide(out, label.name)
    return out


def cuts_on(net: Net, atom: str) -> List[int]:
    return [c for c in net.nodes_of(NodeKind.CUT)
            if all(isinstance(net.edges[e].label, Atom) and net.edges[e].label.name == atom
                   for e in net.premises(c))]


def pick_cut(net: Net, atom: str) -> int:
    cuts = cuts_on(net, atom)
    if not cuts:
        raise NotInternal(f"no cut on {atom}")
    box = net.box_of(atom)
    if box is not None:
        target = net.edges[net.positive_output(box)].dst
        if target in cuts:
            return target
    return cuts[0]


def show_in_place(net: Net, atom: str, cut: Optional[int] = None,
                  preserve_weakening: bool = False) -> List[int]:
    """
    De-weaken atom inside net (mutating it).

    Returns:
        ids of the nodes added to the net
    """
    if atom not in net.atoms() or atom in net.conclusion_atoms():
        raise NotInternal(f"{atom} is not an internal atom")
    cut = pick_cut(net, atom) if cut is None else cut
    if cut not in cuts_on(net, atom):
        raise NotInternal(f"node {cut} is not a cut on {atom}")

    premises = net.premises(cut)
    negative = [e for e in premises if not net.edges[e].label.positive][0]
    positive = [e for e in premises if net.edges[e].label.positive][0]
    source = net.edges[negative].src
    added: List[int] = []

    if source is not None and net.kind(source) == NodeKind.WEAKENING and not preserve_weakening:
        net.remove_edge(negative)
        net.remove_node(source)
        net.set_dst(positive, None)
        net.remove_node(cut)
        return added

    if source is not None and net.kind(source) == NodeKind.CONTRACTION:
        contraction = source
    else:
        contraction, _ = _insert_contraction(net, negative)
        added.append(contraction)
    ax = net.add_node(NodeKind.AX)
    net.add_edge(ax, contraction, neg(atom))
    net.add_edge(ax, None, pos(atom))
    added.append(ax)
    return added


def show(net: Net, atom: str, cut: Optional[int] = None, preserve_weakening: bool = False) -> Net:
    """Make the internal atom a positive conclusion again."""
    out = net.copy()
    show_in_place(out, atom, cut, preserve_weakening)
    return out


def format_trace(trace: Sequence[Redex]) -> str:
    return "".join(f"{redex}\n" for redex in trace)
