"""
Quantitative interpretation of Bayesian proof-nets as factor computations.

interpret_naive multiplies every box CPT and sums out the internal atoms in
one go. interpret_turbo walks a factorized net bottom-up and sums out atoms
as soon as they leave the cut interface of a component, which keeps every
table within the size of a wiring.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

from proofnets.bayes_bridge import Valuation
from proofnets.env_loader import DEFAULT_STATE_CAP
from proofnets.errors import MissingValuation, NotBpn, StateSpaceTooLarge, ValuationMismatch
from proofnets.factorize import FactorizedNet, validate_factorized, width
from proofnets.factors import CostCounter, Factor, expand, multiply_all, ones, product_size, project
from proofnets.net_core import Net, is_bpn

logger = logging.getLogger(__name__)


@dataclass
class CostReport:
    num_components: int
    m_r: int
    width: int
    table_cells_allocated: int
    mul_adds: int
    tables: int
    max_scope: int
    max_clique_states: int
    predicted_bound: int

    def to_dict(self) -> Dict:
        return asdict(self)


def _box_cpt(net: Net, valuation: Valuation, box: int) -> Factor:
    cpt = valuation.cpts.get(box)
    if cpt is None:
        raise MissingValuation(f"no CPT for box {box} ({net.box_atom(box)})")
    expected = {net.edges[e].label.name for e in net.outputs(box)}
    if cpt.scope != expected:
        raise ValuationMismatch(f"CPT of box {box} is over {sorted(cpt.scope)}, box needs {sorted(expected)}")
    return cpt


def _domains(valuation: Valuation, atoms) -> Dict:
    missing = sorted(a for a in atoms if a not in valuation.domains)
    if missing:
        raise MissingValuation(f"no value set for atoms {missing}")
    return {a: valuation.domains[a] for a in atoms}


def interpret_naive(net: Net, valuation: Valuation, cap: int = DEFAULT_STATE_CAP,
                    counter: Optional[CostCounter] = None) -> Factor:
    """
    Product of all box CPTs, projected onto the conclusion atoms.

    Args:
        net: a Bayesian proof-net
        valuation: value sets and box CPTs
        cap: largest joint state space allowed

    Returns:
        Factor over the conclusion atoms
    """
    report = is_bpn(net)
    if not report.ok:
        raise NotBpn(f"not a Bayesian proof-net: {'; '.join(report.violations)}")
    domains = _domains(valuation, net.atoms())
    boxes = sorted(net.boxes(), key=net.box_atom)
    cpts = [_box_cpt(net, valuation, b) for b in boxes]

    scope = set().union(*(c.scope for c in cpts)) if cpts else set()
    size = product_size(domains[a] for a in scope)
    if size > cap:
        raise StateSpaceTooLarge(f"naive product over {len(scope)} atoms has {size} states (cap {cap})")

    conclusions = net.conclusion_atoms()
    total = multiply_all(cpts, counter)
    result = project(total, conclusions & total.scope, counter)
    return expand(result, {a: domains[a] for a in conclusions}, counter)


def interpret_turbo(fnet: FactorizedNet, valuation: Valuation,
                    counter: Optional[CostCounter] = None) -> Factor:
    """
    Factorized interpretation: each wiring allocates one table over all of its
    atoms, the product of its children's messages; a non-root component sends
    that table projected onto its output atoms to its parent.

    The counter sees the wiring tables and the messages. The final read-out
    onto the conclusions is not counted, so the cost of a rerooted net does
    not depend on which wiring is the root.

    Returns:
        Factor over the conclusion atoms, equal to interpret_naive
    """
    validate_factorized(fnet, deep=False)
    net = fnet.net
    domains = _domains(valuation, net.atoms())
    roots = set(fnet.roots)

    results: Dict[str, Factor] = {}
    for cid in fnet.postorder():
        if fnet.is_box(cid):
            cpt = _box_cpt(net, valuation, fnet.box_node(cid))
            results[cid] = project(cpt, [a for a in fnet.output_atoms(cid) if a in cpt.scope])
            continue
        messages = [results.pop(c) for c in fnet.children(cid)]
        covered = set().union(*(m.scope for m in messages))
        missing = {a: domains[a] for a in sorted(fnet.atoms(cid) - covered)}
        if missing:
            messages.append(ones(missing))
        table = multiply_all(messages, counter)
        results[cid] = table if cid in roots else _message(table, fnet.output_atoms(cid), counter)

    conclusions = net.conclusion_atoms()
    parts = [project(results[r], conclusions & results[r].scope) for r in fnet.roots]
    result = parts[0] if len(parts) == 1 else multiply_all(parts)
    return expand(result, {a: domains[a] for a in conclusions})


def _message(table: Factor, outputs, counter: Optional[CostCounter]) -> Factor:
    out = project(table, [a for a in outputs if a in table.scope], counter)
    if out is table and counter is not None:
        counter.allocate(out, table.size)
    return out


def measure_cost(fnet: FactorizedNet, valuation: Valuation) -> CostReport:
    """Run the turbo interpretation with instrumentation and report its cost."""
    counter = CostCounter()
    interpret_turbo(fnet, valuation, counter)
    cliques = [fnet.atoms(c) for c in fnet.wirings()] or [fnet.atoms(c) for c in fnet.boxes()]
    largest = max((product_size(valuation.domains[a] for a in clique) for clique in cliques), default=1)
    m_r = fnet.m_r
    report = CostReport(
        num_components=fnet.num_components,
        m_r=m_r,
        width=width(fnet),
        table_cells_allocated=counter.cells,
        mul_adds=counter.mul_adds,
        tables=counter.tables,
        max_scope=counter.max_scope,
        max_clique_states=largest,
        predicted_bound=max(m_r, 1) * largest,
    )
    logger.debug(f"turbo cost: {report.table_cells_allocated} cells, bound {report.predicted_bound}")
    return report
