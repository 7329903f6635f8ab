"""
Discrete factor algebra.

A Factor is a dense nonnegative table over a set of discrete variables. Tables
are numpy arrays with one axis per variable; variables are kept in canonical
(ascending name) order, which in C order means the last variable varies
fastest when the table is flattened.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from proofnets.errors import (
    DomainMismatch,
    DuplicateVariable,
    LengthMismatch,
    NegativeEntry,
    RowNotNormalized,
    UnknownVariable,
    ValueOutOfRange,
    ZeroMass,
)

logger = logging.getLogger(__name__)

Domain = Tuple[str, ...]
Assignment = Dict[str, int]

DEFAULT_CPT_TOL = 1e-9


@dataclass
class CostCounter:
    """Instrumentation shared by the interpreters and the oracles."""
    cells: int = 0
    mul_adds: int = 0
    tables: int = 0
    max_scope: int = 0

    def allocate(self, factor: "Factor", work: int) -> None:
        self.cells += factor.size
        self.mul_adds += work
        self.tables += 1
        self.max_scope = max(self.max_scope, len(factor.vars))


class Factor:
    """Immutable dense factor. Build instances with make_factor()."""

    __slots__ = ("vars", "domains", "table")

    def __init__(self, vars: Tuple[str, ...], domains: Tuple[Domain, ...], table: np.ndarray):
        self.vars = vars
        self.domains = domains
        if not isinstance(table, np.ndarray):
            table = np.asarray(table, dtype=float)
        table.flags.writeable = False
        self.table = table

    @property
    def scope(self) -> frozenset:
        return frozenset(self.vars)

    @property
    def size(self) -> int:
        return int(self.table.size)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(d) for d in self.domains)

    def domain(self, var: str) -> Domain:
        try:
            return self.domains[self.vars.index(var)]
        except ValueError:
            raise UnknownVariable(f"variable {var} is not in factor scope {list(self.vars)}")

    def flat(self) -> List[float]:
        return [float(v) for v in self.table.reshape(-1)]

    def value(self, assignment: Mapping[str, int]) -> float:
        """Entry at an assignment covering (at least) the factor's variables."""
        try:
            index = tuple(assignment[v] for v in self.vars)
        except KeyError as e:
            raise UnknownVariable(f"assignment does not bind {e.args[0]}") from e
        return float(self.table[index])

    def total(self) -> float:
        return float(self.table.sum())

    def __repr__(self) -> str:
        return f"Factor({list(self.vars)}, size={self.size})"


def _check_domain(var: str, domain: Sequence[str]) -> Domain:
    dom = tuple(str(v) for v in domain)
    if not dom or len(set(dom)) != len(dom):
        raise DomainMismatch(f"domain of {var} must be nonempty with distinct labels, got {list(dom)}")
    return dom


def make_factor(vars: Sequence[str], domains: Sequence[Sequence[str]],
                table: Union[Sequence[float], np.ndarray]) -> Factor:
    """
    Create a factor, permuting it to canonical variable order.

    Args:
        vars: variable names, in the order the table is laid out
        domains: one domain per variable, aligned with vars
        table: flat table (last listed variable fastest) or an array of matching shape

    Returns:
        Factor in canonical order
    """
    vars = tuple(str(v) for v in vars)
    if len(set(vars)) != len(vars):
        raise DuplicateVariable(f"duplicate variable in {list(vars)}")
    if len(domains) != len(vars):
        raise LengthMismatch(f"{len(vars)} variables but {len(domains)} domains")
    doms = tuple(_check_domain(v, d) for v, d in zip(vars, domains))
    sizes = tuple(len(d) for d in doms)

    arr = np.asarray(table, dtype=float).reshape(-1)
    expected = int(np.prod(sizes, dtype=np.int64)) if sizes else 1
    if arr.size != expected:
        raise LengthMismatch(f"table has {arr.size} entries, domains of {list(vars)} need {expected}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise NegativeEntry(f"factor over {list(vars)} has a negative or non-finite entry")

    arr = arr.reshape(sizes)
    perm = sorted(range(len(vars)), key=lambda i: vars[i])
    arr = np.ascontiguousarray(np.transpose(arr, perm)) if perm else arr.copy()
    return Factor(tuple(vars[i] for i in perm), tuple(doms[i] for i in perm), arr)


def unit() -> Factor:
    """The empty-scope identity factor."""
    return Factor((), (), np.ones(()))


def ones(domains: Mapping[str, Domain]) -> Factor:
    """Constant-one factor over the given variables."""
    names = sorted(domains)
    return make_factor(names, [domains[n] for n in names], np.ones(int(np.prod([len(domains[n]) for n in names], dtype=np.int64))))


def indicator(var: str, domain: Sequence[str], index: int) -> Factor:
    """0/1 factor selecting one value of var (evidence)."""
    dom = _check_domain(var, domain)
    if not 0 <= index < len(dom):
        raise ValueOutOfRange(f"value index {index} out of range for {var} with {len(dom)} values")
    table = np.zeros(len(dom))
    table[index] = 1.0
    return make_factor([var], [dom], table)


def value_index(var: str, domain: Sequence[str], label: str) -> int:
    try:
        return list(domain).index(label)
    except ValueError:
        raise ValueOutOfRange(f"{label!r} is not a value of {var} (values: {list(domain)})")


def _union(factors: Iterable[Factor]) -> Dict[str, Domain]:
    merged: Dict[str, Domain] = {}
    for f in factors:
        for v, d in zip(f.vars, f.domains):
            known = merged.get(v)
            if known is None:
                merged[v] = d
            elif known != d:
                raise DomainMismatch(f"variable {v} has domains {list(known)} and {list(d)}")
    return merged


def _aligned(f: Factor, union_vars: Tuple[str, ...]) -> np.ndarray:
    # f.vars is a subsequence of union_vars, both sorted
    shape = [1] * len(union_vars)
    for v, d in zip(f.vars, f.domains):
        shape[union_vars.index(v)] = len(d)
    return f.table.reshape(shape)


def multiply(f1: Factor, f2: Factor, counter: Optional[CostCounter] = None) -> Factor:
    """Product of two factors over the union of their scopes."""
    return multiply_all([f1, f2], counter)


def multiply_all(factors: Sequence[Factor], counter: Optional[CostCounter] = None) -> Factor:
    """
    Product of many factors, allocating exactly one table of the union scope.

    Args:
        factors: factors to multiply (shared variables need identical domains)
        counter: optional cost instrumentation

    Returns:
        Factor over the union of the scopes
    """
    factors = list(factors)
    if not factors:
        return unit()
    merged = _union(factors)
    union_vars = tuple(sorted(merged))
    shape = tuple(len(merged[v]) for v in union_vars)

    result = np.ones(shape)
    for f in factors:
        result *= _aligned(f, union_vars)
    out = Factor(union_vars, tuple(merged[v] for v in union_vars), result)
    if counter is not None:
        counter.allocate(out, len(factors) * out.size)
    return out


def sum_out(f: Factor, x: str, counter: Optional[CostCounter] = None) -> Factor:
    """Sum a single variable out of f."""
    if x not in f.vars:
        raise UnknownVariable(f"cannot sum out {x}: not in scope {list(f.vars)}")
    return project(f, [v for v in f.vars if v != x], counter)


def project(f: Factor, keep: Iterable[str], counter: Optional[CostCounter] = None) -> Factor:
    """Marginalize f onto the variables in keep."""
    keep = set(keep)
    unknown = keep - set(f.vars)
    if unknown:
        raise UnknownVariable(f"cannot project onto {sorted(unknown)}: not in scope {list(f.vars)}")
    axes = tuple(i for i, v in enumerate(f.vars) if v not in keep)
    if not axes:
        return f
    table = np.array(f.table.sum(axis=axes), dtype=float)
    out = Factor(tuple(v for v in f.vars if v in keep),
                 tuple(d for v, d in zip(f.vars, f.domains) if v in keep),
                 table)
    if counter is not None:
        counter.allocate(out, f.size)
    return out


def expand(f: Factor, domains: Mapping[str, Domain], counter: Optional[CostCounter] = None) -> Factor:
    """Extend f with constant-one axes for the variables of domains it lacks."""
    missing = {v: d for v, d in domains.items() if v not in f.vars}
    if not missing:
        return f
    return multiply_all([f, ones(missing)], counter)


def validate_cpt(f: Factor, child: str, tol: float = DEFAULT_CPT_TOL) -> None:
    """Check that every row of f, indexed by the parents, sums to one."""
    if child not in f.vars:
        raise UnknownVariable(f"child {child} is not in CPT scope {list(f.vars)}")
    rows = project(f, [v for v in f.vars if v != child])
    flat = rows.table.reshape(-1)
    bad = np.flatnonzero(np.abs(flat - 1.0) > tol)
    if bad.size:
        index = np.unravel_index(int(bad[0]), rows.shape)
        row = {v: d[int(i)] for v, d, i in zip(rows.vars, rows.domains, index)}
        total = float(flat[bad[0]])
        raise RowNotNormalized(f"CPT for {child}: row {row} sums to {total!r}", row=row, total=total)


def condition(f: Factor, evidence: Mapping[str, int]) -> Factor:
    """Slice f at the evidence values, dropping the evidenced variables."""
    if not evidence:
        return f
    index = []
    for v, d in zip(f.vars, f.domains):
        if v in evidence:
            i = evidence[v]
            if not 0 <= i < len(d):
                raise ValueOutOfRange(f"value index {i} out of range for {v} with {len(d)} values")
            index.append(i)
        else:
            index.append(slice(None))
    unknown = set(evidence) - set(f.vars)
    if unknown:
        raise UnknownVariable(f"evidence on {sorted(unknown)} outside scope {list(f.vars)}")
    table = np.array(f.table[tuple(index)], dtype=float)
    kept = [(v, d) for v, d in zip(f.vars, f.domains) if v not in evidence]
    return Factor(tuple(v for v, _ in kept), tuple(d for _, d in kept), table)


def normalize(f: Factor) -> Factor:
    total = f.table.sum()
    if not total > 0.0:
        raise ZeroMass(f"factor over {list(f.vars)} has zero total mass")
    return Factor(f.vars, f.domains, f.table / total)


def max_abs_diff(f1: Factor, f2: Factor) -> float:
    """Largest entrywise difference between two factors on the same scope."""
    if f1.vars != f2.vars or f1.domains != f2.domains:
        raise DomainMismatch(f"cannot compare factors over {list(f1.vars)} and {list(f2.vars)}")
    if f1.size == 0:
        return 0.0
    return float(np.max(np.abs(f1.table - f2.table)))


def by_label(f: Factor) -> Dict[str, float]:
    """Single-variable factor as a value -> number mapping."""
    if len(f.vars) != 1:
        raise DomainMismatch(f"expected a single-variable factor, got {list(f.vars)}")
    return {label: float(p) for label, p in zip(f.domains[0], f.table)}


def to_dict(f: Factor) -> Dict:
    return {
        "vars": list(f.vars),
        "domains": [list(d) for d in f.domains],
        "table": f.flat(),
    }


def product_size(domains: Iterable[Domain]) -> int:
    return reduce(lambda acc, d: acc * len(d), domains, 1)
