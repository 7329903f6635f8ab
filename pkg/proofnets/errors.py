"""
Exception hierarchy for the proofnets library.
Every failure raised by the library derives from ProofNetError.
"""
from typing import List, Optional, Sequence


class ProofNetError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------- config / io

class ConfigError(ProofNetError):
    """Malformed environment configuration."""


class ParseError(ProofNetError):
    """Input file could not be decoded."""


class SchemaError(ParseError):
    """Input decoded but does not follow the expected JSON schema."""


class FormulaSyntaxError(ParseError):
    """A formula string could not be parsed."""


# -------------------------------------------------------------------- factors

class FactorError(ProofNetError):
    pass


class LengthMismatch(FactorError):
    pass


class NegativeEntry(FactorError):
    pass


class DuplicateVariable(FactorError):
    pass


class DomainMismatch(FactorError):
    pass


class UnknownVariable(FactorError):
    pass


class ValueOutOfRange(FactorError):
    pass


class ZeroMass(FactorError):
    """Total mass is zero; for posteriors this means impossible evidence."""


class RowNotNormalized(FactorError):
    """A CPT row does not sum to one."""

    def __init__(self, message: str, row: Optional[dict] = None, total: float = 0.0):
        super().__init__(message)
        self.row = row or {}
        self.total = total


# ----------------------------------------------------------------------- nets

class NetError(ProofNetError):
    pass


class ArityViolation(NetError):
    pass


class LabelMismatch(NetError):
    def __init__(self, message: str, node: Optional[int] = None):
        super().__init__(message)
        self.node = node


class NotAtomic(NetError):
    pass


class NotMllAtomic(NetError):
    pass


class InternalInconsistency(NetError):
    """Two independent computations of the same property disagree."""


class CycleError(NetError):
    """Base for errors that carry a cycle witness."""

    def __init__(self, message: str, witness: Sequence = ()):
        super().__init__(message)
        self.witness: List = list(witness)


# -------------------------------------------------------------------- rewrite

class StaleRedex(NetError):
    pass


class StepLimitExceeded(NetError):
    pass


class NoSuchConclusion(NetError):
    pass


class NotInternal(NetError):
    pass


# ---------------------------------------------------------------------- bayes

class CycleInDag(CycleError):
    pass


class UnknownParent(ProofNetError):
    pass


class NotBpn(NetError):
    pass


class ValuationMismatch(ProofNetError):
    pass


class MissingValuation(ProofNetError):
    pass


class StateSpaceTooLarge(ProofNetError):
    pass


# ------------------------------------------------------------------ factorize

class NotATree(CycleError):
    pass


class IntraComponentCut(NetError):
    pass


class InvalidPartition(NetError):
    pass


class AtomNotInModule(NetError):
    pass


class OrderIncomplete(ProofNetError):
    pass


class NotNormal(NetError):
    pass


class NonEmptyConclusion(NetError):
    pass


class UnknownWiring(NetError):
    pass


class UnknownAtom(NetError):
    pass


class NotFactorized(NetError):
    pass


class JointreeViolation(ProofNetError):
    pass


# --------------------------------------------------------------------- oracle

class QueryInOrder(ProofNetError):
    pass


class QueryNotInRoot(ProofNetError):
    pass


class InvalidTree(ProofNetError):
    pass
