"""Exact Bayesian inference on Bayesian proof-nets with boxes."""
from proofnets.bayes_bridge import BayesNet, Valuation, compile_bn, extract_bn
from proofnets.factorize import FactorizedNet, factorize_by_order, marginal_net
from proofnets.factors import Factor, make_factor
from proofnets.interpret import interpret_naive, interpret_turbo
from proofnets.net_core import Net, NodeKind

__all__ = [
    "BayesNet",
    "Factor",
    "FactorizedNet",
    "Net",
    "NodeKind",
    "Valuation",
    "compile_bn",
    "extract_bn",
    "factorize_by_order",
    "interpret_naive",
    "interpret_turbo",
    "make_factor",
    "marginal_net",
]
