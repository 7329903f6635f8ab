"""
Command-line front end: check, compile, normalize, factorize, marginal,
export-dot and sample.

Exit codes: 0 success (for check: a valid bpn), 1 library error or a valid
net that is not a bpn, 2 structurally invalid net, 3 unreadable input.
Machine-readable JSON goes to stdout; notes and errors go to stderr through
logging.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from proofnets.bayes_bridge import (
    BayesNet,
    Valuation,
    apply_evidence,
    bn_from_dict,
    compile_bn,
    evidence_bn,
    extract_bn,
    valuation_from_dict,
    valuation_to_dict,
)
from proofnets.env_loader import load_env_vars
from proofnets.errors import (
    ArityViolation,
    ConfigError,
    LabelMismatch,
    MissingValuation,
    ParseError,
    ProofNetError,
    UnknownVariable,
)
from proofnets.export import (
    bnet_to_dot,
    cliques_to_dot,
    dumps,
    fnet_from_dict,
    fnet_to_dict,
    is_factorized_doc,
    net_to_dot,
)
from proofnets.factorize import (
    FactorizedNet,
    clique_tree_of,
    factorize_by_order,
    marginal_net,
    width,
)
from proofnets.factors import Factor, by_label, max_abs_diff, normalize as normalize_factor, to_dict, value_index
from proofnets.interpret import interpret_naive, interpret_turbo, measure_cost
from proofnets.net_core import Net, bnet, check_pre_module, check_structure, is_bpn, net_from_dict, net_to_dict
from proofnets.oracle import (
    brute_force_marginal,
    clique_tree_from_order,
    forward_sample_arrays,
    heuristic_order,
    message_passing,
    root_for,
    variable_elimination,
)
from proofnets.rewrite import format_trace, hide_all, is_normal, normalize, show

logger = logging.getLogger(__name__)

METHODS = ("turbo", "naive", "ve", "mp", "brute")


@dataclass
class Model:
    """Everything one input file (plus its valuation sidecar) provides."""
    net: Net
    fnet: Optional[FactorizedNet] = None
    valuation: Optional[Valuation] = None
    bn: Optional[BayesNet] = None

    def require_valuation(self) -> Valuation:
        if self.valuation is None:
            raise MissingValuation("no valuation: pass --valuation or keep the .valuation.json sidecar next to the input")
        return self.valuation

    def require_bn(self) -> BayesNet:
        if self.bn is None:
            self.bn = extract_bn(self.net, self.require_valuation())
        return self.bn


# -------------------------------------------------------------------- io

def _read_json(path: str) -> Any:
    raw = Path(path).read_bytes()
    try:
        return json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"Error parsing {path}: {str(e)}") from e


def sidecar_path(path: str) -> Path:
    return Path(path).with_suffix(".valuation.json")


def _emit(text: str, output: Optional[str] = None) -> None:
    if output:
        Path(output).write_text(text)
        logger.info(f"wrote {output}")
    else:
        sys.stdout.write(text)


def _load(path: str, cfg: Dict[str, Any], valuation_path: Optional[str] = None) -> Model:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"Error parsing {path}: expected a JSON object")
    if "variables" in data:
        bn = bn_from_dict(data, cfg["cpt_tol"])
        net, valuation = compile_bn(bn, "empty")
        return Model(net, None, valuation, bn)

    model: Model
    if "net" in data and "valuation" in data:
        model = Model(net_from_dict(data["net"]), valuation=valuation_from_dict(data["valuation"]))
    elif is_factorized_doc(data):
        fnet = fnet_from_dict(data)
        model = Model(fnet.net, fnet)
    else:
        model = Model(net_from_dict(data))

    if model.valuation is None:
        side = Path(valuation_path) if valuation_path else sidecar_path(path)
        if valuation_path or side.exists():
            model.valuation = valuation_from_dict(_read_json(str(side)))
    return model


def _empty_normal(net: Net) -> Net:
    out = hide_all(net) if net.conclusions else net
    if not is_normal(out):
        out, _ = normalize(out)
    return out


def _order(net: Net, args: argparse.Namespace) -> List[str]:
    if getattr(args, "order", None):
        return [a.strip() for a in args.order.split(",") if a.strip()]
    return heuristic_order(net, getattr(args, "heuristic", None) or "min-fill").variables


def _parse_evidence(items: Sequence[str], valuation: Valuation) -> Dict[str, int]:
    evidence: Dict[str, int] = {}
    for item in items or []:
        name, sep, label = item.partition("=")
        if not sep:
            raise ParseError(f"evidence {item!r} is not of the form X=value")
        if name not in valuation.domains:
            raise UnknownVariable(f"evidence on unknown variable {name}")
        evidence[name] = value_index(name, valuation.domains[name], label)
    return evidence


# -------------------------------------------------------------- commands

def cmd_check(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    net = net_from_dict(_read_json(args.net))
    try:
        check_structure(net)
    except (ArityViolation, LabelMismatch) as e:
        _emit(dumps({"structure": "invalid", "error": str(e)}))
        return 2
    correctness = check_pre_module(net)
    result: Dict[str, Any] = {"structure": "ok", "correctness": correctness.to_dict()}
    if not correctness.switching_acyclic:
        _emit(dumps(result))
        return 2
    bpn = is_bpn(net)
    result["bpn"] = bpn.to_dict()
    _emit(dumps(result))
    return 0 if bpn.ok else 1


def cmd_compile(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    bn = bn_from_dict(_read_json(args.bn), cfg["cpt_tol"])
    net, valuation = compile_bn(bn, args.mode)
    if args.output:
        _emit(dumps(net_to_dict(net)), args.output)
        _emit(dumps(valuation_to_dict(valuation)), str(sidecar_path(args.output)))
    else:
        _emit(dumps({"net": net_to_dict(net), "valuation": valuation_to_dict(valuation)}))
    return 0


def cmd_normalize(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    net = net_from_dict(_read_json(args.net))
    result, trace = normalize(net, args.strategy, args.seed)
    if args.trace:
        sys.stdout.write(format_trace(trace))
        if args.output:
            _emit(dumps(net_to_dict(result)), args.output)
    else:
        _emit(dumps(net_to_dict(result)), args.output)
    return 0


def _factorize_report(fnet: FactorizedNet, valuation: Optional[Valuation]) -> Dict[str, Any]:
    report: Dict[str, Any] = {
        "width": width(fnet),
        "m_r": fnet.m_r,
        "components": fnet.num_components,
        "wirings": [{"id": w, "atoms": sorted(fnet.atoms(w)), "children": fnet.children(w)}
                    for w in fnet.wirings()],
    }
    if valuation is not None:
        cost = measure_cost(fnet, valuation)
        report["predicted_cost"] = cost.predicted_bound
        report["cost"] = cost.to_dict()
    else:
        report["predicted_cost"] = max(fnet.m_r, 1) * 2 ** (width(fnet) + 1)
        report["assumed_binary"] = True
    return report


def cmd_factorize(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    model = _load(args.net, cfg, args.valuation)
    net = _empty_normal(model.net) if args.hide_all else model.net
    fnet = factorize_by_order(net, _order(net, args))
    report = _factorize_report(fnet, model.valuation)
    if args.output:
        _emit(dumps(fnet_to_dict(fnet)), args.output)
        if model.valuation is not None:
            _emit(dumps(valuation_to_dict(model.valuation)), str(sidecar_path(args.output)))
        _emit(dumps(report))
    else:
        _emit(dumps({"report": report, "factorized": fnet_to_dict(fnet)}))
    return 0


class _Marginals:
    """Computes marginals of one model by any method, with evidence folded in."""

    def __init__(self, model: Model, args: argparse.Namespace, cfg: Dict[str, Any]):
        self.model = model
        self.args = args
        self.cfg = cfg
        valuation = model.require_valuation()
        self.evidence = _parse_evidence(args.evidence, valuation)
        self.valuation = apply_evidence(valuation, self.evidence) if self.evidence else valuation
        self._fnet: Optional[FactorizedNet] = None
        self._bn: Optional[BayesNet] = None

    def fnet(self) -> FactorizedNet:
        if self._fnet is None:
            if self.model.fnet is not None:
                self._fnet = self.model.fnet
            else:
                net = _empty_normal(self.model.net)
                self._fnet = factorize_by_order(net, _order(net, self.args))
        return self._fnet

    def bn(self) -> BayesNet:
        if self._bn is None:
            base = self.model.require_bn()
            self._bn = evidence_bn(base, self.evidence) if self.evidence else base
        return self._bn

    def _elimination_order(self, keep: Sequence[str]) -> List[str]:
        full = heuristic_order(self.bn(), "min-fill").variables
        return [v for v in full if v not in set(keep)]

    def compute(self, method: str, variables: Sequence[str]) -> Factor:
        for name in variables:
            if name not in self.valuation.domains:
                raise UnknownVariable(f"unknown variable {name}")
        if method == "turbo":
            result = interpret_turbo(marginal_net(self.fnet(), variables), self.valuation)
        elif method == "naive":
            net = self.model.net
            net = hide_all(net) if net.conclusions else net
            for name in variables:
                net = show(net, name)
            result = interpret_naive(net, self.valuation, self.cfg["state_cap"])
        elif method == "ve":
            result = variable_elimination(self.bn(), list(variables), self._elimination_order(variables))
        elif method == "mp":
            # query variables go last so one clique usually holds them all
            ctree = clique_tree_from_order(self.bn(), self._elimination_order(variables) + list(variables))
            result = message_passing(self.bn(), ctree, root_for(ctree, variables), list(variables))
        else:
            result = brute_force_marginal(self.bn(), variables, self.cfg["state_cap"])
        return normalize_factor(result) if self.evidence else result

    def reference_method(self, method: str) -> str:
        if method != "brute" and self.bn().state_space() <= self.cfg["state_cap"]:
            return "brute"
        return "ve" if method != "ve" else "naive"


def _table(factor: Factor) -> Dict:
    return by_label(factor) if len(factor.vars) == 1 else to_dict(factor)


def cmd_marginal(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    model = _load(args.input, cfg, args.valuation)
    job = _Marginals(model, args, cfg)
    queries: List[List[str]]
    if args.all:
        queries = [[a] for a in sorted(job.valuation.domains)]
    else:
        queries = [list(dict.fromkeys(args.var))]

    output: Dict[str, Any] = {"method": args.method, "evidence": {k: job.valuation.domains[k][v]
                                                                 for k, v in job.evidence.items()}}
    marginals: Dict[str, Any] = {}
    failed = False
    for variables in queries:
        result = job.compute(args.method, variables)
        key = ",".join(variables)
        marginals[key] = _table(result)
        if args.verify:
            reference = job.reference_method(args.method)
            diff = max_abs_diff(result, job.compute(reference, variables))
            output.setdefault("verified_against", reference)
            if diff > cfg["verify_tol"]:
                logger.error(f"{args.method} and {reference} disagree on {key} by {diff:.3e}")
                failed = True
    output["marginals"] = marginals
    _emit(dumps(output), args.output)
    return 1 if failed else 0


def cmd_export_dot(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    model = _load(args.input, cfg, args.valuation)
    if args.what == "net":
        text = net_to_dot(model.net, model.fnet)
    elif args.what == "bnet":
        text = bnet_to_dot(bnet(model.net))
    else:
        fnet = model.fnet
        if fnet is None:
            net = _empty_normal(model.net)
            fnet = factorize_by_order(net, _order(net, args))
        text = cliques_to_dot(clique_tree_of(fnet))
    _emit(text, args.output)
    return 0


def cmd_sample(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    model = _load(args.input, cfg, args.valuation)
    bn = model.require_bn()
    arrays = forward_sample_arrays(bn, args.seed, args.count)
    frequencies = {}
    for name, domain in bn.variables:
        counts = [int((arrays[name] == i).sum()) for i in range(len(domain))]
        frequencies[name] = {label: c / args.count for label, c in zip(domain, counts)}
    _emit(dumps({"seed": args.seed, "count": args.count, "frequencies": frequencies}), args.output)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proofnets", description="Exact Bayesian inference on Bayesian proof-nets")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    parser.add_argument("--state-cap", type=int, default=None, help="Override BPN_STATE_CAP")
    parser.add_argument("--cpt-tol", type=float, default=None, help="Override BPN_CPT_TOL")
    parser.add_argument("--tol", type=float, default=None, help="Override BPN_VERIFY_TOL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="Validate a net and report correctness and bpn conditions")
    p.add_argument("net")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("compile", help="Compile a Bayesian network JSON into a bpn")
    p.add_argument("bn")
    p.add_argument("--mode", choices=("positive", "empty"), default="positive")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_compile)

    p = sub.add_parser("normalize", help="Normalize a net")
    p.add_argument("net")
    p.add_argument("--trace", action="store_true", help="Print one 'rule site_ids' line per step")
    p.add_argument("--strategy", choices=("leftmost", "random"), default="leftmost")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_normalize)

    def order_flags(p: argparse.ArgumentParser) -> None:
        group = p.add_mutually_exclusive_group()
        group.add_argument("--order", help="Comma-separated elimination order")
        group.add_argument("--heuristic", choices=("min-fill", "min-degree"), default=None)
        p.add_argument("--valuation", help="Valuation JSON (default: the input's sidecar)")

    p = sub.add_parser("factorize", help="Factorize a normal empty-conclusion bpn by an elimination order")
    p.add_argument("net")
    p.add_argument("--hide-all", action="store_true", help="Hide every conclusion and normalize first")
    p.add_argument("-o", "--output")
    order_flags(p)
    p.set_defaults(handler=cmd_factorize)

    p = sub.add_parser("marginal", help="Compute marginals")
    p.add_argument("input")
    p.add_argument("--var", action="append", default=[],
                   help="Query variable; repeat it for a joint marginal")
    p.add_argument("--method", choices=METHODS, default="turbo")
    p.add_argument("--evidence", action="append", default=[], metavar="X=value")
    p.add_argument("--all", action="store_true", help="Every atom, on one shared factorized net")
    p.add_argument("--verify", action="store_true", help="Cross-check against a second method")
    p.add_argument("-o", "--output")
    order_flags(p)
    p.set_defaults(handler=cmd_marginal)

    p = sub.add_parser("export-dot", help="Render a net, its bnet or its clique tree as DOT")
    p.add_argument("input")
    p.add_argument("--what", choices=("net", "cliques", "bnet"), default="net")
    p.add_argument("-o", "--output")
    order_flags(p)
    p.set_defaults(handler=cmd_export_dot)

    p = sub.add_parser("sample", help="Forward-sample value frequencies")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--valuation")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_sample)
    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command != "marginal":
        return
    if not args.all and not args.var:
        parser.error("marginal needs --var or --all")
    if args.all and args.var:
        parser.error("--all and --var are exclusive")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)

    try:
        cfg = load_env_vars()
    except ConfigError as e:
        logging.basicConfig(stream=sys.stderr)
        logger.error(f"Configuration error: {str(e)}")
        return 1
    logging.basicConfig(stream=sys.stderr, level="DEBUG" if args.verbose else cfg["log_level"],
                        format="%(levelname)s %(name)s: %(message)s")
    for flag, key in (("state_cap", "state_cap"), ("cpt_tol", "cpt_tol"), ("tol", "verify_tol")):
        if getattr(args, flag) is not None:
            cfg[key] = getattr(args, flag)

    try:
        return args.handler(args, cfg)
    except (ParseError, OSError) as e:
        logger.error(f"Error reading input: {str(e)}")
        return 3
    except ProofNetError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        return 1
