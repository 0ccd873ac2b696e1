"""Command-line front end.

One verb per pipeline stage: validate, classify, compile, solve, perfect,
submodular, bench. Machine-readable output (JSON, or CSV for bench) goes to
standard output; diagnostics to standard error. Exit codes: 0 success,
1 negative verdict (intractable / not perfect / infeasible), 2 input error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .errors import ModelFormatError, NmrfmapError, TooLargeError
from .generators import (
    block_chain_model,
    random_signed_model,
    random_supermodular_k3,
    random_tractable_model,
)
from .model import (
    DEFAULT_EPS,
    is_binary_pairwise,
    model_from_json_file,
    model_to_json,
)
from .mwss import DEFAULT_BNB_CAP, map_solution_to_json, solve_map
from .nmrf import (
    apply_enode_plan,
    build_nmrf,
    nmrf_from_json,
    nmrf_to_dot,
    nmrf_to_json,
    prune,
)
from .oracle import brute_force_map
from .perfection import (
    binary_pairwise_perfection,
    is_perfect_small,
    pruned_to_plain,
)
from .errors import IntractableTopologyError, NotSingleEnodeFormError
from .structure import classify_model, plan_by_names, report_to_json
from .submodular import (
    alpha,
    construct_k3,
    is_supermodular,
    potential_from_json,
    representation_feasible,
    representation_to_json,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_TOO_LARGE = 3


def _emit(doc, out_path):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _cmd_validate(args) -> int:
    model = model_from_json_file(args.model)
    _emit(
        {
            "valid": True,
            "variables": len(model.variables),
            "potentials": len(model.potentials),
            "binary_pairwise": is_binary_pairwise(model),
        },
        args.out,
    )
    return EXIT_OK


def _cmd_classify(args) -> int:
    model = model_from_json_file(args.model)
    report = classify_model(model, args.eps)
    _emit(report_to_json(report), args.out)
    return EXIT_OK if report.tractable else EXIT_NEGATIVE


def _cmd_compile(args) -> int:
    model = model_from_json_file(args.model)
    if is_binary_pairwise(model):
        report = classify_model(model, args.eps)
        model = apply_enode_plan(model, plan_by_names(report), args.eps)
        if not report.tractable:
            print("warning: intractable topology; default enode forms used",
                  file=sys.stderr)
    nmrf = build_nmrf(model)
    _emit(nmrf_to_json(nmrf), args.out)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(nmrf_to_dot(nmrf) + "\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    model = model_from_json_file(args.model)
    try:
        sol = solve_map(model, args.method, args.eps, args.max_nodes)
    except IntractableTopologyError as exc:
        report = classify_model(model, args.eps)
        _emit(
            {"solved": False, "reason": "intractable", "report": report_to_json(report)},
            args.out,
        )
        print(f"intractable topology; witness cycle {list(exc.witness)}",
              file=sys.stderr)
        return EXIT_NEGATIVE
    doc = map_solution_to_json(sol)
    if args.oracle_check:
        ref = brute_force_map(model)
        agree = abs(ref.objective - sol.objective) <= 1e-6 * max(
            1.0, abs(ref.objective)
        )
        doc["oracle"] = {"objective": ref.objective, "agree": agree}
        if not agree:
            _emit(doc, args.out)
            print("oracle disagreement", file=sys.stderr)
            return EXIT_NEGATIVE
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_perfect(args) -> int:
    nmrf = nmrf_from_json(_load_json(args.nmrf))
    pruned = prune(nmrf, args.eps)
    try:
        verdict = binary_pairwise_perfection(pruned, args.max_nodes)
    except NotSingleEnodeFormError:
        plain, kept = pruned_to_plain(pruned)
        verdict = is_perfect_small(plain, args.max_nodes)
        if verdict.witness is not None:
            verdict = type(verdict)(
                verdict.perfect,
                verdict.witness_kind,
                tuple(kept[i] for i in verdict.witness),
            )
    doc = {"perfect": verdict.perfect}
    if not verdict.perfect:
        doc["witness_kind"] = verdict.witness_kind
        doc["witness"] = list(verdict.witness)
    _emit(doc, args.out)
    return EXIT_OK if verdict.perfect else EXIT_NEGATIVE


def _cmd_submodular(args) -> int:
    psi = potential_from_json(_load_json(args.potential))
    ok, witness = is_supermodular(psi, args.eps)
    doc = {"order": psi.k, "supermodular": ok, "alpha": alpha(psi)}
    if not ok:
        i, j, rest, value = witness
        doc["witness"] = {
            "pair": [psi.names[i], psi.names[j]],
            "rest": {psi.names[p]: v for p, v in rest.items()},
            "value": value,
        }
        _emit(doc, args.out)
        return EXIT_NEGATIVE
    if psi.k == 3:
        rep = construct_k3(psi, args.eps)
        doc["feasible"] = True
        doc["representation"] = representation_to_json(rep)
        _emit(doc, args.out)
        return EXIT_OK
    verdict = representation_feasible(psi, args.eps)
    doc["feasible"] = verdict.feasible
    if not verdict.feasible:
        doc["reason"] = verdict.reason
    _emit(doc, args.out)
    return EXIT_OK if verdict.feasible else EXIT_NEGATIVE


FAMILIES = ("random-tractable", "random-signed", "random-supermodular-k3",
            "block-chain")


def _cmd_bench(args) -> int:
    if args.family not in FAMILIES:
        print(f"unknown family {args.family!r}; choose from {FAMILIES}",
              file=sys.stderr)
        return EXIT_INPUT
    rng = np.random.default_rng(args.seed)
    rows = [("family", "instance", "size", "elapsed_s", "status")]
    for i in range(args.count):
        if args.family == "random-tractable":
            model = random_tractable_model(rng, max_vars=min(args.size, 8))
            t0 = time.perf_counter()
            sol = solve_map(model)
            elapsed = time.perf_counter() - t0
            status = "ok"
            if args.oracle_check:
                ref = brute_force_map(model)
                agree = abs(ref.objective - sol.objective) <= 1e-6 * max(
                    1.0, abs(ref.objective)
                )
                status = "agree" if agree else "disagree"
            rows.append((args.family, i, len(model.variables), elapsed, status))
        elif args.family == "random-signed":
            model = random_signed_model(rng, n=min(args.size, 10))
            t0 = time.perf_counter()
            report = classify_model(model)
            elapsed = time.perf_counter() - t0
            rows.append(
                (args.family, i, len(model.variables), elapsed,
                 "tractable" if report.tractable else "intractable")
            )
        elif args.family == "random-supermodular-k3":
            psi = random_supermodular_k3(rng)
            t0 = time.perf_counter()
            rep = construct_k3(psi)
            elapsed = time.perf_counter() - t0
            err = max(
                abs(rep.evaluate(bits) - psi.value(bits))
                for bits in np.ndindex(2, 2, 2)
            )
            rows.append(
                (args.family, i, 3, elapsed, "ok" if err <= 1e-9 else "mismatch")
            )
        else:  # block-chain
            n_blocks = max(args.size // 3, 1)  # 3 edges per block
            model = block_chain_model(n_blocks, seed=args.seed)
            t0 = time.perf_counter()
            report = classify_model(model)
            elapsed = time.perf_counter() - t0
            n_edges = sum(1 for p in model.potentials if len(p.scope) == 2)
            rows.append(
                (args.family, i, n_edges, elapsed,
                 "tractable" if report.tractable else "intractable")
            )
    lines = [",".join(str(c) for c in row) for row in rows]
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmrfmap",
        description="Exact MAP inference via weighted conflict-graph stable sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model_arg=True):
        p.add_argument("--eps", type=float, default=DEFAULT_EPS)
        p.add_argument("--out", default=None, help="write the report here")

    p = sub.add_parser("validate", help="parse and check a model file")
    p.add_argument("model")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("classify", help="block-level tractability report")
    p.add_argument("model")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("compile", help="model to normalized conflict graph")
    p.add_argument("model")
    common(p)
    p.add_argument("--dot", default=None, help="also write a DOT rendering here")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("solve", help="exact MAP assignment")
    p.add_argument("model")
    common(p)
    p.add_argument(
        "--method", default="auto", choices=("auto", "blocks", "bipartite", "bnb")
    )
    p.add_argument("--max-nodes", type=int, default=DEFAULT_BNB_CAP)
    p.add_argument("--oracle-check", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("perfect", help="perfection check of an exported graph")
    p.add_argument("nmrf")
    common(p)
    p.add_argument("--max-nodes", type=int, default=24)
    p.set_defaults(func=_cmd_perfect)

    p = sub.add_parser("submodular", help="higher-order potential analysis")
    p.add_argument("potential")
    common(p)
    p.set_defaults(func=_cmd_submodular)

    p = sub.add_parser("bench", help="seeded generator benchmarks (CSV)")
    p.add_argument("family", help="|".join(FAMILIES))
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--oracle-check", action="store_true")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ModelFormatError, FileNotFoundError, json.JSONDecodeError,
            KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NmrfmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
