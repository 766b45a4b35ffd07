"""Command-line pipeline: synth | estimate | equalize | verify | audit.

Exit codes: 0 success, 1 verification failed, 2 bad input, 3 infeasible.
Human-readable summaries go to stdout, diagnostics to stderr, machine-readable
artifacts to files. Every JSON artifact embeds the run manifest, and no output
depends on anything outside the manifest, so re-running reproduces it byte for
byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .audit import ThresholdPolicy, audit
from .dist import S, W, mutual_information
from .errors import Infeasible, OutcomeEqualError
from .estimation import SmoothingSpec, csv_text, estimate_joint, load_csv
from .io import joint_text, load_joint, load_schema, load_synth_config, schema_text, write_atomic
from .projection import (
    DEFAULT_TOL,
    ScopeSpec,
    brute_force_project,
    information_cost,
    max_cell_difference,
    outcome_equalize,
    verify_insensitivity,
    verify_scoped,
)
from .synth import ground_truth_joint, sample

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3


class _InputError(Exception):
    pass


def _manifest(subcommand, inputs, outputs, parameters, seed=None) -> dict:
    return {
        "tool": "outcome-equal",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": inputs,
        "outputs": outputs,
        "parameters": parameters,
        "seed": seed,
    }


def _err(msg):
    print(msg, file=sys.stderr)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def _scope(args) -> ScopeSpec | None:
    return ScopeSpec(tuple(args.scope)) if args.scope else None


def _print_verification(dist, scope, tol) -> bool:
    if scope is None:
        rep = verify_insensitivity(dist, tol)
        print(f"max independence violation: {rep.max_violation:.6e} (tol {tol:g})")
        return rep.passed
    ok = True
    for cell, rep in verify_scoped(dist, scope, tol).items():
        label = "∧".join(cell)
        print(f"max independence violation within {label}: {rep.max_violation:.6e} (tol {tol:g})")
        ok &= rep.passed
    return ok


# -- subcommands ---------------------------------------------------------------


def cmd_synth(args) -> int:
    config = load_synth_config(args.input)
    config = config.with_overrides(seed=args.seed)
    out_csv = Path(args.output)
    schema_path = _sibling(out_csv, ".schema.json")
    truth_path = _sibling(out_csv, ".truth.json")
    manifest = _manifest(
        "synth",
        {"config": str(args.input)},
        {"csv": str(out_csv), "schema": str(schema_path), "truth": str(truth_path)},
        {"n": int(config.n)},
        seed=int(config.seed),
    )
    truth = ground_truth_joint(config)
    data = sample(config)
    write_atomic(
        {
            out_csv: csv_text(data),
            schema_path: schema_text(config.schema, manifest),
            truth_path: joint_text(truth, manifest),
        }
    )
    print(f"wrote {len(data)} records to {out_csv}")
    print(f"schema: {schema_path}\nground truth: {truth_path}")
    print(f"ground-truth I(S;W) = {mutual_information(truth, S, W):.6e} nats")
    return EXIT_OK


def _estimate(args, require_explicit_alpha: bool):
    schema = load_schema(args.schema)
    data = load_csv(args.input, schema)
    alpha = 0.0 if args.alpha is None else args.alpha
    est = estimate_joint(data, SmoothingSpec(alpha))
    diag = est.diagnostics
    if diag.empty_cell_count:
        _err(
            f"warning: {diag.empty_cell_count} of {diag.n_cells} joint cells have no "
            f"observations (alpha={alpha:g})"
        )
        if require_explicit_alpha and args.alpha is None:
            raise _InputError(
                "empty cells found; pass --alpha explicitly (--alpha 0 keeps them as "
                "structural zeros, --alpha > 0 smooths them away)"
            )
    return est


def cmd_estimate(args) -> int:
    est = _estimate(args, require_explicit_alpha=False)
    alpha = 0.0 if args.alpha is None else args.alpha
    manifest = _manifest(
        "estimate",
        {"csv": str(args.input), "schema": str(args.schema)},
        {"joint": str(args.output)},
        {"alpha": alpha},
    )
    write_atomic({Path(args.output): joint_text(est.joint, manifest)})
    d = est.diagnostics
    print(f"estimated joint from {d.n_records} records; empty cells: {d.empty_cell_count}")
    return EXIT_OK


def cmd_equalize(args) -> int:
    scope = _scope(args)
    if args.schema:
        try:
            est = _estimate(args, require_explicit_alpha=True)
        except _InputError as exc:
            _err(str(exc))
            return EXIT_INFEASIBLE
        dist = est.joint
        inputs = {"csv": str(args.input), "schema": str(args.schema)}
    else:
        dist = load_joint(args.input)
        inputs = {"joint": str(args.input)}
    if args.oracle and scope is not None:
        raise _InputError("--oracle checks the unscoped projection only; drop --scope")

    try:
        eq = outcome_equalize(dist, scope)
    except Infeasible as exc:
        _err(exc.report.render())
        _err("hint: pass --scope <protected-variable> to equalize within its cells")
        return EXIT_INFEASIBLE

    params = {
        "scope": list(scope.scope_variables) if scope else [],
        "alpha": args.alpha,
    }
    if args.oracle:
        params.update(oracle=True, samples=args.samples, iterations=args.iterations)
    manifest = _manifest(
        "equalize", inputs, {"joint": str(args.output)}, params,
        seed=args.seed if args.oracle else None,
    )
    write_atomic({Path(args.output): joint_text(eq, manifest)})

    _print_verification(eq, scope, DEFAULT_TOL)
    print(f"information cost KL(equalized || original): {information_cost(dist, eq):.6f} nats")
    if args.oracle:
        bf = brute_force_project(dist, iterations=args.iterations, samples=args.samples, seed=args.seed)
        print(f"oracle max cell disagreement: {max_cell_difference(eq, bf):.3e}")
    return EXIT_OK


def cmd_verify(args) -> int:
    dist = load_joint(args.input)
    passed = _print_verification(dist, _scope(args), args.tol)
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_audit(args) -> int:
    original_path, equalized_path = args.input
    original = load_joint(original_path)
    equalized = load_joint(equalized_path)
    policy = None
    if args.target is not None or args.tau is not None:
        if args.target is None or args.tau is None:
            raise _InputError("--target and --tau go together")
        policy = ThresholdPolicy(args.target, args.tau)
    report = audit(original, equalized, policy)
    print(report.to_table(), end="")
    if args.output:
        doc = report.to_dict()
        doc["manifest"] = _manifest(
            "audit",
            {"original": str(original_path), "equalized": str(equalized_path)},
            {"report": str(args.output)},
            {"target": args.target, "tau": args.tau},
        )
        write_atomic({Path(args.output): json.dumps(doc, indent=2, ensure_ascii=False) + "\n"})
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="outcome-equal",
        description="Decorrelate outcomes from protected attributes at minimal KL cost.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="sample a dataset from a protected->unprotected->outcome chain")
    p.add_argument("--input", required=True, help="synth config (JSON)")
    p.add_argument("--output", required=True, help="CSV path; .schema.json and .truth.json written alongside")
    p.add_argument("--seed", type=int, help="override the config's seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="estimate a joint from CSV records")
    p.add_argument("--input", required=True, help="CSV records")
    p.add_argument("--schema", required=True, help="schema config (JSON)")
    p.add_argument("--output", required=True, help="joint file to write")
    p.add_argument("--alpha", type=float, help="additive smoothing pseudo-count (default 0)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("equalize", help="project a joint onto outcome-protected independence")
    p.add_argument("--input", required=True, help="joint file, or CSV records when --schema is given")
    p.add_argument("--schema", help="schema config; makes --input a CSV to estimate from")
    p.add_argument("--alpha", type=float, help="smoothing for CSV input; required if cells are empty")
    p.add_argument("--scope", nargs="+", metavar="VARIABLE", help="protected variables to equalize within")
    p.add_argument("--output", required=True, help="equalized joint file to write")
    p.add_argument("--oracle", action="store_true", help="cross-check against brute-force minimization")
    p.add_argument("--samples", type=int, default=256, help="oracle: Dirichlet starts per cell")
    p.add_argument("--iterations", type=int, default=200, help="oracle: coordinate-descent sweeps")
    p.add_argument("--seed", type=int, default=0, help="oracle: random seed")
    p.set_defaults(func=cmd_equalize)

    p = sub.add_parser("verify", help="check the independence constraint on a joint")
    p.add_argument("--input", required=True, help="joint file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--scope", nargs="+", metavar="VARIABLE", help="verify within cells of these variables")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("audit", help="compare a joint with its equalized version")
    p.add_argument("--input", nargs=2, required=True, metavar=("ORIGINAL", "EQUALIZED"))
    p.add_argument("--output", help="machine-readable report (JSON)")
    p.add_argument("--target", help="outcome level a threshold policy allocates on")
    p.add_argument("--tau", type=float, help="policy threshold in [0, 1]")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Infeasible as exc:
        _err(exc.report.render())
        return EXIT_INFEASIBLE
    except (OutcomeEqualError, ValueError, OSError, _InputError) as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
