"""Command-line front end.

Exit codes::

    0  success
    1  input error (unreadable file, malformed JSON, non-hermitian matrix, ...)
    2  decomposition failed to certify its residuals
    3  intertwiner search failed (counterexample candidate quarantined)
    4  two runs disagree on k (maximality suspect)
    5  catalog oracle mismatch
    6  negative spectrum in a square root
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

import numpy as np

from .algebra import resolve_algebra
from .catalog import get_entry, list_entries, markdown_table, random_input, run_entry
from .conjecture import stress_campaign, trial_seeds, verify_instance
from .decomp import DecompositionConfig, maximal_projector_decomposition
from .errors import (CatalogMismatch, DecompositionFailed, NegativeSpectrum, NotAUnit,
                     StarDecompError)
from .specfun import polar, sqrt_unit
from .starmat import StarMatrix, hermitian_residual

EXIT_OK, EXIT_INPUT, EXIT_DECOMP, EXIT_SEARCH, EXIT_K_MISMATCH, EXIT_CATALOG, EXIT_NEGATIVE = range(7)
SCHEMA = "v1"


class InputError(Exception):
    pass


# -- IO helpers -------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def load_matrix(algebra_spec: str, path: str):
    try:
        A, ideals = resolve_algebra(algebra_spec)
    except (StarDecompError, OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot resolve algebra {algebra_spec!r}: {exc}") from None
    obj = _load_json(path)
    entries = obj.get("entries") if isinstance(obj, dict) else obj
    try:
        coords = np.array(entries, dtype=float)
    except (TypeError, ValueError):
        raise InputError("matrix entries must be a nested list of numbers") from None
    if coords.ndim == 2 and A.dim == 1:
        coords = coords[:, :, None]
    try:
        M = StarMatrix(A, coords)
    except StarDecompError as exc:
        raise InputError(str(exc)) from None
    return A, ideals, M


def _require_hermitian(M: StarMatrix, tol: float):
    dev, (i, j, c) = hermitian_residual(M)
    if dev > tol * (1.0 + M.norm()):
        raise InputError(f"matrix is not hermitian: max deviation {dev:.3g} at entry ({i}, {j}), "
                         f"coordinate {M.algebra.basis_labels[c]}")


def _positive(value: str, kind=float):
    v = kind(value)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


# -- subcommands --------------------------------------------------------------

def cmd_decompose(args) -> int:
    A, _, H = load_matrix(args.algebra, args.matrix)
    _require_hermitian(H, args.tol)
    cfg = DecompositionConfig(args.tol, args.max_split_trials, args.seed)
    try:
        D = maximal_projector_decomposition(H, cfg=cfg)
    except DecompositionFailed as exc:
        print(f"decomposition failed: {exc}", file=sys.stderr)
        _emit(args, _dumps({"schema": SCHEMA, "status": "decomposition_failed",
                            "residuals": exc.diagnostics}))
        return EXIT_DECOMP
    report = D.to_json()
    report["algebra"] = A.name
    if args.format == "text":
        lines = [f"algebra {A.name}  n {H.n}  k {D.k}"]
        lines += [f"  {key}: {val:.3g}" for key, val in sorted(D.residuals.items())]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, _dumps(report))
    return EXIT_OK


def _quarantine(args, H, res) -> str:
    payload = {
        "schema": SCHEMA,
        "kind": res["status"],
        "seed": args.seed,
        "tol": args.tol,
        "H": H.to_json(inline_algebra=True),
        "Ps": [P.to_json(inline_algebra=True) for P in res.get("Ps", [])],
        "Qs": [Q.to_json(inline_algebra=True) for Q in res.get("Qs", [])],
        "best_residuals": res.get("residuals", {}),
    }
    text = _dumps(payload)
    digest = hashlib.sha256(text.encode()).hexdigest()[:12]
    path = os.path.join(args.quarantine, f"{H.algebra.name}_n{H.n}_{res['status']}_{digest}.json")
    atomic_write(path, text)
    return path


def cmd_verify(args) -> int:
    A, _, H = load_matrix(args.algebra, args.matrix)
    _require_hermitian(H, 1e-9)
    seeds = trial_seeds(args.seed, 0)[1:]
    res = verify_instance(H, tol=args.tol, max_trials=args.max_split_trials, retries=args.retries,
                          seeds=seeds)
    report = {"schema": SCHEMA, "algebra": A.name, "n": H.n, "seed": args.seed, "status": res["status"],
              "k": list(res["k"]) if res["k"] else None, "residuals": res.get("residuals", {})}
    code = EXIT_OK
    if res["status"] == "verified":
        report["sigma"] = list(res["certificate"].sigma)
    elif res["status"] == "k_mismatch":
        report["label"] = "maximality-suspect"
        code = EXIT_K_MISMATCH
    elif res["status"] == "search_failure":
        report["quarantine"] = _quarantine(args, H, res)
        code = EXIT_SEARCH
    else:
        code = EXIT_DECOMP
    if args.format == "text":
        _emit(args, f"status {res['status']}  k {report['k']}\n")
    else:
        _emit(args, _dumps(report))
    return code


def _catalog_report(report: dict) -> dict:
    return {key: val for key, val in report.items() if key != "decomposition"}


def cmd_catalog(args) -> int:
    if args.entry == "all":
        entries = list_entries()
    else:
        try:
            entries = [get_entry(args.entry)]
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    reports, verdicts, code = [], {}, EXIT_OK
    cfg_base = DecompositionConfig(args.tol, args.max_split_trials, args.seed)
    for idx, entry in enumerate(entries):
        agree = 0
        for t in range(args.trials):
            seeds = trial_seeds(args.seed, t)
            n = 2 + t % 2
            x = random_input(entry, n, seed=seeds[0])
            cfg = DecompositionConfig(cfg_base.tol, cfg_base.max_trials, seeds[1])
            try:
                rep = _catalog_report(run_entry(entry, x, cfg))
                agree += 1
            except CatalogMismatch as exc:
                rep = {"entry": entry.id, "input": x.to_json(), "classical_summary": exc.summary,
                       "oracle_summary": exc.oracle, "verdict": "mismatch"}
                code = EXIT_CATALOG
            except DecompositionFailed as exc:
                rep = {"entry": entry.id, "input": x.to_json(), "verdict": "decomposition_failed",
                       "residuals": exc.diagnostics}
                code = code or EXIT_DECOMP
            rep["trial"] = t
            reports.append(rep)
        label = "internal-only" if entry.oracle == "internal-only" else "agree"
        verdicts[entry.id] = f"{label} {agree}/{args.trials}"
    table = markdown_table(verdicts) if args.entry == "all" else None
    if args.format == "text":
        text = table or "".join(f"{e}: {v}\n" for e, v in verdicts.items())
        _emit(args, text)
    else:
        _emit(args, _dumps({"schema": SCHEMA, "seed": args.seed, "reports": reports,
                            "verdicts": verdicts, "table": table}))
    return code


def _factor_main(args, compute) -> int:
    _, _, M = load_matrix(args.algebra, args.matrix)
    try:
        result, residual = compute(M)
    except NegativeSpectrum as exc:
        print(f"negative spectrum: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except NotAUnit as exc:
        raise InputError(f"input is not invertible: {exc}") from None
    result["schema"] = SCHEMA
    result["residual"] = residual
    print(f"residual {residual:.3g}", file=sys.stderr)
    _emit(args, _dumps(result))
    return EXIT_OK


def cmd_sqrt(args) -> int:
    def compute(x):
        s = sqrt_unit(x)
        return {"sqrt": s.to_json()}, (s @ s).distance(x)
    return _factor_main(args, compute)


def cmd_polar(args) -> int:
    def compute(m):
        U, P = polar(m)
        eye = StarMatrix.identity(m.algebra, m.n)
        res = max((U.adjoint() @ U).distance(eye), (U @ P).distance(m))
        return {"U": U.to_json(), "P": P.to_json()}, res
    return _factor_main(args, compute)


def cmd_campaign(args) -> int:
    try:
        A, ideals = resolve_algebra(args.algebra)
    except (StarDecompError, OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot resolve algebra {args.algebra!r}: {exc}") from None
    if args.ideal not in ideals:
        raise InputError(f"unknown ideal {args.ideal!r}; available: {', '.join(sorted(ideals))}")
    report = stress_campaign(A, ideals[args.ideal], args.n, args.trials, tol=args.tol,
                             max_trials=args.max_split_trials, retries=args.retries, seed=args.seed,
                             jobs=args.jobs, ideal_name=args.ideal)
    out = report.to_json()
    for failure in out["failures"]:
        text = _dumps(dict(failure, schema=SCHEMA))
        digest = hashlib.sha256(text.encode()).hexdigest()[:12]
        atomic_write(os.path.join(args.quarantine, f"{A.name}_n{args.n}_{failure['kind']}_{digest}.json"), text)
    if args.format == "text":
        _emit(args, f"{A.name} <{args.ideal}> n={args.n} trials={args.trials} "
                    f"k_agreement={out['k_agreement_rate']:.3f} "
                    f"certificates={out['certificate_success_rate']:.3f} hist={out['k_histogram']}\n")
    else:
        _emit(args, _dumps(out))
    kinds = {f["kind"] for f in out["failures"]}
    if "k_mismatch" in kinds:
        return EXIT_K_MISMATCH
    if "search_failure" in kinds:
        return EXIT_SEARCH
    if kinds:
        return EXIT_DECOMP
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get("STARDECOMP_SEED", "0"))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed,
                        help="random seed (default: $STARDECOMP_SEED or 0)")
    common.add_argument("--max-split-trials", type=lambda v: _positive(v, int), default=32)
    common.add_argument("--retries", type=lambda v: _positive(v, int), default=16)
    common.add_argument("--jobs", type=lambda v: _positive(v, int), default=1)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--quarantine", default="quarantine", help="directory for counterexample candidates")

    p = argparse.ArgumentParser(prog="stardecomp", description="Projector decompositions over *-algebras")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common], help="maximal projector decomposition of H")
    d.add_argument("algebra", help="catalog name or algebra JSON file")
    d.add_argument("matrix", help="matrix JSON file")
    d.add_argument("--tol", type=_positive, default=1e-9)
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", parents=[common], help="test uniqueness on one matrix")
    v.add_argument("algebra")
    v.add_argument("matrix")
    v.add_argument("--tol", type=_positive, default=1e-6, help="certificate tolerance")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", parents=[common], help="run catalog rows against classical oracles")
    c.add_argument("entry", help="entry id or 'all'")
    c.add_argument("--trials", type=lambda v: _positive(v, int), default=5)
    c.add_argument("--tol", type=_positive, default=1e-9)
    c.set_defaults(func=cmd_catalog)

    for name, func in (("sqrt", cmd_sqrt), ("polar", cmd_polar)):
        f = sub.add_parser(name, parents=[common], help=f"{name} of an invertible matrix")
        f.add_argument("algebra")
        f.add_argument("matrix")
        f.add_argument("--tol", type=_positive, default=1e-9)
        f.set_defaults(func=func)

    s = sub.add_parser("campaign", parents=[common], help="seeded uniqueness campaign")
    s.add_argument("algebra")
    s.add_argument("--ideal", default="one")
    s.add_argument("-n", type=lambda v: _positive(v, int), default=2)
    s.add_argument("--trials", type=lambda v: _positive(v, int), default=100)
    s.add_argument("--tol", type=_positive, default=1e-6, help="certificate tolerance")
    s.set_defaults(func=cmd_campaign)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, StarDecompError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
