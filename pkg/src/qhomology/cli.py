"""Command-line front end.

Exit codes: 0 trivial (or inconclusive), 1 nontrivial (or not homotopic),
2 input or validation error.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .algorithm import (AlgorithmConfig, AlgorithmError, HomologyVerdict, default_seed, detect_homology,
                        homotopy_not_equivalent, winding_numbers)
from .cohomology import CohomologyBasis, CohomologyError, cohomology_basis
from .homology import BASIS_KINDS, basis_to_json, homology_basis, intersection_report
from .mesh import Mesh, MeshError, generate_double_torus, generate_torus, genus, load_off
from .oracle import LoopError, LoopSpec, parse_loop

EXIT_TRIVIAL, EXIT_NONTRIVIAL, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_mesh(args) -> Mesh:
    if args.torus:
        return generate_torus(*args.torus)
    if args.genus2:
        return generate_double_torus()
    if not args.mesh:
        raise CliError("no mesh given; use --mesh PATH, --torus R C or --genus2")
    try:
        text = Path(args.mesh).read_text()
    except OSError as exc:
        raise CliError(f"cannot read mesh {args.mesh}: {exc.strerror}") from None
    return load_off(text)


def _mesh_source(args) -> str:
    if args.torus:
        return f"torus:{args.torus[0]}x{args.torus[1]}"
    if args.genus2:
        return "genus2"
    return str(args.mesh)


def _cobasis(mesh: Mesh, kind: str) -> CohomologyBasis:
    return cohomology_basis(mesh, homology_basis(mesh, kind))


def _load_loop(path: str, mesh: Mesh, config: AlgorithmConfig) -> LoopSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read loop {path}: {exc.strerror}") from None
    try:
        return parse_loop(text, mesh, config.K, config.modulo)
    except LoopError as exc:
        raise LoopError(f"{path}: {exc}") from None


def _config(args) -> AlgorithmConfig:
    return AlgorithmConfig(
        K=args.K,
        phase_bits=args.phase_bits,
        margin=args.margin_k,
        shots=args.shots,
        seed=args.seed,
        exact=args.exact,
        modulo=args.modulo,
        engine=args.engine,
        workers=args.workers,
    )


def _emit(args, result: dict, text: str) -> None:
    payload = _dumps(result)
    sys.stdout.write(payload if args.json else text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "result.json").write_text(payload)
        manifest = {
            "command": args.command,
            "inputs": {"mesh": _mesh_source(args),
                       "loops": [str(p) for p in getattr(args, "loops", []) or []]},
            "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")},
            "tool_version": __version__,
            "result": "result.json",
            "result_sha256": hashlib.sha256(payload.encode()).hexdigest(),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        (out / "manifest.json").write_text(_dumps(manifest))


def _verdict_table(verdict: HomologyVerdict) -> str:
    lines = [f"{'alpha':>5} {'c':>4} {'omega_q':>10} {'omega_cl':>8} {'trivial':>7} {'p':>3} {'oracle':>7}"]
    for r in verdict.per_alpha:
        p = "-" if r.phase_bits is None else str(r.phase_bits)
        lines.append(f"{r.alpha:>5} {r.c_alpha:>4} {r.omega_quantum:>10.4f} {r.omega_classical:>8} "
                     f"{str(r.trivial):>7} {p:>3} {r.oracle_calls:>7}")
    return "\n".join(lines) + "\n"


def cmd_basis(args) -> int:
    mesh = _load_mesh(args)
    hb = homology_basis(mesh, args.basis)
    cb = cohomology_basis(mesh, hb)
    result = {
        "mesh": {"V": mesh.V, "E": mesh.E, "F": mesh.F, "genus": genus(mesh)},
        "homology": {"method": hb.method, "cycles": basis_to_json(hb),
                     "intersections": intersection_report(hb)},
        "cohomology": cb.to_json(),
    }
    if genus(mesh) == 0:
        result["note"] = "genus 0"
    lines = [f"V={mesh.V} E={mesh.E} F={mesh.F} genus={genus(mesh)}"]
    if genus(mesh) == 0:
        lines.append("genus 0: empty basis")
    lines.append(f"homology basis ({hb.method}): {len(hb)} cycles, lengths {[len(c) for c in hb]}")
    lines.append(f"cohomology support sizes: {cb.support_sizes}")
    lines.append(f"interval layout: {list(cb.interval_report)}")
    lines.append(f"duality matrix: {cb.duality().tolist()}")
    _emit(args, result, "\n".join(lines) + "\n")
    return 0


def cmd_check(args) -> int:
    mesh = _load_mesh(args)
    config = _config(args)
    loop = _load_loop(args.loops[0], mesh, config)
    verdict = detect_homology(mesh, _cobasis(mesh, args.basis), loop, config)
    text = _verdict_table(verdict) + f"verdict: {'trivial' if verdict.trivial else 'nontrivial'}\n"
    _emit(args, verdict.to_json(), text)
    return EXIT_TRIVIAL if verdict.trivial else EXIT_NONTRIVIAL


def cmd_winding(args) -> int:
    mesh = _load_mesh(args)
    if genus(mesh) != 1:
        raise CliError(f"winding numbers need a torus; mesh has genus {genus(mesh)}")
    config = _config(args)
    loop = _load_loop(args.loops[0], mesh, config)
    (w1, w2), verdict = winding_numbers(mesh, _cobasis(mesh, args.basis), loop, config)
    result = verdict.to_json()
    result["winding"] = [w1, w2]
    _emit(args, result, f"{w1} {w2}\n")
    return 0


def cmd_homotopy(args) -> int:
    mesh = _load_mesh(args)
    config = _config(args)
    first = _load_loop(args.loops[0], mesh, config)
    second = _load_loop(args.loops[1], mesh, config)
    label, verdict, combined = homotopy_not_equivalent(mesh, _cobasis(mesh, args.basis), first, second, config)
    result = verdict.to_json()
    result["homotopy"] = label
    result["combined_loop"] = combined.to_json()
    _emit(args, result, _verdict_table(verdict) + label + "\n")
    return EXIT_NONTRIVIAL if label == "NOT_HOMOTOPIC" else EXIT_TRIVIAL


def _add_mesh_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--mesh", metavar="PATH", help="closed triangle mesh in OFF format")
    src.add_argument("--torus", nargs=2, type=int, metavar=("R", "C"), help="generated R x C torus grid")
    src.add_argument("--genus2", action="store_true", help="generated genus-2 surface")
    p.add_argument("--basis", choices=BASIS_KINDS, default="auto", help="homology basis construction")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p.add_argument("--out", metavar="DIR", help="write result.json and manifest.json to DIR")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--K", type=int, default=2, help="multiplicity modulus, a power of two (default 2)")
    bits = p.add_mutually_exclusive_group()
    bits.add_argument("--phase-bits", type=int, default=None, help="fixed phase register width")
    bits.add_argument("--margin-k", type=int, default=4, help="extra phase bits over the gap size (default 4)")
    p.add_argument("--shots", type=int, default=256)
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default $QHOMOLOGY_SEED or 0)")
    p.add_argument("--exact", action="store_true", help="read the overlap from the statevector, no QPE")
    p.add_argument("--modulo", action="store_true", help="reduce multiplicities mod K instead of rejecting")
    p.add_argument("--engine", choices=("auto", "ladder", "power"), default="auto",
                   help="phase estimation simulation strategy")
    p.add_argument("--workers", type=int, default=1, help="threads for independent basis elements")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhomology", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="homology and cohomology bases of a mesh")
    _add_mesh_args(p)
    p.set_defaults(func=cmd_basis)

    for name, func, nloops, helptext in (
        ("check", cmd_check, 1, "decide whether a loop is homologous to zero"),
        ("winding", cmd_winding, 1, "winding numbers of a loop on a torus"),
        ("homotopy", cmd_homotopy, 2, "screen two loops for homotopy non-equivalence"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_mesh_args(p)
        _add_run_args(p)
        p.add_argument("loops", nargs=nloops, metavar="LOOP", help="loop file")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = default_seed()
    try:
        return args.func(args)
    except (CliError, MeshError, LoopError, CohomologyError, AlgorithmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
