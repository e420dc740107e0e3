"""Command-line front end.

Every command writes exactly one canonical JSON report to stdout (sorted
keys, fixed formats, trailing newline) so identical inputs give identical
bytes; human-readable notes go to stderr.  Exit codes: 0 when the property
holds or a witness was found, 1 when it fails or nothing was found within
the given bounds, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EppaError, InputError
from .extensions import (build_coset_extension, canonical_cover, check_coherent,
                         gamma_fragment, verify_hl_extension)
from .fixtures import (kn_free_seed, path_graph, relation_free_pair,
                       s4_counterexample)
from .groups import WordContext
from .left_systems import (FiniteCosetSpec, FreeCosetSpec,
                           encode_extension_conditions, hl_separate,
                           normalize_system, solve_left_system,
                           system_to_gadget, verify_separation)
from .partial_iso import enumerate_partial_isos
from .search import find_coherent_extension, find_hl_extension
from .serialize import (canonical_json_bytes, extension_to_json, load_extension,
                        load_quotient, load_structure, load_system,
                        partial_iso_set_to_json, save_extension, save_structure,
                        sha256_hex, structure_to_json, system_to_json,
                        validate_structure)
from .structures import (find_homomorphism, free_amalgamation,
                         induced_substructure, is_gaifman_clique, is_T_free,
                         natural_factorization)
from .tower import TowerBudget, build_tower, chain_report

import json


def _hash_file(path) -> str:
    return sha256_hex(Path(path).read_bytes())


def _input_hashes(paths) -> dict:
    return {str(p): _hash_file(p) for p in paths}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eppa")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker count (the current engine is single-process)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, *, forbidden=False, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        if forbidden:
            sp.add_argument("--forbidden", action="append", default=[],
                            help="forbidden pattern file (repeatable)")
        return sp

    sp = add("validate")
    sp.add_argument("structure")

    sp = add("homomorphism")
    sp.add_argument("source")
    sp.add_argument("target")

    sp = add("tfree", forbidden=True)
    sp.add_argument("structure")

    sp = add("partial-isos")
    sp.add_argument("structure")
    sp.add_argument("--max-dom", type=int, default=None)
    sp.add_argument("--all", action="store_true",
                    help="include restrictions of the identity")
    sp.add_argument("--cap", type=int, default=10**6)

    sp = add("factorize")
    sp.add_argument("structure")

    sp = add("amalgamate")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--over", required=True)

    sp = add("find-eppa", forbidden=True)
    sp.add_argument("structure")
    sp.add_argument("--max-size", type=int, required=True)
    sp.add_argument("--out", default=None, help="write the witness here")

    sp = add("verify-ext", forbidden=True)
    sp.add_argument("extension")

    sp = add("canonical-cover", forbidden=True)
    sp.add_argument("extension")
    sp.add_argument("--cap", type=int, default=20000)

    sp = add("coherence")
    sp.add_argument("inner")
    sp.add_argument("outer")

    sp = add("find-coherent", forbidden=True)
    sp.add_argument("base")
    sp.add_argument("extension")
    sp.add_argument("--max-size", type=int, required=True)
    sp.add_argument("--out", default=None)

    sp = add("gamma", forbidden=False)
    sp.add_argument("structure")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--radius", type=int)
    group.add_argument("--quotient")
    sp.add_argument("--cap", type=int, default=5000)

    sp = add("solve-system")
    sp.add_argument("system")
    sp.add_argument("--cap", type=int, default=5040)

    sp = add("normalize")
    sp.add_argument("system")
    sp.add_argument("--stage", choices=("star", "prime"), required=True)

    sp = add("gadget")
    sp.add_argument("system")

    sp = add("encode-conditions", forbidden=True)
    sp.add_argument("structure")
    sp.add_argument("--cap", type=int, default=20000)

    sp = add("separate")
    sp.add_argument("system")
    sp.add_argument("--max-degree", type=int, default=4)
    sp.add_argument("--budget", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=None)

    sp = add("tower", forbidden=True)
    sp.add_argument("chain", nargs="+", help="seed structure files, increasing")
    sp.add_argument("--levels", type=int, default=2)
    sp.add_argument("--out", required=True)
    sp.add_argument("--ext-slack", type=int, default=4)
    sp.add_argument("--triples-cap", type=int, default=6)
    sp.add_argument("--inner-size-cap", type=int, default=3)
    sp.add_argument("--budget", type=int, default=None,
                    help="override for --triples-cap")

    sp = add("fixture")
    sp.add_argument("name")
    sp.add_argument("--out", default=".")
    sp.add_argument("--n", type=int, default=3,
                    help="parameter for kn-free-seed")
    return p


def _load_forbidden(paths):
    return [load_structure(p) for p in paths]


def dispatch(argv) -> tuple[int, dict]:
    """Route one invocation; returns (exit code, report object)."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return (2 if exc.code not in (0, None) else 0,
                {"command": "usage", "status": "usage-error"})
    try:
        return _run(args)
    except EppaError as exc:
        return 2, {"command": args.command, "status": "input-error",
                   "error": str(exc)}
    except FileNotFoundError as exc:
        return 2, {"command": args.command, "status": "input-error",
                   "error": str(exc)}
    except json.JSONDecodeError as exc:
        return 2, {"command": args.command, "status": "input-error",
                   "error": f"malformed JSON: {exc}"}


def _run(args) -> tuple[int, dict]:
    cmd = args.command

    if cmd == "validate":
        raw = json.loads(Path(args.structure).read_text())
        report = validate_structure(raw)
        body = {
            "command": cmd,
            "inputs": _input_hashes([args.structure]),
            "status": "valid" if report.valid else "invalid",
            "findings": [{"kind": f.kind, "detail": f.detail}
                         for f in report.findings],
            "notes": [{"kind": f.kind, "detail": f.detail}
                      for f in report.notes],
        }
        return (0 if report.valid else 1), body

    if cmd == "homomorphism":
        a = load_structure(args.source)
        b = load_structure(args.target)
        h = find_homomorphism(a, b)
        body = {"command": cmd,
                "inputs": _input_hashes([args.source, args.target]),
                "status": "found" if h else "none",
                "witness": None if h is None else
                {k: v for k, v in h.graph}}
        return (0 if h else 1), body

    if cmd == "tfree":
        s = load_structure(args.structure)
        forbidden = _load_forbidden(args.forbidden)
        ok, witness = is_T_free(s, forbidden)
        body = {"command": cmd,
                "inputs": _input_hashes([args.structure] + args.forbidden),
                "status": "t-free" if ok else "pattern-found",
                "witness": None if witness is None else
                {k: v for k, v in witness.graph}}
        return (0 if ok else 1), body

    if cmd == "partial-isos":
        s = load_structure(args.structure)
        ps = enumerate_partial_isos(s, max_dom=args.max_dom,
                                    nonidentity=not args.all,
                                    max_members=args.cap)
        body = {"command": cmd, "inputs": _input_hashes([args.structure]),
                "status": "ok", "count": len(ps.members),
                "members": partial_iso_set_to_json(ps)}
        return 0, body

    if cmd == "factorize":
        s = load_structure(args.structure)
        fact = natural_factorization(s)
        body = {"command": cmd, "inputs": _input_hashes([args.structure]),
                "status": "ok",
                "classes": [{"members": list(members), "representative": rep}
                            for members, rep in fact.classes]}
        return 0, body

    if cmd == "amalgamate":
        c1 = load_structure(args.left)
        c2 = load_structure(args.right)
        over = load_structure(args.over)
        res = free_amalgamation(c1, c2, over)
        body = {"command": cmd,
                "inputs": _input_hashes([args.left, args.right, args.over]),
                "status": "ok",
                "structure": structure_to_json(res.structure),
                "right_renaming": {k: v for k, v in res.into2.graph}}
        return 0, body

    if cmd == "find-eppa":
        c = load_structure(args.structure)
        forbidden = _load_forbidden(args.forbidden)
        e = find_hl_extension(c, forbidden, max_size=args.max_size)
        body = {"command": cmd,
                "inputs": _input_hashes([args.structure] + args.forbidden),
                "max_size": args.max_size,
                "status": "found" if e else "none-within-bound"}
        if e is not None:
            body["witness"] = extension_to_json(e)
            if args.out:
                save_extension(args.out, e)
        return (0 if e else 1), body

    if cmd == "verify-ext":
        e = load_extension(args.extension)
        forbidden = _load_forbidden(args.forbidden)
        report = verify_hl_extension(e, forbidden)
        body = {"command": cmd,
                "inputs": _input_hashes([args.extension] + args.forbidden),
                "status": "valid" if report.valid else "invalid",
                "checks": report.as_dict()}
        return (0 if report.valid else 1), body

    if cmd == "canonical-cover":
        e = load_extension(args.extension)
        forbidden = _load_forbidden(args.forbidden)
        cover = canonical_cover(e, forbidden, cap=args.cap)
        body = {"command": cmd,
                "inputs": _input_hashes([args.extension] + args.forbidden),
                "status": "ok",
                "structure": structure_to_json(cover.structure),
                "pi": {k: v for k, v in cover.pi.graph},
                "psi": {k: v for k, v in cover.psi.graph},
                "classes": [{"class": info.class_index + 1,
                             "representative": info.representative,
                             "subgroup_order": info.subgroup_order,
                             "coset_count": info.coset_count}
                            for info in cover.classes],
                "notes": list(cover.notes)}
        return 0, body

    if cmd == "coherence":
        e1 = load_extension(args.inner)
        e2 = load_extension(args.outer)
        rep = check_coherent(e1, e2)
        body = {"command": cmd,
                "inputs": _input_hashes([args.inner, args.outer]),
                "status": "coherent" if rep.coherent else "not-coherent",
                "checks": rep.as_dict()}
        return (0 if rep.coherent else 1), body

    if cmd == "find-coherent":
        c2 = load_structure(args.base)
        e1 = load_extension(args.extension)
        forbidden = _load_forbidden(args.forbidden)
        e2 = find_coherent_extension(c2, e1, forbidden, max_size=args.max_size)
        body = {"command": cmd,
                "inputs": _input_hashes([args.base, args.extension]
                                        + args.forbidden),
                "max_size": args.max_size,
                "status": "found" if e2 else "none-within-bound",
                "note": ("a none answer refutes existence only up to the "
                         "stated bound")}
        if e2 is not None:
            body["witness"] = extension_to_json(e2)
            if args.out:
                save_extension(args.out, e2)
        return (0 if e2 else 1), body

    if cmd == "gamma":
        c = load_structure(args.structure)
        if args.quotient is not None:
            q = load_quotient(args.quotient)
            cover = build_coset_extension(c, q, cap=args.cap)
            body = {"command": cmd,
                    "inputs": _input_hashes([args.structure, args.quotient]),
                    "status": "ok",
                    "structure": structure_to_json(cover.structure),
                    "pi": {k: v for k, v in cover.pi.graph},
                    "classes": [{"class": info.class_index + 1,
                                 "coset_count": info.coset_count}
                                for info in cover.classes]}
            return 0, body
        frag = gamma_fragment(c, args.radius, cap=args.cap)
        body = {"command": cmd, "inputs": _input_hashes([args.structure]),
                "radius": args.radius, "status": "ok",
                "structure": structure_to_json(frag.structure),
                "labels": frag.labels, "pi": frag.pi}
        return 0, body

    if cmd == "solve-system":
        spec, system = load_system(args.system)
        if not isinstance(spec, FiniteCosetSpec):
            raise InputError("solve-system needs a finite spec")
        solution = solve_left_system(spec, system, cap=args.cap)
        body = {"command": cmd, "inputs": _input_hashes([args.system]),
                "status": "solvable" if solution is not None else "unsolvable",
                "assignment": None if solution is None else
                {v: list(p.images) for v, p in solution.items()}}
        return (0 if solution is not None else 1), body

    if cmd == "normalize":
        spec, system = load_system(args.system)
        out = normalize_system(system, args.stage)
        body = {"command": cmd, "inputs": _input_hashes([args.system]),
                "status": "ok", "stage": args.stage,
                "system": system_to_json(spec, out)}
        return 0, body

    if cmd == "gadget":
        spec, system = load_system(args.system)
        prime = normalize_system(system, "prime")
        bundle = system_to_gadget(prime, spec)
        body = {"command": cmd, "inputs": _input_hashes([args.system]),
                "status": "ok",
                "language": {n: a for n, a in bundle.language.symbols},
                "pattern": structure_to_json(bundle.pattern),
                "is_gaifman_clique": is_gaifman_clique(bundle.pattern),
                "variable_elements": {x: e for x, e in bundle.variable_elements},
                "coset_structure": {s: d for s, d in
                                    bundle.coset_structure_description}}
        return 0, body

    if cmd == "encode-conditions":
        c = load_structure(args.structure)
        forbidden = _load_forbidden(args.forbidden)
        ps = enumerate_partial_isos(c, nonidentity=True)
        conditions = encode_extension_conditions(c, ps, forbidden,
                                                 max_systems=args.cap)
        body = {"command": cmd,
                "inputs": _input_hashes([args.structure] + args.forbidden),
                "status": "ok",
                "slots": list(conditions.slots),
                "systems": [{"kind": ls.kind, "provenance": ls.provenance,
                             "system": system_to_json(conditions.spec,
                                                      ls.system)}
                            for ls in conditions.systems]}
        return 0, body

    if cmd == "separate":
        spec, system = load_system(args.system)
        if not isinstance(spec, FreeCosetSpec):
            raise InputError("separate needs a free spec")
        res = hl_separate(spec, system, max_degree=args.max_degree,
                          budget=args.budget, seed=args.seed)
        body = {"command": cmd, "inputs": _input_hashes([args.system]),
                "status": res.status, "tested": res.tested}
        if res.quotient is not None:
            from .serialize import quotient_to_json
            body["quotient"] = quotient_to_json(res.quotient)
            body["verified_unsolvable"] = verify_separation(
                spec, system, res.quotient)
        return (0 if res.status == "found" else 1), body

    if cmd == "tower":
        chain = [load_structure(p) for p in args.chain]
        forbidden = _load_forbidden(args.forbidden)
        triples = args.budget if args.budget is not None else args.triples_cap
        budget = TowerBudget(ext_slack=args.ext_slack, triples_cap=triples,
                             inner_size_cap=args.inner_size_cap)
        result = build_tower(chain, forbidden, levels=args.levels,
                             budget=budget)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        manifest = {"status": result.status, "levels": [],
                    "notes": list(result.notes)}
        for level in result.levels:
            base_file = out / f"level{level.index}.base.json"
            ext_file = out / f"level{level.index}.ext.json"
            sat_file = out / f"level{level.index}.saturated.json"
            save_structure(base_file, level.base)
            save_extension(ext_file, level.ext)
            save_structure(sat_file, level.saturated)
            manifest["levels"].append({
                "index": level.index,
                "files": {p.name: sha256_hex(p.read_bytes())
                          for p in (base_file, ext_file, sat_file)},
                "saturation_complete": level.saturation_complete,
                "coherent_with_previous":
                    None if level.coherent_with_prev is None
                    else level.coherent_with_prev.coherent,
            })
        manifest["chain_report"] = chain_report(result)
        (out / "manifest.json").write_bytes(canonical_json_bytes(manifest))
        body = {"command": cmd,
                "inputs": _input_hashes(list(args.chain) + args.forbidden),
                "status": result.status, "manifest": manifest}
        return (0 if result.status == "complete" else 1), body

    if cmd == "fixture":
        return _emit_fixture(args)

    raise InputError(f"unknown command {cmd!r}")


def _emit_fixture(args) -> tuple[int, dict]:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name, payload_bytes):
        path = out / name
        path.write_bytes(payload_bytes)
        written.append(path)

    if args.name == "s4-counterexample":
        t, c1, c2, d1, ext1 = s4_counterexample()
        for fname, s in (("t.json", t), ("c1.json", c1), ("c2.json", c2),
                         ("d1.json", d1)):
            emit(fname, canonical_json_bytes(structure_to_json(s)))
        emit("ext1.json", canonical_json_bytes(extension_to_json(ext1)))
    elif args.name == "graph-path-3":
        emit("path3.json", canonical_json_bytes(
            structure_to_json(path_graph(3))))
    elif args.name == "kn-free-seed":
        seed, pattern = kn_free_seed(args.n)
        emit(f"k{args.n}-free-seed.json",
             canonical_json_bytes(structure_to_json(seed)))
        emit(f"k{args.n}.json", canonical_json_bytes(structure_to_json(pattern)))
    elif args.name == "relation-free-pair":
        emit("pair.json", canonical_json_bytes(
            structure_to_json(relation_free_pair())))
    else:
        raise InputError(f"unknown fixture {args.name!r}")

    body = {"command": "fixture", "name": args.name, "status": "ok",
            "files": {p.name: sha256_hex(p.read_bytes()) for p in written}}
    return 0, body


def main(argv=None) -> int:
    code, report = dispatch(sys.argv[1:] if argv is None else argv)
    sys.stdout.buffer.write(canonical_json_bytes(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
