"""JSON formats for structures, extensions, quotients, and equation systems,
plus canonical (byte-reproducible) report serialization."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import InputError
from .extensions import HLExtension
from .groups import FiniteQuotient, Perm, WordContext, close_group
from .left_systems import (Equation, FiniteCosetSpec, FreeCosetSpec,
                           LeftSystem)
from .partial_iso import PartialIso, PartialIsoSet, enumerate_partial_isos
from .structures import Signature, Structure, validate_structure


def canonical_json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":"),
                       ensure_ascii=False) + "\n").encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# -- structures ----------------------------------------------------------------

def structure_to_json(s: Structure) -> dict:
    return {
        "signature": {name: arity for name, arity in s.sig.symbols},
        "domain": list(s.domain),
        "relations": {name: [list(row) for row in s.sorted_rows(name)]
                      for name, _ in s.sig.symbols},
    }


def structure_from_json(data) -> Structure:
    report = validate_structure(data)
    if not report.valid:
        details = "; ".join(f"{f.kind}: {f.detail}" for f in report.findings)
        raise InputError(f"invalid structure: {details}")
    sig = Signature.of(data.get("signature", {}))
    relations = {name: {tuple(row) for row in rows}
                 for name, rows in data.get("relations", {}).items()}
    return Structure.make(sig, data.get("domain", []), relations)


def load_structure(path) -> Structure:
    return structure_from_json(json.loads(Path(path).read_text()))


def save_structure(path, s: Structure) -> None:
    Path(path).write_bytes(canonical_json_bytes(structure_to_json(s)))


# -- partial isomorphisms --------------------------------------------------------

def partial_iso_to_json(p: PartialIso) -> dict:
    return {"map": [[a, b] for a, b in p.pairs]}


def partial_iso_set_to_json(ps: PartialIsoSet) -> list:
    return [partial_iso_to_json(m) for m in ps.members]


# -- quotients --------------------------------------------------------------------

def quotient_to_json(q: FiniteQuotient) -> dict:
    return {"degree": q.degree,
            "images": {name: list(p.images) for name, p in q.images}}


def quotient_from_json(data) -> FiniteQuotient:
    degree = data["degree"]
    images = {name: Perm(imgs) for name, imgs in data["images"].items()}
    for name, p in images.items():
        if sorted(p.images) != list(range(degree)):
            raise InputError(f"image of {name} is not a permutation of degree "
                             f"{degree}")
    return FiniteQuotient.make(degree, images)


def load_quotient(path) -> FiniteQuotient:
    return quotient_from_json(json.loads(Path(path).read_text()))


# -- extensions ---------------------------------------------------------------------

def extension_to_json(e: HLExtension) -> dict:
    return {
        "base": structure_to_json(e.base),
        "ext": structure_to_json(e.ext),
        "phi": [{"p": [[a, b] for a, b in e.ps.members[i].pairs],
                 "auto": sorted([a, b] for a, b in e.phi_as_map(i).items())}
                for i in range(len(e.ps.members))],
    }


def extension_from_json(data, base_dir=None) -> HLExtension:
    base_raw = data["base"]
    if isinstance(base_raw, str):
        path = Path(base_raw)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        base = load_structure(path)
    else:
        base = structure_from_json(base_raw)
    ext = structure_from_json(data["ext"])
    ps = enumerate_partial_isos(base, nonidentity=True)
    by_graph = {m.pairs: i for i, m in enumerate(ps.members)}
    phi: dict[int, Perm] = {}
    for entry in data["phi"]:
        pairs = tuple(sorted((tuple(kv) for kv in entry["p"]),
                             key=lambda kv: base.index(kv[0])))
        if pairs not in by_graph:
            raise InputError(f"phi entry for unknown partial isomorphism {pairs}")
        auto = dict(tuple(kv) for kv in entry["auto"])
        if set(auto) != set(ext.domain):
            raise InputError("automorphism entry must be total on the extension")
        phi[by_graph[pairs]] = Perm(tuple(ext.index(auto[d])
                                          for d in ext.domain))
    return HLExtension.build(base, ext, phi, ps=ps)


def load_extension(path) -> HLExtension:
    path = Path(path)
    return extension_from_json(json.loads(path.read_text()), path.parent)


def save_extension(path, e: HLExtension) -> None:
    Path(path).write_bytes(canonical_json_bytes(extension_to_json(e)))


# -- systems --------------------------------------------------------------------------

def system_to_json(spec, system: LeftSystem) -> dict:
    if isinstance(spec, FreeCosetSpec):
        spec_json = {"kind": "free", "generators": list(spec.ctx.names)}
        subgroups = {name: {"gens": [spec.ctx.format(w) for w in gens]}
                     for name, gens in spec.subgroup_gens}
        constants = {name: spec.ctx.format(w) for name, w in spec.constants}
    else:
        gen_names = [f"s{i}" for i in range(len(spec.group.generators))]
        spec_json = {
            "kind": "finite",
            "degree": len(spec.group.carrier),
            "generators": {n: list(p.images)
                           for n, p in zip(gen_names, spec.group.generators)},
        }
        subgroups = {name: {"elements": sorted(list(p.images) for p in sub)}
                     for name, sub in spec.subgroups}
        constants = {name: list(p.images) for name, p in spec.constants}
    equations = []
    for eq in system.equations:
        rhs = {}
        if eq.rhs_var is not None:
            rhs["var"] = eq.rhs_var
        if eq.rhs_const is not None:
            rhs["const"] = eq.rhs_const
        equations.append({"lhs": eq.lhs, "slot": eq.slot, "rhs": rhs})
    return {
        "spec": spec_json,
        "subgroups": subgroups,
        "constants": constants,
        "variables": list(system.variables),
        "equations": equations,
    }


def system_from_json(data):
    """Returns (spec, system); the spec is free or finite per the file."""
    spec_json = data.get("spec", {})
    kind = spec_json.get("kind", "free")
    if kind == "free":
        ctx = WordContext.free(spec_json.get("generators", []))
        subgroup_gens = {
            name: [ctx.parse(w) for w in body.get("gens", [])]
            for name, body in data.get("subgroups", {}).items()}
        constants = {name: ctx.parse(w)
                     for name, w in data.get("constants", {}).items()}
        spec = FreeCosetSpec.make(ctx, subgroup_gens, constants)
    elif kind == "finite":
        degree = spec_json["degree"]
        gen_map = {n: Perm(imgs) for n, imgs in spec_json["generators"].items()}
        carrier = tuple(str(i) for i in range(degree))
        if gen_map:
            group = close_group(tuple(gen_map[n] for n in sorted(gen_map)),
                                carrier=carrier)
        else:
            from .groups import PermGroup
            group = PermGroup(carrier, (), (Perm.identity(degree),))
        ctx = WordContext.free(sorted(gen_map))

        def resolve(text_or_perm):
            if isinstance(text_or_perm, list):
                return Perm(text_or_perm)
            word = ctx.parse(text_or_perm)
            out = Perm.identity(degree)
            for i, sign in word:
                p = gen_map[ctx.names[i]]
                out = out * (p if sign == 1 else p.inv())
            return out

        subgroup_gens = {}
        for name, body in data.get("subgroups", {}).items():
            if "elements" in body:
                subgroup_gens[name] = [Perm(imgs) for imgs in body["elements"]]
            else:
                subgroup_gens[name] = [resolve(w) for w in body.get("gens", [])]
        constants = {name: resolve(w)
                     for name, w in data.get("constants", {}).items()}
        spec = FiniteCosetSpec.make(group, subgroup_gens, constants)
    else:
        raise InputError(f"unknown spec kind {kind!r}")

    variables = list(data.get("variables", []))
    equations = []
    for eq in data.get("equations", []):
        rhs = eq.get("rhs", {})
        equations.append(Equation(eq["lhs"], eq["slot"], rhs.get("var"),
                                  rhs.get("const")))
        for v in (eq["lhs"], rhs.get("var")):
            if v is not None and v not in variables:
                variables.append(v)
    constants_declared = list(data.get("constants", {}))
    return spec, LeftSystem.make(variables, constants_declared, equations)


def load_system(path):
    return system_from_json(json.loads(Path(path).read_text()))
