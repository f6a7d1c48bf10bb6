"""Command-line front end.

Every subcommand prints a deterministic document: JSON (sorted keys,
two-space indent), plain text, or DOT for the tessellation graph.
Domain errors exit 1 with a structured JSON object on stderr; usage
errors exit 2.  ``--threads`` is accepted for interface compatibility
and validated, but execution is sequential, which makes the byte-level
determinism across thread counts trivial.  ``--seed`` is reserved for
randomized property subcommands; the fixed default keeps every
invocation reproducible.

Vectors on the command line are comma-separated integers (rationals as
p/q); lists of vectors are separated by semicolons.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .catalog import load_catalog, resolve_lattice
from .chambers import (
    chamber_at,
    encode_flag,
    explore_tessellation,
    facet_walls,
    reduce_to_base,
)
from .core import vector_to_json
from .enumeration import (
    definite_short_vectors,
    separating_walls,
    vectors_of_square,
    wall_spec,
)
from .errors import MbmlatError, ValidationError
from .orbits import (
    Isometry,
    canonical_orbit_rep,
    face_orbit_census,
    facet_reflection_generators,
    isometry,
    kneser_degenerate_reps,
    reflection,
)


def _parse_vector(text: str):
    parts = [p.strip() for p in text.split(",") if p.strip() != ""]
    if not parts:
        raise ValidationError(f"empty vector {text!r}")
    out = []
    for p in parts:
        if "/" in p:
            out.append(Fraction(p))
        else:
            try:
                out.append(int(p))
            except ValueError as exc:
                raise ValidationError(f"bad vector entry {p!r}") from exc
    return tuple(out)


def _parse_vectors(text: str):
    return [_parse_vector(part) for part in text.split(";") if part.strip()]


def _parse_squares(text: str):
    try:
        squares = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad squares list {text!r}") from exc
    return squares


def _spec_from_args(args):
    return wall_spec(_parse_squares(args.squares), require_reflective=args.reflective)


def _emit_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _vec_text(v) -> str:
    return ",".join(str(x) for x in vector_to_json(v))


def _print(doc: str) -> int:
    sys.stdout.write(doc)
    return 0


# ---------------------------------------------------------------------------
# subcommands


def _cmd_info(args) -> int:
    L = resolve_lattice(args.lattice)
    payload = {
        "name": L.name,
        "rank": L.rank,
        "signature": list(L.signature),
        "discriminant": L.discriminant,
    }
    if args.format == "text":
        return _print(
            f"name: {L.name}\nrank: {L.rank}\n"
            f"signature: ({L.signature[0]},{L.signature[1]})\ndiscriminant: {L.discriminant}\n"
        )
    return _print(_emit_json(payload))


def _cmd_enumerate(args) -> int:
    L = resolve_lattice(args.lattice)
    if args.min_square is not None and args.square is not None:
        raise ValidationError("choose one of --min-square (definite mode) or --square/--box (oracle mode)")
    if args.min_square is not None:
        vectors = definite_short_vectors(L, args.min_square)
    elif args.square is not None:
        vectors = vectors_of_square(L, args.square, args.box)
    else:
        raise ValidationError("enumerate needs --min-square or --square")
    if args.format == "text":
        return _print("".join(_vec_text(v) + "\n" for v in vectors))
    return _print(_emit_json([vector_to_json(v) for v in vectors]))


def _cmd_separate(args) -> int:
    L = resolve_lattice(args.lattice)
    spec = _spec_from_args(args)
    walls = separating_walls(L, _parse_vector(args.v0), _parse_vector(args.v1), spec)
    if args.format == "text":
        return _print("".join(_vec_text(w.vector) + "\n" for w in walls))
    return _print(_emit_json([vector_to_json(w.vector) for w in walls]))


def _cmd_reduce(args) -> int:
    L = resolve_lattice(args.lattice)
    spec = _spec_from_args(args)
    res = reduce_to_base(L, _parse_vector(args.v), _parse_vector(args.base), spec)
    payload = {
        "word": [vector_to_json(w.vector) for w in res.word],
        "image": vector_to_json(res.image),
        "canonical_point": vector_to_json(res.canonical_point),
    }
    if args.format == "text":
        lines = ["word:"] + [f"  {_vec_text(w.vector)}" for w in res.word]
        lines.append(f"image: {_vec_text(res.image)}")
        return _print("\n".join(lines) + "\n")
    return _print(_emit_json(payload))


def _cmd_facets(args) -> int:
    L = resolve_lattice(args.lattice)
    spec = _spec_from_args(args)
    base = _parse_vector(args.base) if args.base else _parse_vector(args.witness)
    ch = chamber_at(L, _parse_vector(args.witness), base, spec)
    res = facet_walls(L, ch, args.search_bound)
    payload = {
        "search_bound": res.search_bound,
        "complete": res.complete,
        "faces": [
            {
                "wall": vector_to_json(f.supporting_wall.vector),
                "square": f.supporting_wall.square,
                "witness_on_wall": vector_to_json(f.witness_on_wall),
            }
            for f in res.faces
        ],
        "undecided": [vector_to_json(w.vector) for w in res.undecided],
    }
    if args.format == "text":
        lines = [f"facets (search_bound {res.search_bound}):"]
        lines += [f"  wall {_vec_text(f.supporting_wall.vector)}  witness {_vec_text(f.witness_on_wall)}"
                  for f in res.faces]
        if res.undecided:
            lines.append("undecided: " + "; ".join(_vec_text(w.vector) for w in res.undecided))
        return _print("\n".join(lines) + "\n")
    return _print(_emit_json(payload))


def _cmd_flag(args) -> int:
    L = resolve_lattice(args.lattice)
    spec = _spec_from_args(args)
    flag = encode_flag(L, _parse_vectors(args.chain), spec)
    payload = {
        "depth": flag.depth,
        "entries": [
            {
                "vector": vector_to_json(e.vector),
                "square": e.square,
                "orientation": e.orientation,
                "unscaled": vector_to_json(e.unscaled),
                "unscaled_square": e.unscaled_square,
            }
            for e in flag.entries
        ],
    }
    if args.format == "text":
        lines = [
            f"{i}: vector {_vec_text(e.vector)} square {e.square} orient {e.orientation:+d} "
            f"unscaled_square {e.unscaled_square}"
            for i, e in enumerate(flag.entries, 1)
        ]
        return _print("\n".join(lines) + "\n")
    return _print(_emit_json(payload))


def _cmd_explore(args) -> int:
    L = resolve_lattice(args.lattice)
    spec = _spec_from_args(args)
    graph = explore_tessellation(L, _parse_vector(args.base), spec, args.depth, args.search_bound)
    if args.format == "dot":
        return _print(graph.to_dot())
    if args.format == "text":
        lines = [f"nodes: {len(graph.nodes)}", f"edges: {len(graph.edges)}"]
        return _print("\n".join(lines) + "\n")
    return _print(_emit_json(graph.to_json_dict()))


def _load_generators(L, args):
    gens: list[Isometry] = []
    if args.generators:
        with open(args.generators, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise ValidationError("generator file must hold a JSON list of matrices")
        gens.extend(isometry(L, m) for m in data)
    if args.reflections:
        gens.extend(reflection(L, v) for v in _parse_vectors(args.reflections))
    return gens


def _cmd_orbits(args) -> int:
    L = resolve_lattice(args.lattice)
    gens = _load_generators(L, args)
    if not gens:
        raise ValidationError("orbits needs --generators FILE and/or --reflections vectors")
    res = canonical_orbit_rep(L, _parse_vector(args.v), gens, args.word_budget)
    payload = {
        "representative": vector_to_json(res.vector),
        "complete": res.complete,
        "visited": res.visited,
    }
    if args.format == "text":
        return _print(f"representative: {_vec_text(res.vector)}\ncomplete: {res.complete}\n")
    return _print(_emit_json(payload))


def _cmd_kneser(args) -> int:
    L = resolve_lattice(args.lattice)
    reps = kneser_degenerate_reps(L, args.r, _parse_vectors(args.base_reps))
    if args.format == "text":
        return _print("".join(_vec_text(v) + "\n" for v in reps))
    return _print(_emit_json([vector_to_json(v) for v in reps]))


def _cmd_census(args) -> int:
    L = resolve_lattice(args.lattice)
    spec = _spec_from_args(args)
    base = _parse_vector(args.base)
    gens = _load_generators(L, args)
    if not gens:
        gens = list(facet_reflection_generators(L, base, spec, args.search_bound))
    table = face_orbit_census(
        L, base, spec, gens, args.depth,
        word_budget=args.word_budget, search_bound=args.search_bound, max_codim=args.max_codim,
    )
    if args.format == "text":
        return _print(table.to_text())
    return _print(_emit_json(table.to_json_dict()))


def _cmd_validate_catalog(args) -> int:
    entries = load_catalog(args.path)
    payload = [
        {
            "name": e.name,
            "rank": e.lattice.rank,
            "signature": list(e.lattice.signature),
            "discriminant": e.lattice.discriminant,
            "fujiki_constant": e.fujiki_constant,
            "mbm_square_bound": e.wall_square_bound,
        }
        for e in entries
    ]
    if args.format == "text":
        lines = [
            f"OK {e.name}: rank {e.lattice.rank}, signature "
            f"({e.lattice.signature[0]},{e.lattice.signature[1]}), discriminant {e.lattice.discriminant}"
            for e in entries
        ]
        return _print("\n".join(lines) + "\n")
    return _print(_emit_json(payload))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mbmlat",
        description="Exact wall-and-chamber geometry over integral quadratic lattices.",
    )
    p.add_argument("--seed", type=int, default=1,
                   help="seed for randomized property subcommands (reserved; fixed default)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; output bytes are identical for any value")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, formats=("json", "text")):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("--format", choices=formats, default="json")
        return sp

    sp = add("info", _cmd_info, "lattice metadata (signature, discriminant)")
    sp.add_argument("--lattice", required=True)

    sp = add("enumerate", _cmd_enumerate, "short vectors (definite) or box oracle")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--min-square", type=int, dest="min_square")
    sp.add_argument("--square", type=int)
    sp.add_argument("--box", type=int, default=2)

    sp = add("separate", _cmd_separate, "walls crossed between two positive classes")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--v0", required=True)
    sp.add_argument("--v1", required=True)
    sp.add_argument("--squares", required=True)
    sp.add_argument("--reflective", action="store_true")

    sp = add("reduce", _cmd_reduce, "reflection-word reduction into the base chamber")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--base", required=True)
    sp.add_argument("--squares", required=True)
    sp.add_argument("--reflective", action="store_true")

    sp = add("facets", _cmd_facets, "facet walls of a chamber")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--base")
    sp.add_argument("--squares", required=True)
    sp.add_argument("--reflective", action="store_true")
    sp.add_argument("--search-bound", type=int, default=24, dest="search_bound")

    sp = add("flag", _cmd_flag, "oriented-flag encoding of a wall chain")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--chain", required=True, help="semicolon-separated wall vectors")
    sp.add_argument("--squares", required=True)
    sp.add_argument("--reflective", action="store_true")

    sp = add("explore", _cmd_explore, "BFS chamber tessellation graph", formats=("json", "text", "dot"))
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--base", required=True)
    sp.add_argument("--squares", required=True)
    sp.add_argument("--reflective", action="store_true")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--search-bound", type=int, default=24, dest="search_bound")

    sp = add("orbits", _cmd_orbits, "canonical orbit representative under generators")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--generators", help="JSON file with a list of matrices")
    sp.add_argument("--reflections", help="semicolon-separated reflection classes")
    sp.add_argument("--word-budget", type=int, default=8, dest="word_budget")

    sp = add("kneser", _cmd_kneser, "degenerate-kernel orbit representatives")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--base-reps", required=True, dest="base_reps",
                    help="semicolon-separated complement representatives")

    sp = add("census", _cmd_census, "face-orbit census with saturation profile")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--base", required=True)
    sp.add_argument("--squares", required=True)
    sp.add_argument("--reflective", action="store_true")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--generators", help="JSON file with a list of matrices")
    sp.add_argument("--reflections", help="semicolon-separated reflection classes")
    sp.add_argument("--word-budget", type=int, default=8, dest="word_budget")
    sp.add_argument("--search-bound", type=int, default=24, dest="search_bound")
    sp.add_argument("--max-codim", type=int, default=2, choices=(1, 2), dest="max_codim")

    sp = add("validate-catalog", _cmd_validate_catalog, "validate all catalog entries")
    sp.add_argument("--path", help="catalog file (default: packaged, or MBM_CATALOG_PATH)")

    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            parser.error("--threads must be >= 1")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MbmlatError as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n"
        )
        return 1


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
