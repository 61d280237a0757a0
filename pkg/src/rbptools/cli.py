"""Command line front end: ``rbptools {verify,build,distort,embed,gen,bp}``.

Exit codes: 0 success, 1 refuted pair or violated bound, 2 undecided pairs,
3 bad input or failed precondition, 4 construction check failed.
"""

import argparse
import os
import sys

from . import formats
from .construction import construct
from .embedding import default_embedding, embed_tree_graded, measure_embedding
from .errors import ConstructionError, GraphError, PreconditionError, RbpError, SchemaError
from .generators import GeneratorSpec, generate, subdivide
from .metric_graph import check_manning_bp
from .rbp import (
    RbpStructure,
    check_tree_graded,
    thicken,
    tree_graded_certificate,
    verify_rbp,
    with_verified_certificates,
)
from .treegraded import TreeGradedSpace, build_tree_graded, collapse, measure_distortion

EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_INPUT, EXIT_CONSTRUCTION = 0, 1, 2, 3, 4


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _pairs(text):
    if text == "all":
        return text
    if text.startswith("sample:"):
        _positive(text.split(":", 1)[1])
        return text
    raise argparse.ArgumentTypeError("use 'all' or 'sample:K'")


def _common(p, pieces=True):
    p.add_argument("--input", required=True, help="graph document (JSON)")
    if pieces:
        p.add_argument("--pieces", required=True, help="decomposition document (JSON)")
    p.add_argument("--pairs", type=_pairs, default=None, help="'all' or 'sample:K' (sampling needs --seed)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def _construction_args(p):
    p.add_argument("--M", type=_positive, default=None, help="bottleneck constant (default: document value or 1)")
    p.add_argument("--R", type=_positive, default=None, help="stratum width (default 160M)")
    p.add_argument("--b", type=_nonneg, default=None, help="thickening / cut-scan parameter (default 15M)")
    p.add_argument("--thicken", action="store_true", help="thicken the input before building")
    p.add_argument("--no-cut-check", action="store_true", help="skip the exhaustive cut-ball scan")
    p.add_argument("--dot", action="store_true", help="also write DOT files next to graph artifacts")


def build_parser():
    ap = argparse.ArgumentParser(prog="rbptools", description="Relative bottleneck tools")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify the relative bottleneck property")
    _common(p)
    p.add_argument("--M", type=_positive, default=None)
    p.add_argument("--tree-graded", action="store_true", help="use 1-neighbourhoods of the pieces and M=2")

    p = sub.add_parser("build", help="construct the tree-graded space")
    _common(p)
    _construction_args(p)
    p.add_argument("--artifacts", help="directory for the realised space, tree and trace")

    p = sub.add_parser("distort", help="measure the collapse map against the additive bound")
    _common(p)
    _construction_args(p)

    p = sub.add_parser("embed", help="embed a tree-graded graph into a product of trees")
    _common(p)
    p.add_argument("--embeddings", help="tabulated per-piece embeddings (JSON)")
    p.add_argument("--arc-length", type=_positive, default=1)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--artifacts", help="directory for the coordinate trees")

    p = sub.add_parser("gen", help="generate test inputs")
    p.add_argument("--family", required=True, choices=["tree_of_pieces", "random_tree_graded", "cycle_chain", "grid", "subdivision"])
    p.add_argument("--pieces", type=_positive, default=5, dest="n_pieces")
    p.add_argument("--templates", default="cycle", help="comma list of cycle,path,complete,edge")
    p.add_argument("--sizes", default="3,8", help="min,max piece size")
    p.add_argument("--depth", type=_positive, default=None)
    p.add_argument("--size", type=_positive, default=8, help="cycle size for cycle_chain")
    p.add_argument("--n", type=_positive, default=20, help="grid side")
    p.add_argument("--k", type=_positive, default=2, help="subdivision factor")
    p.add_argument("--input", help="graph to subdivide")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix: writes PREFIX.graph.json and PREFIX.pieces.json")
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("bp", help="check the plain bottleneck property at scale delta")
    _common(p, pieces=False)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--max-failures", type=_positive, default=None)
    return ap


# -- helpers --------------------------------------------------------------
def _emit(report, args):
    if args.format == "json":
        text = formats.dumps(report)
    else:
        text = render_text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def render_text(report):
    """Human summary: scalar fields, then list lengths."""
    lines = [f"[{report.get('kind', 'report')}]"]
    for k, v in sorted(report.items()):
        if k == "kind":
            continue
        if isinstance(v, (list, dict)):
            lines.append(f"{k}: {len(v)} item(s)")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def _write_graph(path, g, dot, name="G"):
    formats.write(path, formats.graph_to_doc(g))
    if dot:
        with open(os.path.splitext(path)[0] + ".dot", "w") as fh:
            fh.write(formats.to_dot(g, name))


def _load_structure(args, tree_graded=False):
    g = formats.graph_from_doc(formats.load(args.input))
    dec, M_doc, chains = formats.pieces_from_doc(formats.load(args.pieces), g)
    if tree_graded:
        return tree_graded_certificate(g, dec.pieces, dec.base_piece)
    M = args.M or M_doc or 1
    return RbpStructure(g, dec, M, chains)


def _check_sampling(args):
    if args.pairs and args.pairs != "all" and args.seed is None:
        raise SchemaError("sampling needs a seed", field="--seed")


def _verified(s, args):
    report = verify_rbp(s, args.pairs or "all", args.seed, args.threads)
    return report, with_verified_certificates(s, report)


def _construct(args):
    s = _load_structure(args)
    report, s = _verified(s, args)
    if report.exit_code:
        return None, None, report
    if args.thicken:
        s, _ = thicken(s, args.b)
        report, s = _verified(s, args)
        if report.exit_code:
            return None, None, report
    state = construct(s, R=args.R, b=args.b, check_cuts=not args.no_cut_check)
    return s, state, report


# -- commands -------------------------------------------------------------
def cmd_verify(args):
    _check_sampling(args)
    s = _load_structure(args, args.tree_graded)
    report = verify_rbp(s, args.pairs or "all", args.seed, args.threads)
    _emit(report.to_dict(), args)
    return report.exit_code


def cmd_build(args):
    _check_sampling(args)
    s, state, vrep = _construct(args)
    if state is None:
        _emit(vrep.to_dict(), args)
        return vrep.exit_code
    t = build_tree_graded(state)
    trace = state.to_dict()
    trace["realized"] = {"n": t.realized.n, "edges": len(t.realized.edges)}
    trace["underlying_tree"] = [list(e) for e in t.tree_edges()]
    if args.artifacts:
        os.makedirs(args.artifacts, exist_ok=True)
        _write_graph(os.path.join(args.artifacts, "tx.graph.json"), t.realized, args.dot, "TX")
        tree = _tree_graph(t)
        _write_graph(os.path.join(args.artifacts, "tree.graph.json"), tree, args.dot, "Tree")
        formats.write(os.path.join(args.artifacts, "trace.json"), trace)
    _emit(trace, args)
    return EXIT_OK


def _tree_graph(t):
    from .metric_graph import MetricGraph

    return MetricGraph(len(t.pieces), t.tree_edges())


def cmd_distort(args):
    _check_sampling(args)
    s, state, vrep = _construct(args)
    if state is None:
        _emit(vrep.to_dict(), args)
        return vrep.exit_code
    t = build_tree_graded(state)
    cmap = collapse(t, state)
    rep = measure_distortion(t, cmap, state.M, args.pairs, args.seed, R=state.R, strict=False)
    _emit(rep.to_dict(), args)
    return EXIT_OK if rep.bound_ok and rep.lipschitz_violations == 0 else EXIT_REFUTED


def cmd_embed(args):
    _check_sampling(args)
    g = formats.graph_from_doc(formats.load(args.input))
    dec, _, _ = formats.pieces_from_doc(formats.load(args.pieces), g)
    check_tree_graded(g, dec.pieces)
    t = TreeGradedSpace.from_pieces(g, dec.pieces, dec.base_piece, args.arc_length)
    embeds = [default_embedding(p) for p in t.pieces]
    if args.embeddings:
        table = formats.embeddings_from_doc(formats.load(args.embeddings), t.pieces)
        for i, e in table.items():
            embeds[i] = e
    pe = embed_tree_graded(t, embeds, pad=True)
    rep = measure_embedding(pe, args.pairs, args.seed, strict=False)
    out = rep.to_dict()
    out["piece_embeddings"] = [{"piece": i, "name": e.name, "l": e.l, "K": e.K, "C": e.C} for i, e in enumerate(embeds)]
    if args.artifacts:
        os.makedirs(args.artifacts, exist_ok=True)
        for j, tj in enumerate(pe.trees):
            _write_graph(os.path.join(args.artifacts, f"T{j + 1}.graph.json"), tj.realized, args.dot, f"T{j + 1}")
    _emit(out, args)
    return EXIT_OK if rep.passed else EXIT_REFUTED


def cmd_gen(args):
    lo, hi = (int(x) for x in args.sizes.split(","))
    templates = tuple(t.strip() for t in args.templates.split(",") if t.strip())
    if args.family == "subdivision":
        if not args.input:
            raise SchemaError("subdivision needs --input", field="--input")
        g = formats.graph_from_doc(formats.load(args.input))
        h, _ = subdivide(g, args.k)
        _write_graph(args.out + ".graph.json", h, args.dot)
        return EXIT_OK
    params = {"pieces": args.n_pieces, "templates": templates, "sizes": (lo, hi), "size": args.size, "n": args.n}
    if args.depth is not None:
        params["depth"] = args.depth
    gen = generate(GeneratorSpec.make(args.family, seed=args.seed, **params))
    _write_graph(args.out + ".graph.json", gen.graph, args.dot)
    formats.write(args.out + ".pieces.json", formats.pieces_to_doc(gen.decomposition))
    return EXIT_OK


def cmd_bp(args):
    _check_sampling(args)
    g = formats.graph_from_doc(formats.load(args.input))
    rep = check_manning_bp(g, args.delta, args.pairs or "all", args.seed, args.max_failures)
    _emit(rep.to_dict(), args)
    return EXIT_OK if rep.passed else EXIT_REFUTED


COMMANDS = {
    "verify": cmd_verify,
    "build": cmd_build,
    "distort": cmd_distort,
    "embed": cmd_embed,
    "gen": cmd_gen,
    "bp": cmd_bp,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SchemaError, GraphError, PreconditionError, ValueError) as ex:
        print(f"rbptools: error: {ex}", file=sys.stderr)
        return EXIT_INPUT
    except ConstructionError as ex:
        print(f"rbptools: construction check failed: {ex}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except RbpError as ex:
        print(f"rbptools: error: {ex}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
