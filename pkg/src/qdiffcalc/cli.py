"""Command line front end.

    qdiffcalc check      --algebra A.json --N 3 --differential D.json
    qdiffcalc envelope   --algebra A.json --N 3 --max-degree 5
    qdiffcalc hochschild --algebra A.json --N 3 --max-degree 6
    qdiffcalc homology   --algebra A.json --N 3 --max-degree 7 --complex tensor
    qdiffcalc hexagon    --algebra A.json --N 3 --differential D.json
    qdiffcalc reproduce

Reports are JSON, written to --out or stdout, with sorted keys and exact
scalar strings.  Exit status: 0 on success, 1 on a law violation or a
failed check, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .graded import AlgebraError, DegreeOneMap, GradedMap, covering, lift_map, load_algebra
from .homology import (ComplexView, IllFormed, UngradedComplex, WindowTooSmall, cohomology_table,
                       hexagon_check, long_sequences)
from .qdla import QDiffAlgebra, attach, law_report
from .qscalar import QMode

COMPLEXES = ("differential", "tensor", "tensor-prime", "envelope", "forms", "hochschild")


class InputError(Exception):
    pass


def load_differential(path, algebra, mode):
    """Differential file: {"blocks": {"<degree>": [[source, target, "scalar"], ...]}}.

    Sources and targets are basis labels or indices of the algebra; the key
    is the source degree (a residue for Z_N-graded algebras).
    """
    data = json.loads(Path(path).read_text())
    images = {}
    for key, entries in data.get("blocks", {}).items():
        deg = int(key)
        for src, tgt, c in entries:
            i, j = _basis_index(algebra, src), _basis_index(algebra, tgt)
            if algebra.degree(i) != deg:
                raise InputError(f"{src} is not in degree {deg}")
            images.setdefault(i, {})
            v = mode(c)
            if v:
                images[i][j] = images[i].get(j, mode.zero) + v
    return images


def _basis_index(algebra, x):
    if isinstance(x, int):
        return x
    if x in algebra.labels:
        return algebra.labels.index(x)
    raise InputError(f"unknown basis element {x!r}")


def parse_inner(text, algebra, mode):
    """'E2_1:1,E3_2:1/2' -> vector."""
    out = {}
    for part in text.split(","):
        lab, _, c = part.partition(":")
        out[_basis_index(algebra, lab.strip())] = mode(c.strip() or "1")
    return out


def _mode(args):
    return QMode.from_string(args.N)


def _algebra(args, mode):
    if not args.algebra:
        raise InputError("--algebra is required")
    try:
        return load_algebra(args.algebra, mode, getattr(args, "max_degree", None))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot read algebra {args.algebra}: {exc}") from exc


def _given_map(args, alg, mode):
    """The degree one map from --differential or --inner, on alg itself."""
    from .qdla import inner_map

    if args.differential:
        return load_differential(args.differential, alg, mode)
    if args.inner:
        return inner_map(alg, parse_inner(args.inner, alg, mode), mode)
    raise InputError("need --differential or --inner")


def _n_graded(alg, images, max_degree):
    """(N-graded algebra, degree one map on it, base map or None)."""
    if alg.modulus is not None:
        D = GradedMap(alg, images, 1)
        cover = covering(alg, max_degree)
        return cover, DegreeOneMap(cover, lift_map(D, cover).images), D
    return alg, DegreeOneMap(alg, images), None


def build_qdla(args, mode, check=True):
    """The q-differential algebra selected by --complex."""
    from .cochain import cochain_calculus
    from .tensor import envelope_abstract, tensor_calculus

    alg = _algebra(args, mode)
    top = args.max_degree
    kind = args.complex
    if kind == "differential" or (kind is None and (args.differential or args.inner)):
        space, d, base = _n_graded(alg, _given_map(args, alg, mode), top)
        qda = attach(space, d, mode) if check else QDiffAlgebra(space, d, mode)
        qda.base_map = base
        return qda
    if kind in ("tensor", None):
        return tensor_calculus(alg, top, mode, check=check)
    if kind == "tensor-prime":
        return tensor_calculus(alg, top, mode, variant="d_prime_q", check=check)
    if kind == "envelope":
        return envelope_abstract(alg, top, mode, check=check)
    if kind == "forms":
        return cochain_calculus(alg, top, mode, which="m_star_q", check=check)
    if kind == "hochschild":
        return cochain_calculus(alg, top, mode, which="delta_q", check=check)
    raise InputError(f"unknown complex {kind!r}")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def emit(report, args):
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args):
    mode = _mode(args)
    alg = _algebra(args, mode)
    space, d, _ = _n_graded(alg, _given_map(args, alg, mode), args.max_degree)
    report = law_report(space, d, mode)
    report["mode"] = str(mode)
    report["max_degree"] = space.max_degree
    emit(report, args)
    return 0 if report["ok"] else 1


def cmd_envelope(args):
    from .tensor import (canonical_embedding, embedding_ranks, envelope_abstract, envelope_dimension,
                         omega_q_embedded, tensor_calculus)

    mode = _mode(args)
    alg = _algebra(args, mode)
    top = args.max_degree
    env = envelope_abstract(alg, top, mode)
    dims = env.algebra.dims()
    print(" ".join(map(str, dims)))
    report = {"mode": str(mode), "dims": dims}
    if mode.N is not None:
        report["formula"] = [envelope_dimension(alg.dim, n, mode.N - 1) for n in range(top + 1)]
    tq = tensor_calculus(alg, top, mode)
    emb = omega_q_embedded(alg, top, mode, qda=tq)
    rows = embedding_ranks(env.algebra, canonical_embedding(env, tq), tq.algebra, emb)
    report["embedded_dims"] = emb.dims()
    report["isomorphic"] = all(a == r == emb.dim(n) and inside for n, (a, r, inside) in rows.items())
    if args.dump_basis:
        report["basis"] = {n: [env.algebra.labels[i] for i in env.algebra.basis_in_degree(n)] for n in range(top + 1)}
    if args.out:
        emit(report, args)
    ok = report["isomorphic"] and report.get("formula", dims) == dims
    return 0 if ok else 1


def _homology_report(qda, args):
    view = ComplexView.from_qdla(qda)
    return {"mode": str(qda.mode), "n_max": view.n_max, "table": cohomology_table(view)}, view


def cmd_homology(args):
    mode = _mode(args)
    if mode.N is None:
        raise InputError("homology needs --N")
    if args.differential or args.inner:
        alg = _algebra(args, mode)
        space, d, _ = _n_graded(alg, _given_map(args, alg, mode), args.max_degree)
        qda = QDiffAlgebra(space, d, mode)
    else:
        qda = build_qdla(args, mode, check=False)
    report, _ = _homology_report(qda, args)
    emit(report, args)
    return 0


def cmd_hochschild(args):
    mode = _mode(args)
    if mode.N is None:
        raise InputError("hochschild needs --N")
    args.complex = "hochschild"
    qda = build_qdla(args, mode, check=False)
    laws = law_report(qda.algebra, qda.d, mode)
    report, _ = _homology_report(qda, args)
    report["laws"] = laws
    emit(report, args)
    return 0 if laws["ok"] else 1


def cmd_hexagon(args):
    mode = _mode(args)
    N = mode.N
    if N is None:
        raise InputError("hexagon needs --N")
    qda = build_qdla(args, mode)
    view = ComplexView.from_qdla(qda)
    pairs = [(args.l, args.m)] if args.l else [(l, m) for l in range(1, N) for m in range(1, N - l + 1)]
    report = {"mode": str(mode), "hexagons": [], "sequences": []}
    base = getattr(qda, "base_map", None)
    ok = True
    for l, m in pairs:
        if base is not None:
            hx = hexagon_check(UngradedComplex(base.space.dim, base.images, mode), l, m)
            report["hexagons"].append(hx)
            ok = ok and hx["exact"]
        for p in range(N):
            nodes = long_sequences(view, l, m, p)
            ok = ok and all(x["status"] != "not exact" for x in nodes)
            report["sequences"].append({"l": l, "m": m, "p": p, "nodes": nodes})
    report["exact"] = ok
    emit(report, args)
    return 0 if ok else 1


def cmd_reproduce(args):
    from .acceptance import run_all

    results = run_all(args.threads)
    width = max(len(r[0]) for r in results)
    for name, ok, detail, secs in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {secs:7.2f}s  {detail}")
    if args.out:
        emit([{"criterion": n, "passed": ok, "detail": d, "seconds": round(s, 3)}
              for n, ok, d, s in results], args)
    return 0 if all(r[1] for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="qdiffcalc", description="Exact q-differential calculus")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, max_degree=6):
        p.add_argument("--algebra", help="algebra presentation (JSON)")
        p.add_argument("--N", default="generic", help="order of the root of unity q, or 'generic'")
        p.add_argument("--max-degree", type=int, default=max_degree)
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    def source(p):
        p.add_argument("--differential", help="differential file (JSON blocks)")
        p.add_argument("--inner", help="inner differential generator, e.g. 'E2_1:1,E3_2:1,E1_3:1'")
        p.add_argument("--complex", choices=COMPLEXES, help="which q-differential algebra to build")

    p = sub.add_parser("check", help="check the q-Leibniz rule, d^N = 0 and d(1) = 0")
    common(p)
    p.add_argument("--differential")
    p.add_argument("--inner")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("envelope", help="dimensions of the universal q-differential envelope")
    common(p, 5)
    p.add_argument("--dump-basis", action="store_true")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("hochschild", help="generalized cohomology of (C(A,A), delta_q)")
    common(p)
    p.set_defaults(func=cmd_hochschild, complex="hochschild", differential=None, inner=None)

    p = sub.add_parser("homology", help="generalized cohomology table of a q-differential algebra")
    common(p)
    source(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("hexagon", help="exactness of hexagons and long sequences")
    common(p)
    source(p)
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_hexagon)

    p = sub.add_parser("reproduce", help="run the acceptance suite")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $QDIFFCALC_THREADS or 1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) != "reproduce" and args.N != "generic":
        try:
            n = int(args.N)
        except ValueError:
            n = None
        if n is not None and args.max_degree < n:
            print(json.dumps({"error": "InputError", "message": "--max-degree must be at least N"}), file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except AlgebraError as exc:
        record = _jsonable(exc.record())
        print(json.dumps(record, sort_keys=True, ensure_ascii=False), file=sys.stderr)
        return 1
    except (InputError, IllFormed, WindowTooSmall, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, ensure_ascii=False), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
