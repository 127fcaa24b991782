"""Command-line interface and the semigroup file format.

A semigroup file has a header line ``n=<N>`` followed by one element per line
in chain-cycle notation (or ``0``).  Lines starting with ``#`` are comments.

Exit codes: 0 success, 1 a failed expectation or check, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import constructors as C
from .pperm import ParseError, parse
from .semigroup import NotClosedError, Semigroup, are_similar, is_closed, is_singular
from .semitrans import (
    audit_all, blocks, bound, gpd, is_semitransitive, is_transitive, local, two_idempotents,
)

log = logging.getLogger("stsemi")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def read_semigroup_text(text: str, source: str = "<input>"):
    """Parse file contents into (n, list of elements); closure is not checked."""
    n = None
    elements = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise InputError(f"{source}:{lineno}: expected header 'n=<N>'")
            try:
                n = int(line[2:])
            except ValueError:
                raise InputError(f"{source}:{lineno}: bad degree {line[2:]!r}") from None
            continue
        try:
            a = parse(line, n)
        except (ParseError, ValueError) as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
        if a in seen:
            raise InputError(f"{source}:{lineno}: duplicate element {a}")
        seen.add(a)
        elements.append(a)
    if n is None:
        raise InputError(f"{source}: missing header 'n=<N>'")
    if not elements:
        raise InputError(f"{source}: no elements")
    return n, elements


def format_semigroup(S: Semigroup, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"n={S.degree}")
    lines.extend(str(a) for a in S)
    return "\n".join(lines) + "\n"


def _read_source(path: str) -> tuple:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    try:
        return Path(path).read_text(), path
    except OSError as exc:
        raise InputError(str(exc)) from None


def load_elements(path: str):
    text, source = _read_source(path)
    return read_semigroup_text(text, source)


def load_semigroup(path: str) -> Semigroup:
    _n, elements = load_elements(path)
    try:
        return Semigroup(elements)
    except NotClosedError as exc:
        raise InputError(f"{path}: not closed: {exc}") from None


# -- analysis report --------------------------------------------------------------

def analysis_report(elements) -> dict:
    """Machine-readable summary; the key set and order are fixed."""
    elems = list(elements)
    n = elems[0].degree
    closed = is_closed(elems)
    S = Semigroup(elems, check=False)
    semi = is_semitransitive(S)
    report = {
        "n": n,
        "size": len(S),
        "is_closed": closed,
        "is_singular": is_singular(S),
        "is_semitransitive": semi,
        "is_transitive": is_transitive(S),
        "blocks": blocks(S).as_lists() if semi else None,
        "block_sizes": list(blocks(S).sizes) if semi else None,
        "idempotents": [str(e) for e in S.nonzero_idempotents()],
        "has_zero": S.has_zero,
        "nilpotent_count": None,
        "gpd": gpd(n) if n >= 2 else None,
        "bound": bound(n) if n >= 2 else None,
        "audits": {},
    }
    gh = two_idempotents(S) if semi and closed else None
    if gh is not None:
        g, h = gh
        report["nilpotent_count"] = len({a for a in local(S, g, h) | local(S, h, g) if not a.is_zero})
    for r in audit_all(S):
        report["audits"][r.name] = r.to_dict()
    return report


def render_report(report: dict) -> str:
    lines = [
        f"degree n          : {report['n']}",
        f"size              : {report['size']}",
        f"closed            : {report['is_closed']}",
        f"singular          : {report['is_singular']}",
        f"semitransitive    : {report['is_semitransitive']}",
        f"transitive        : {report['is_transitive']}",
    ]
    if report["blocks"] is not None:
        bl = " > ".join("{" + ",".join(map(str, b)) + "}" for b in report["blocks"])
        lines.append(f"blocks            : {bl}  sizes {report['block_sizes']}")
    lines.append(f"nonzero idempotents: {', '.join(report['idempotents']) or '-'}")
    lines.append(f"zero              : {report['has_zero']}")
    if report["nilpotent_count"] is not None:
        lines.append(f"|N|               : {report['nilpotent_count']}")
    if report["bound"] is not None:
        lines.append(f"bound 2n-p+1      : {report['bound']} (p={report['gpd']})")
    lines.append("audits:")
    for name, a in report["audits"].items():
        extra = f"  {a['detail']}" if a["detail"] else ""
        lines.append(f"  {name:24s} {a['status']}{extra}")
        for w in a["witnesses"][:5]:
            lines.append(f"      witness: {w}")
    return "\n".join(lines)


# -- subcommands ------------------------------------------------------------------

def _group_from_args(args, carrier_size: int, default_carrier):
    if args.group and args.group_file:
        raise InputError("use either --group or --group-file")
    gens = None
    if args.group:
        gens = [args.group]
    elif args.group_file:
        text, _ = _read_source(args.group_file)
        gens = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if gens is None:
        return None
    try:
        G = C.regular_group(gens, carrier=None)
    except (C.ConstructionError, ParseError, ValueError) as exc:
        raise InputError(f"bad group: {exc}") from None
    if len(G.carrier) != carrier_size:
        raise InputError(f"group must act on {carrier_size} points, got {len(G.carrier)}")
    return G


def cmd_build(args) -> int:
    n, p, t = args.n, args.p, args.type
    partition = C.parse_partition(args.partition) if args.partition else None
    try:
        if t in ("1", "2", "3"):
            if p is None:
                raise InputError("--p is required")
            G = _group_from_args(args, p, None)
            fn = {"1": C.type1, "2": C.type2, "3": C.type3}[t]
            S = fn(n, p, G, partition)
            desc = f"type {t}, n={n}, p={p}"
        elif t in ("4", "5"):
            if p is None or args.l is None:
                raise InputError("--p and --l are required for types 4 and 5")
            m = args.m
            if m is None:
                if (n - p) % (args.l * p):
                    raise InputError(f"n={n} is not of the form l*p*(m-1)+p")
                m = (n - p) // (args.l * p) + 1
            if args.l * p * (m - 1) + p != n:
                raise InputError(f"l*p*(m-1)+p = {args.l * p * (m - 1) + p} != n={n}")
            G = _group_from_args(args, args.l * p, None)
            if partition is not None:
                raise InputError("types 4 and 5 use the canonical layout")
            params = C.type4_params(p, args.l, m, G)
            S = C.type4(params) if t == "4" else C.type5(params)
            desc = f"type {t}, n={n}, p={p}, l={args.l}, m={m}"
        else:  # ref
            l = args.l
            if l is None:
                if p is None:
                    raise InputError("--l or --p is required for the reference construction")
                l = n // p
            pp = n // l
            G = _group_from_args(args, pp, None)
            S = C.reference_chain(n, l, G, partition)
            desc = f"reference chain, n={n}, l={l}"
    except C.ConstructionError as exc:
        raise InputError(str(exc)) from None
    out = format_semigroup(S, comment=desc)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    _n, elements = load_elements(args.file)
    report = analysis_report(elements)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(render_report(report))
    code = EXIT_OK
    if args.expect_semitransitive and not report["is_semitransitive"]:
        log.error("expected a semitransitive semigroup")
        code = EXIT_FAIL
    if args.expect_size is not None and report["size"] != args.expect_size:
        log.error("expected size %d, got %d", args.expect_size, report["size"])
        code = EXIT_FAIL
    if args.expect_closed and not report["is_closed"]:
        log.error("expected a closed set")
        code = EXIT_FAIL
    return code


def cmd_verify_example(args) -> int:
    diff = C.build_example(args.k)
    for line in diff.lines():
        print(line)
    print("differences confined to documented typos" if diff.confined else "UNEXPECTED differences")
    return EXIT_OK if diff.confined else EXIT_FAIL


def cmd_search(args) -> int:
    from .search import SearchConfig, SearchLimitExceeded, minimal_search

    try:
        config = SearchConfig(args.n, max_size=args.max_size, prune_mode=args.prune,
                              symmetry_breaking=not args.no_symmetry, threads=args.threads,
                              max_nodes=args.max_nodes, allow_large=args.allow_large)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    def hook(p):
        log.info("nodes=%d best=%s pruned(size=%d cover=%d idem=%d)",
                 p.nodes, p.best, p.pruned_size, p.pruned_cover, p.pruned_idempotents)

    try:
        result = minimal_search(config, progress_hook=hook, classify_results=args.classify)
    except SearchLimitExceeded as exc:
        print(f"search aborted: {exc} after {exc.progress.nodes} nodes", file=sys.stderr)
        return EXIT_FAIL
    if result.minimal_cardinality is None:
        print(f"n={args.n}: no semitransitive subsemigroup of size <= {config.max_size}")
        return EXIT_FAIL
    print(f"n={args.n} minimum={result.minimal_cardinality} bound={bound(args.n)} "
          f"classes={result.classes}")
    pr = result.progress
    print(f"nodes={pr.nodes} duplicates={pr.duplicates} pruned_size={pr.pruned_size} "
          f"pruned_cover={pr.pruned_cover} pruned_idempotents={pr.pruned_idempotents}")
    for i, rep in enumerate(result.representatives, 1):
        tag = f"  [{'; '.join(rep.labels)}]" if args.classify else ""
        print(f"class {i}:{tag}")
        for a in rep.semigroup:
            print(f"  {a}")
    if args.classify and any(not rep.classification for rep in result.representatives):
        return EXIT_FAIL
    return EXIT_OK


def cmd_similar(args) -> int:
    S1 = load_semigroup(args.file1)
    S2 = load_semigroup(args.file2)
    if S1.degree != S2.degree:
        print("not similar")
        return EXIT_OK
    sigma = are_similar(S1, S2)
    print("not similar" if sigma is None else f"similar via {sigma}")
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.n < 2:
        raise InputError("n must be at least 2")
    print(f"p={gpd(args.n)} bound={bound(args.n)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stsemi", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a semigroup of one of the five types")
    b.add_argument("--type", required=True, choices=["1", "2", "3", "4", "5", "ref"])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--p", type=int)
    b.add_argument("--l", type=int)
    b.add_argument("--m", type=int)
    b.add_argument("--group", help='generating cycle, e.g. "(3,5,4,6)"')
    b.add_argument("--group-file", help="file with one generator per line")
    b.add_argument("--partition", help='blocks, e.g. "1,2|3,4|5,6|7,8"')
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("analyze", help="report structure and audits of a semigroup file")
    a.add_argument("file", nargs="?", default="-")
    a.add_argument("--json", action="store_true")
    a.add_argument("--expect-semitransitive", action="store_true")
    a.add_argument("--expect-size", type=int)
    a.add_argument("--expect-closed", action="store_true")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify-example", help="rebuild a worked example and diff it")
    v.add_argument("k", type=int, choices=[1, 2, 3])
    v.set_defaults(func=cmd_verify_example)

    s = sub.add_parser("search", help="exhaustive search for minimal semitransitive semigroups")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-size", type=int)
    s.add_argument("--prune", choices=["lemmas", "none"], default="lemmas")
    s.add_argument("--no-symmetry", action="store_true")
    s.add_argument("--classify", action="store_true")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--max-nodes", type=int, default=5_000_000)
    s.add_argument("--allow-large", action="store_true", help="permit n = 5, 6")
    s.set_defaults(func=cmd_search)

    sm = sub.add_parser("similar", help="find a relabeling conjugating one file onto another")
    sm.add_argument("file1")
    sm.add_argument("file2")
    sm.set_defaults(func=cmd_similar)

    bd = sub.add_parser("bound", help="print gpd(n) and 2n-p+1")
    bd.add_argument("--n", type=int, required=True)
    bd.set_defaults(func=cmd_bound)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
