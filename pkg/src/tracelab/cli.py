"""Command-line entry point: ``tracelab <subcommand> ...``.

stdout receives exactly one JSON document (CSV for ``table``); everything
else goes to stderr. Exit codes: 0 success, 1 check failure, 2 usage or
domain error, 3 timeout or resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .cache import ResultCache
from .constructions import (
    certify,
    claim_5_1,
    construct_5_1,
    construct_f0,
    construct_powerset_blocks,
    f0_claim,
    powerset_claim,
)
from .enumeration import CountReducer, EnumFilter, default_jobs, fold_downsets, iter_downsets
from .errors import CapacityError, CertificateError, DomainError, ResourceLimitError
from .family import HereditaryFamily, family_to_json, load_family, save_family, to_text
from .solver import (
    EXHAUSTIVE_LIMIT,
    BACKENDS,
    ArrowQuery,
    arrows_decision,
    formulas_for,
    m_exact,
    m_exact_profile,
    m_formula,
)
from .verify import (
    check_bound_2_1,
    check_katona,
    check_lemma_2_1,
    check_lemma_3_1,
    check_lemma_3_2,
    replay_weights,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class _Outcome:
    """What a subcommand hands back to ``main``."""

    def __init__(self, payload, code: int = EXIT_OK, text: str | None = None) -> None:
        self.payload = payload
        self.code = code
        self.text = text  # pre-rendered stdout (CSV); otherwise payload is dumped as JSON


def dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    return default_jobs()


def _open_cache(args) -> ResultCache | None:
    if getattr(args, "no_cache", False):
        return None
    return ResultCache(args.cache)


def _human(rows: list[tuple[str, object]]) -> None:
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=sys.stderr)


# -- subcommands -----------------------------------------------------------------

def cmd_exact(args) -> _Outcome:
    backend = BACKENDS[args.backend]
    cache = _open_cache(args)
    res = cache.get(args.n, args.s, backend) if cache else None
    if res is not None and res.optimal:
        print("tracelab: cache hit", file=sys.stderr)
    else:
        incumbent = None
        if args.incumbent:
            incumbent = load_family(args.incumbent, hereditary=True)
        res = m_exact(args.n, args.s, args.backend, _jobs(args), args.timeout, incumbent)
        if cache is not None and cache.put(res):
            cache.save()
    _human([("n", res.n), ("s", res.s), ("m(n,s)", res.value), ("optimal", res.optimal), ("backend", res.backend)])
    return _Outcome(res.to_json(include_timing=args.timing), EXIT_OK if res.optimal else EXIT_LIMIT)


def cmd_arrows(args) -> _Outcome:
    q = ArrowQuery(args.n, args.m, args.a, args.b, args.hereditary)
    res = arrows_decision(q)
    payload = {
        "n": q.n,
        "m": q.m,
        "a": q.a,
        "b": q.b,
        "hereditary_only": q.hereditary_only,
        "holds": res.holds,
        "examined": res.examined,
        "counterexample": None if res.counterexample is None else family_to_json(res.counterexample),
    }
    return _Outcome(payload)


def cmd_formula(args) -> _Outcome:
    return _Outcome(m_formula(args.d, args.c, args.n).to_json())


def _build(args):
    kind = args.kind
    if kind == "f0":
        if args.c is None or args.n is None:
            raise DomainError("f0 needs --c and --n")
        return construct_f0(args.d, args.c, args.n), f0_claim(args.d, args.c, args.n)
    if kind == "powerset":
        if args.n is None:
            raise DomainError("powerset needs --n")
        return (
            construct_powerset_blocks(args.d, args.n, args.drop_top),
            powerset_claim(args.d, args.n, args.drop_top),
        )
    if args.k is None:
        raise DomainError("nonlocal needs --k")
    return construct_5_1(args.d, args.k, args.seed), claim_5_1(args.d, args.k)


def cmd_construct(args) -> _Outcome:
    family, claim = _build(args)
    report = certify(family, claim.s, claim)
    payload = {"construction": args.kind, "params": _params(args, ("d", "c", "n", "k", "drop_top", "seed"))}
    payload["certificate"] = report.to_json(include_family=args.out is None)
    if args.out is not None:
        save_family(family, args.out)
        payload["out"] = str(args.out)
    return _Outcome(payload, EXIT_OK if report.passed else EXIT_FAIL)


def cmd_certify(args) -> _Outcome:
    family = load_family(args.family)
    report = certify(family, args.s)
    return _Outcome(report.to_json(), EXIT_OK if report.passed else EXIT_FAIL)


def cmd_enumerate(args) -> _Outcome:
    filt = EnumFilter(min_degree=args.min_degree)
    payload = {"n": args.n, "min_degree": args.min_degree}
    if args.emit is None:
        fold = fold_downsets(args.n, filt, CountReducer(), _jobs(args), allow_huge=args.allow_huge)
        payload["count"] = fold.value
        return _Outcome(payload)
    count = 0
    with open(args.emit, "w") as fh:
        for bits in iter_downsets(args.n, filt, allow_huge=args.allow_huge):
            fh.write(json.dumps(to_text(HereditaryFamily.from_dense(args.n, bits))) + "\n")
            count += 1
    payload["count"] = count
    payload["emit"] = str(args.emit)
    return _Outcome(payload)


def _need(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise DomainError(f"verify {args.check} needs {' '.join(missing)}")


def cmd_verify(args) -> _Outcome:
    jobs = _jobs(args)
    check = args.check
    if check == "katona":
        report = check_katona(args.n_max if args.n_max is not None else 5, jobs=jobs)
    elif check == "lemma31":
        _need(args, "d", "c")
        report = check_lemma_3_1(args.d, args.c, args.n_max if args.n_max is not None else 5, jobs)
    elif check == "lemma32":
        _need(args, "d")
        report = check_lemma_3_2(args.d, args.c, jobs)
    elif check == "lemma21":
        report = check_lemma_2_1(args.n_max if args.n_max is not None else 4)
    elif check == "bound21":
        report = check_bound_2_1(args.d_min, args.d_max)
    else:
        _need(args, "d", "c", "family")
        report = replay_weights(load_family(args.family), args.d, args.c, args.scheme)
    payload = report.to_json(include_timing=args.timing)
    if args.report is not None:
        Path(args.report).write_text(dump_json(payload))
    return _Outcome(payload, EXIT_OK if report.ok else EXIT_FAIL)


TABLE_COLUMNS = ("n", "s", "value", "optimal", "source", "conflict")


def _table_cell(n: int, s: int, exact) -> dict:
    settled = exact.value is not None and exact.optimal
    agree, conflict = [], []
    for claim in formulas_for(n, s):
        if settled and claim.value == exact.value:
            agree.append(claim.source)
        else:
            mark = "" if settled else "?"
            conflict.append(f"{claim.source}(d={claim.d};c={claim.c})={claim.value}{mark}")
    if exact.value is None:
        source, value = "unresolved", ""
    else:
        source = "never_fails" if exact.never_fails else "exact" if exact.optimal else "upper_bound"
        value = exact.value
    for name in sorted(set(agree)):
        source += f"+{name}"
    return {
        "n": n,
        "s": s,
        "value": value,
        "optimal": str(exact.optimal).lower(),
        "source": source,
        "conflict": " ".join(conflict),
    }


def cmd_table(args) -> _Outcome:
    cache = _open_cache(args)
    jobs = _jobs(args)
    rows, partial, dirty = [], False, False
    for n in range(1, args.n_max + 1):
        s_top = min(args.s_max, (1 << (n - 1)))
        backend = "exhaustive" if n <= EXHAUSTIVE_LIMIT else "branch_and_bound"
        results: dict[int, object] = {}
        if cache is not None:
            for s in range(s_top + 1):
                hit = cache.get(n, s, backend)
                if hit is not None and hit.optimal:
                    results[s] = hit
        missing = [s for s in range(s_top + 1) if s not in results]
        if missing and backend == "exhaustive":
            profile = m_exact_profile(n, jobs)
            for s in missing:
                results[s] = profile[s] if s in profile else m_exact(n, s)
        elif missing:
            for s in missing:
                results[s] = m_exact(n, s, "bnb", timeout=args.timeout)
        for s in range(s_top + 1):
            res = results[s]
            partial |= not res.optimal
            if cache is not None and cache.put(res):
                dirty = True
            rows.append(_table_cell(n, s, res))
    if dirty:
        cache.save()
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return _Outcome(rows, EXIT_LIMIT if partial else EXIT_OK, text=buf.getvalue())


# -- parser ----------------------------------------------------------------------

def _params(args, names) -> dict:
    return {k: getattr(args, k) for k in names if getattr(args, k, None) is not None}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $TRACELAB_JOBS, else 1)")
    common.add_argument("--timing", action="store_true", help="include wall-clock fields in the payload")
    common.add_argument("--record", metavar="FILE", help="write a run record (params, payload, wall time) to FILE")

    cached = argparse.ArgumentParser(add_help=False)
    cached.add_argument("--cache", metavar="PATH", help="cache file (default: $TRACELAB_CACHE or ~/.tracelab/cache.json)")
    cached.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")

    p = argparse.ArgumentParser(prog="tracelab", description="Exact computations on hereditary set families.")
    p.add_argument("--version", action="version", version=f"tracelab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("exact", parents=[common, cached], help="compute m(n,s) with a witness")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--backend", choices=sorted(BACKENDS), default="enum")
    q.add_argument("--timeout", type=float, default=None, metavar="SECS")
    q.add_argument("--incumbent", metavar="FILE", help="known feasible family to seed branch and bound")
    q.set_defaults(func=cmd_exact)

    q = sub.add_parser("arrows", parents=[common], help="decide (n,m) -> (a,b)")
    for name in ("n", "m", "a", "b"):
        q.add_argument(f"--{name}", type=int, required=True)
    q.add_argument("--hereditary", action="store_true", help="quantify over hereditary families only")
    q.set_defaults(func=cmd_arrows)

    q = sub.add_parser("formula", parents=[common], help="closed-form m(n,s) for a (d,c) parametrization")
    for name in ("d", "c", "n"):
        q.add_argument(f"--{name}", type=int, required=True)
    q.set_defaults(func=cmd_formula)

    q = sub.add_parser("construct", parents=[common], help="build and certify a block construction")
    q.add_argument("kind", choices=("f0", "nonlocal", "powerset"))
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--c", type=int)
    size = q.add_mutually_exclusive_group()
    size.add_argument("--n", type=int)
    size.add_argument("--k", type=int)
    q.add_argument("--drop-top", type=int, default=0)
    q.add_argument("--seed", type=int, default=None, help="randomize distinguished vertices (nonlocal only)")
    q.add_argument("--out", metavar="FILE", help="write the family JSON here")
    q.set_defaults(func=cmd_construct)

    q = sub.add_parser("certify", parents=[common], help="recount a family and check min degree >= s+1")
    q.add_argument("--family", required=True, metavar="FILE")
    q.add_argument("--s", type=int, required=True)
    q.set_defaults(func=cmd_certify)

    q = sub.add_parser("enumerate", parents=[common], help="count or emit down-sets")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--min-degree", type=int, default=0)
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--count-only", action="store_true")
    mode.add_argument("--emit", metavar="FILE.jsonl")
    q.add_argument("--allow-huge", action="store_true", help="acknowledge the n=7 scale")
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("verify", parents=[common], help="run an exhaustive checker")
    q.add_argument("check", choices=("katona", "lemma31", "lemma32", "lemma21", "bound21", "replay"))
    q.add_argument("--d", type=int)
    q.add_argument("--c", type=int)
    q.add_argument("--n-max", type=int)
    q.add_argument("--d-min", type=int, default=4)
    q.add_argument("--d-max", type=int, default=12)
    q.add_argument("--scheme", choices=("main", "small-c", "small_c"), default="main")
    q.add_argument("--family", metavar="FILE")
    q.add_argument("--report", metavar="FILE", help="also write the report JSON here")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("table", parents=[common, cached], help="CSV of m(n,s) with provenance")
    q.add_argument("--n-max", type=int, required=True)
    q.add_argument("--s-max", type=int, required=True)
    q.add_argument("--timeout", type=float, default=60.0, metavar="SECS", help="per-cell budget above n=6")
    q.set_defaults(func=cmd_table)
    return p


def _limit_memory() -> None:
    mb = os.environ.get("TRACELAB_MAX_MEMORY_MB")
    if not mb:
        return
    import resource

    limit = int(mb) << 20
    _, hard = resource.getrlimit(resource.RLIMIT_AS)
    resource.setrlimit(resource.RLIMIT_AS, (limit, hard))


def _write_record(path: str, args, argv, payload, wall: float) -> None:
    skip = {"func", "record"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    record = {
        "subcommand": args.command,
        "argv": list(argv),
        "params": params,
        "seed": getattr(args, "seed", None),
        "payload": payload,
        "wall_time": round(wall, 6),
        "jobs": _jobs(args),
        "version": __version__,
    }
    Path(path).write_text(json.dumps(record, sort_keys=True, indent=2, default=str) + "\n")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        _limit_memory()
        out = args.func(args)
    except (DomainError, CapacityError, ValueError) as exc:
        print(f"tracelab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, MemoryError) as exc:
        print(f"tracelab: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except CertificateError as exc:
        print(f"tracelab: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"tracelab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out.text if out.text is not None else dump_json(out.payload))
    sys.stdout.flush()
    if args.record:
        _write_record(args.record, args, argv, out.payload, time.perf_counter() - start)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
