"""Command-line entry point: ``hyperlab <subcommand> ...``.

Exit codes: 0 success, 1 invariant violation, 2 usage error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds, experiment, graphon
from ._accel import backend
from .complex import (
    check_n,
    coboundary_mask,
    format_complex,
    read_complex,
    read_graph,
)
from .errors import CapacityError, FormatError, InvariantViolation
from .homology import h1_f2_dim, h1_fp_dim, h1_integral, is_hypertree
from .samplers import (
    RngState,
    enumerate_hypertrees,
    sample_hypertree,
    sample_linial_meshulam,
    sample_one_out,
)
from .verify import verify_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _ext(x: float):
    """JSON has no -inf; keep it as a string."""
    return x if math.isfinite(x) else ("-inf" if x < 0 else "inf")


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.replace(",", " ").split()]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sample(a) -> int:
    check_n(a.n)
    rng = RngState(a.seed, a.trial)
    if a.model == "determinantal":
        if a.n > a.det_max_n:
            raise CapacityError(f"determinantal sampler capped at n <= {a.det_max_n}; raise --det-max-n to override")
        K = sample_hypertree(a.n, rng)
    elif a.model == "one-out":
        K = sample_one_out(a.n, rng)
    else:
        if a.p is None:
            raise ValueError("--p is required for linial-meshulam")
        K = sample_linial_meshulam(a.n, a.p, rng)
    _emit(format_complex(K), a.out)
    return EXIT_OK


def cmd_homology(a) -> int:
    K = read_complex(a.complex)
    res = {
        "n": K.n,
        "triangles": len(K),
        "h1_f2": h1_f2_dim(K),
        "h1_fp": {str(p): h1_fp_dim(K, p) for p in a.primes},
        "hypertree": is_hypertree(K),
    }
    if a.snf:
        s = h1_integral(K)
        res["h1_free_rank"] = s.free_rank
        res["h1_torsion"] = list(s.torsion)
        res["h1_order"] = "inf" if s.free_rank else s.torsion_order
    _emit(_json(res), a.out)
    return EXIT_OK


def cmd_enumerate(a) -> int:
    total = a.n ** math.comb(a.n - 2, 2)
    lines = []
    acc = 0
    for K, h in enumerate_hypertrees(a.n):
        acc += h * h
        tris = ";".join(f"{x} {y} {z}" for x, y, z in K.triangles)
        lines.append(f"{h}\t{h * h}/{total}\t{tris}")
    header = f"# n={a.n} hypertrees={len(lines)} sum_h1_squared={acc} normaliser={total}\n"
    _emit(header + "\n".join(lines) + "\n", a.out)
    return EXIT_OK


def cmd_prob(a) -> int:
    if (a.graph is None) == (a.complex is None):
        raise ValueError("give exactly one of --graph or --complex")
    if a.graph is not None:
        n, G = read_graph(a.graph)
        q = bounds.prob_cocycle_exact(n, G)
        kind = "cocycle"
    else:
        K = read_complex(a.complex)
        n = K.n
        q = bounds.prob_subcomplex_exact(n, K)
        kind = "subcomplex"
    res = {"n": n, "event": kind, "probability": str(q), "float": float(q),
           "log": _ext(math.log(q) if q else -math.inf)}
    _emit(_json(res), a.out)
    return EXIT_OK


def cmd_bound(a) -> int:
    n, G = read_graph(a.graph)
    check_n(n)
    Y = ~coboundary_mask(n, G)
    q_det = bounds.prob_cocycle_exact(n, G)
    ub = bounds.upperb_bound(n, Y)
    ubf = bounds.upperbf_bound(n, G)
    res = {
        "n": n,
        "edges": len(G),
        "prob_cocycle": str(q_det),
        "upperb": _ext(ub),
        "upperbf": _ext(ubf),
        "discrete_f": _ext(bounds.discrete_f(n, G)),
        "upperb_holds": bounds.certified_le(q_det, ub),
        "upperbf_holds": bounds.certified_le(q_det, ubf),
    }
    ok = res["upperb_holds"] and res["upperbf_holds"]
    if n >= 4:
        q1 = bounds.one_out_cocycle_prob(n, G)
        b1 = bounds.one_out_bound(n, G)
        res.update(one_out_prob=str(q1), one_out_bound=_ext(b1),
                   one_out_holds=bounds.certified_le(q1, b1, slack=1e-9))
        ok = ok and res["one_out_holds"]
    _emit(_json(res), a.out)
    if not ok:
        raise InvariantViolation("an upper bound is violated", case=res)
    return EXIT_OK


def cmd_graphon(a) -> int:
    V = graphon.read_kernel(a.kernel)
    cut = graphon.cut_norm(V)
    res = {"m": V.m, "cut_norm": cut.value, "cut_norm_exact": cut.exact,
           "l1_norm": graphon.l1_norm(V), "linf_norm": graphon.linf_norm(V)}
    if isinstance(V, graphon.StepGraphon):
        res["entropy_H"] = graphon.entropy_H(V)
        res["f"] = _ext(graphon.f_functional(V))
        res["f_k"] = {str(k): graphon.f_k_functional(V, k) for k in a.k}
        if a.p is not None:
            res["rate_I"] = graphon.rate_I(a.p, V)
        if a.z_out:
            Path(a.z_out).write_text(graphon.format_kernel(graphon.z_kernel(V)))
    _emit(_json(res), a.out)
    return EXIT_OK


def _experiment_config(a) -> experiment.ExperimentConfig:
    values = experiment.load_config(a.config) if a.config else {}
    for key in experiment.CONFIG_KEYS:
        v = getattr(a, key, None)
        if v is not None:
            values[key] = experiment.CONFIG_KEYS[key](v)
    missing = [k for k in ("model", "n", "trials", "seed") if k not in values]
    if missing:
        raise ValueError(f"missing settings: {', '.join(missing)} (config file or flags)")
    return experiment.ExperimentConfig(**values)


def cmd_experiment(a) -> int:
    cfg = _experiment_config(a)
    records, summaries = experiment.run_experiment(cfg)
    sys.stdout.write(experiment.summary_csv(summaries))
    bad = [r for r in records if r.status != "ok"]
    if bad:
        print(f"{len(bad)} of {len(records)} trials did not complete; see the status column",
              file=sys.stderr)
        if all(r.status == "capacity" for r in bad):
            return EXIT_CAPACITY
    return EXIT_OK


def cmd_verify(a) -> int:
    def show(res):
        mark = "PASS" if res.passed else "FAIL"
        print(f"{mark}  {res.name:<28} {res.seconds:7.2f}s  {res.detail}", flush=True)

    print(f"backend: {backend()}")
    report = verify_suite(a.level, seed=a.seed, progress=show)
    if not report.passed:
        _emit(report.failures_json() + "\n", a.out)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_gof(a) -> int:
    res = experiment.gof_report(a.n, a.samples, a.seed, corrupt=a.corrupt)
    _emit(_json(res), a.out)
    if a.check and not (res["tv_distance"] < 0.05 and res["p_value"] > 0.01):
        raise InvariantViolation("sampler fails the goodness-of-fit thresholds", case=res)
    return EXIT_OK


def cmd_torsion(a) -> int:
    rows = experiment.torsion_report(a.n, a.trials or 0, a.primes, a.seed, exact=a.exact,
                                     snf_cap=a.snf_cap)
    lines = ["p,r,probability,cohen_lenstra"]
    lines += [f"{r['p']},{r['r']},{experiment.fmt_float(r['probability'])},"
              f"{experiment.fmt_float(r['cohen_lenstra'])}" for r in rows]
    _emit("\n".join(lines) + "\n", a.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperlab", description="Random 2-complexes and their homology.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw one complex and write it in the complex file format")
    s.add_argument("--model", choices=experiment.MODELS, default="determinantal")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trial", type=int, default=0)
    s.add_argument("--p", type=float)
    s.add_argument("--det-max-n", "--det_max_n", dest="det_max_n", type=int,
                   default=experiment.ExperimentConfig.det_max_n)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("homology", help="homology of a complex file")
    s.add_argument("complex")
    s.add_argument("--primes", type=_int_list, default=[3])
    s.add_argument("--snf", action="store_true", help="also compute H_1 over Z (Smith form)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("enumerate", help="every hypertree for n <= 6 with |H_1| and its probability")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("prob", help="exact cocycle or subcomplex probability")
    s.add_argument("--graph", help="graph file: the probability that it is a mod-2 cocycle")
    s.add_argument("--complex", help="complex file: the probability the hypertree lies inside it")
    s.add_argument("--out")
    s.set_defaults(func=cmd_prob)

    s = sub.add_parser("bound", help="upper bounds for a graph file, checked against exact values")
    s.add_argument("graph")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("graphon", help="norms and functionals of a step kernel file")
    s.add_argument("kernel")
    s.add_argument("--p", type=float, help="also report the rate function at p")
    s.add_argument("--k", type=float, nargs="*", default=[1.0, 4.0, 16.0])
    s.add_argument("--z-out", help="write Z_W to this kernel file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_graphon)

    s = sub.add_parser("experiment", help="config-driven Monte Carlo run")
    s.add_argument("--config")
    s.add_argument("--model", choices=experiment.MODELS)
    s.add_argument("--n", help="grid of n, comma separated")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--p", type=float)
    s.add_argument("--out")
    s.add_argument("--parallelism", type=int)
    s.add_argument("--primes")
    s.add_argument("--snf-cap", "--snf_cap", dest="snf_cap", type=int)
    s.add_argument("--fp-cap", "--fp_cap", dest="fp_cap", type=int)
    s.add_argument("--det-max-n", "--det_max_n", dest="det_max_n", type=int)
    s.add_argument("--alpha", type=float)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("verify", help="run the invariant suites")
    s.add_argument("--level", choices=("fast", "full"), default="fast")
    s.add_argument("--seed", type=int, default=20240601)
    s.add_argument("--out", help="write failing cases here as JSON (default stdout)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gof", help="goodness of fit of the hypertree sampler")
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--samples", "--trials", dest="samples", type=int, default=200_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--corrupt", action="store_true", help="negative control with skewed weights")
    s.add_argument("--check", action="store_true", help="exit 1 unless TV < 0.05 and p > 0.01")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gof)

    s = sub.add_parser("torsion", help="p-torsion distribution next to Cohen-Lenstra values")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int)
    s.add_argument("--primes", type=_int_list, default=[2, 3])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exact", action="store_true", help="use the enumerated measure (n <= 6)")
    s.add_argument("--snf-cap", dest="snf_cap", type=int, default=15)
    s.add_argument("--out")
    s.set_defaults(func=cmd_torsion)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        if exc.case is not None:
            print(json.dumps(exc.case, indent=2, default=str), file=sys.stderr)
        return EXIT_VIOLATION
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, FormatError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
