"""Seeded Monte Carlo runs over a grid of n, plus the goodness-of-fit and torsion reports.

Output files written by :func:`run_experiment` into ``cfg.out``:

``trials.csv``
    one row per trial, sorted by (n, trial). Columns: ``model, n, trial, seed,
    status, triangles, h1_f2, h1_f<p>...`` (one per configured prime),
    ``h1_z, torsion, message``. ``h1_z`` is ``|H_1(K, Z)|`` or ``inf`` and is
    blank above ``snf_cap``; ``torsion`` lists the invariant factors other
    than 1, comma separated. ``status`` is ``ok``, ``capacity`` or ``error``.
``timings.csv``
    ``n, trial, wall_ms``. Kept apart so ``trials.csv`` is byte-identical
    across runs and worker counts.
``summary.csv`` / ``summary.json``
    per-n statistics of ``h1_f2`` over the ``ok`` trials, see :class:`SummaryRecord`.

Floats are written with 17 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import stats

from .bounds import cohen_lenstra_pmf
from .complex import Complex2, check_n
from .errors import CapacityError, FormatError, HyperlabError, InvariantViolation
from .homology import h1_f2_dim, h1_fp_dim, h1_integral
from .linalg import is_prime
from .samplers import (
    ENUMERATION_MAX_N,
    RngState,
    exact_measure,
    hypertree_projection_basis,
    sample_hypertree,
    sample_linial_meshulam,
    sample_one_out,
)

MODELS = ("determinantal", "one-out", "linial-meshulam")
MODEL_TAGS = {"determinantal": 0xD17E, "one-out": 0x1007, "linial-meshulam": 0x11AE}
_M64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def trial_seed(master: int, model: str, n: int, trial: int) -> int:
    """``splitmix64`` chained over (master, model tag, n, trial index)."""
    h = splitmix64(master & _M64)
    for part in (MODEL_TAGS[model], n, trial):
        h = splitmix64(h ^ (part & _M64))
    return h


def fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _int_list(v) -> list[int]:
    if isinstance(v, (list, tuple)):
        return [int(x) for x in v]
    return [int(x) for x in str(v).replace(",", " ").split()]


CONFIG_KEYS = {
    "model": str,
    "n": _int_list,
    "trials": int,
    "seed": int,
    "p": float,
    "out": str,
    "parallelism": int,
    "primes": _int_list,
    "snf_cap": int,
    "fp_cap": int,
    "det_max_n": int,
    "alpha": float,
}


@dataclass
class ExperimentConfig:
    model: str
    n: list[int]
    trials: int
    seed: int
    p: float | None = None
    out: str | None = None
    parallelism: int = 1
    primes: list[int] = field(default_factory=lambda: [3])
    snf_cap: int = 15
    fp_cap: int = 60
    det_max_n: int = 60
    alpha: float = 2.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        self.n = _int_list(self.n)
        if not self.n or any(v < 3 for v in self.n):
            raise ValueError("every n must be >= 3")
        if len(set(self.n)) != len(self.n):
            raise ValueError("n grid has duplicates")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        self.primes = _int_list(self.primes)
        if any(not is_prime(q) or q == 2 for q in self.primes):
            raise ValueError("primes must be odd primes (F_2 is always reported)")
        if self.model == "linial-meshulam":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("linial-meshulam needs p in [0, 1]")


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return out


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    model: str
    n: int
    trial: int
    seed: int
    status: str = "ok"
    triangles: int | None = None
    h1_f2: int | None = None
    h1_fp: dict[int, int | None] = field(default_factory=dict)
    h1_z: str = ""
    torsion: str = ""
    message: str = ""
    wall_ms: float = 0.0


def _sample(model: str, n: int, rng: RngState, cfg: ExperimentConfig) -> Complex2:
    if model == "determinantal":
        if n > cfg.det_max_n:
            raise CapacityError(f"determinantal sampler capped at n <= {cfg.det_max_n}")
        return sample_hypertree(n, rng)
    if model == "one-out":
        return sample_one_out(n, rng)
    return sample_linial_meshulam(n, cfg.p, rng)


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    seed = trial_seed(cfg.seed, cfg.model, n, trial)
    rec = TrialRecord(cfg.model, n, trial, seed, h1_fp={q: None for q in cfg.primes})
    t0 = time.perf_counter()
    try:
        K = _sample(cfg.model, n, RngState(seed), cfg)
        rec.triangles = len(K)
        rec.h1_f2 = h1_f2_dim(K)
        if n <= cfg.fp_cap:
            for q in cfg.primes:
                rec.h1_fp[q] = h1_fp_dim(K, q)
        if n <= cfg.snf_cap:
            s = h1_integral(K)
            rec.h1_z = "inf" if s.free_rank else str(s.torsion_order)
            rec.torsion = ",".join(str(d) for d in s.torsion)
    except CapacityError as exc:
        rec.status, rec.message = "capacity", str(exc)
    except HyperlabError as exc:
        rec.status, rec.message = "error", f"{type(exc).__name__}: {exc}"
    rec.wall_ms = (time.perf_counter() - t0) * 1000.0
    return rec


def _run_chunk(args):
    cfg, tasks = args
    return [run_trial(cfg, n, i) for n, i in tasks]


def run_trials(cfg: ExperimentConfig) -> list[TrialRecord]:
    tasks = [(n, i) for n in sorted(cfg.n) for i in range(cfg.trials)]
    if cfg.parallelism == 1:
        records = [run_trial(cfg, n, i) for n, i in tasks]
    else:
        # round-robin so expensive large-n trials spread over the workers
        chunks = [tasks[k:: cfg.parallelism * 4] for k in range(cfg.parallelism * 4)]
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            records = [r for part in pool.map(_run_chunk, [(cfg, c) for c in chunks if c]) for r in part]
    records.sort(key=lambda r: (r.n, r.trial))
    return records


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------

@dataclass
class SummaryRecord:
    """Per-n statistics of dim H_1(K, F_2) over trials with status ``ok``.

    ``std`` is the sample standard deviation (0 for a single trial).
    ``histograms`` maps a field name (``h1_f2``, ``h1_f3``, ...) to
    ``{dimension: count}``.
    """

    model: str
    n: int
    trials: int
    ok: int
    mean: float
    std: float
    min: int | None
    max: int | None
    mean_over_n2: float
    alpha: float
    mean_over_n_alpha: float
    histograms: dict[str, dict[int, int]]


def summarize(records: list[TrialRecord], primes, alpha: float = 2.0) -> list[SummaryRecord]:
    out = []
    by_n: dict[int, list[TrialRecord]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    for n in sorted(by_n):
        rows = by_n[n]
        ok = [r for r in rows if r.status == "ok"]
        dims = [r.h1_f2 for r in ok]
        mean = statistics.fmean(dims) if dims else math.nan
        std = statistics.stdev(dims) if len(dims) > 1 else 0.0
        hists = {"h1_f2": dict(sorted(Counter(dims).items()))}
        for q in primes:
            vals = [r.h1_fp.get(q) for r in ok if r.h1_fp.get(q) is not None]
            hists[f"h1_f{q}"] = dict(sorted(Counter(vals).items()))
        out.append(SummaryRecord(
            model=rows[0].model, n=n, trials=len(rows), ok=len(ok), mean=mean, std=std,
            min=min(dims) if dims else None, max=max(dims) if dims else None,
            mean_over_n2=mean / n**2, alpha=alpha, mean_over_n_alpha=mean / n**alpha,
            histograms=hists,
        ))
    return out


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def _opt(v) -> str:
    return "" if v is None else str(v)


def trial_header(primes) -> list[str]:
    return (["model", "n", "trial", "seed", "status", "triangles", "h1_f2"]
            + [f"h1_f{q}" for q in primes] + ["h1_z", "torsion", "message"])


def trials_csv(records: list[TrialRecord], primes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trial_header(primes))
    for r in records:
        w.writerow([r.model, r.n, r.trial, r.seed, r.status, _opt(r.triangles), _opt(r.h1_f2)]
                   + [_opt(r.h1_fp.get(q)) for q in primes] + [r.h1_z, r.torsion, r.message])
    return buf.getvalue()


def parse_trials_csv(text: str) -> tuple[list[TrialRecord], list[int]]:
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    primes = [int(h[4:]) for h in header if h.startswith("h1_f") and h != "h1_f2"]
    idx = {h: k for k, h in enumerate(header)}

    def opt_int(s):
        return int(s) if s != "" else None

    out = []
    for row in rows[1:]:
        out.append(TrialRecord(
            model=row[idx["model"]], n=int(row[idx["n"]]), trial=int(row[idx["trial"]]),
            seed=int(row[idx["seed"]]), status=row[idx["status"]],
            triangles=opt_int(row[idx["triangles"]]), h1_f2=opt_int(row[idx["h1_f2"]]),
            h1_fp={q: opt_int(row[idx[f"h1_f{q}"]]) for q in primes},
            h1_z=row[idx["h1_z"]], torsion=row[idx["torsion"]], message=row[idx["message"]],
        ))
    return out, primes


def _hist_str(h: dict[int, int]) -> str:
    return ";".join(f"{k}:{v}" for k, v in h.items())


def summary_csv(summaries: list[SummaryRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    hist_keys = list(summaries[0].histograms) if summaries else ["h1_f2"]
    w.writerow(["model", "n", "trials", "ok", "mean", "std", "min", "max",
                "mean_over_n2", "alpha", "mean_over_n_alpha"] + [f"hist_{k}" for k in hist_keys])
    for s in summaries:
        w.writerow([s.model, s.n, s.trials, s.ok, fmt_float(s.mean), fmt_float(s.std),
                    _opt(s.min), _opt(s.max), fmt_float(s.mean_over_n2), fmt_float(s.alpha),
                    fmt_float(s.mean_over_n_alpha)] + [_hist_str(s.histograms[k]) for k in hist_keys])
    return buf.getvalue()


def summary_json(summaries: list[SummaryRecord]) -> str:
    def enc(s):
        d = asdict(s)
        for k in ("mean", "std", "mean_over_n2", "alpha", "mean_over_n_alpha"):
            d[k] = fmt_float(d[k])
        d["histograms"] = {k: {str(a): b for a, b in v.items()} for k, v in d["histograms"].items()}
        return d

    return json.dumps([enc(s) for s in summaries], indent=2) + "\n"


def timings_csv(records: list[TrialRecord]) -> str:
    lines = ["n,trial,wall_ms"] + [f"{r.n},{r.trial},{r.wall_ms:.3f}" for r in records]
    return "\n".join(lines) + "\n"


def run_experiment(cfg: ExperimentConfig) -> tuple[list[TrialRecord], list[SummaryRecord]]:
    records = run_trials(cfg)
    summaries = summarize(records, cfg.primes, cfg.alpha)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "trials.csv").write_text(trials_csv(records, cfg.primes))
        (out / "timings.csv").write_text(timings_csv(records))
        (out / "summary.csv").write_text(summary_csv(summaries))
        (out / "summary.json").write_text(summary_json(summaries))
    return records, summaries


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _corrupted_sampler(measure: dict):
    """Negative control: every other hypertree gets one extra unit of weight."""
    keys = list(measure)
    weights = np.array([float(measure[k]) for k in keys])
    weights = weights / weights.min() + (np.arange(len(keys)) % 2)
    probs = weights / weights.sum()

    def draw(rng: RngState):
        return keys[int(rng.generator().choice(len(keys), p=probs))]

    return draw


def gof_report(n: int = 5, samples: int = 200_000, seed: int = 0, corrupt: bool = False) -> dict:
    """Empirical distribution of the sampler against the exact measure."""
    if n > ENUMERATION_MAX_N:
        raise CapacityError(f"goodness of fit needs the enumerated support (n <= {ENUMERATION_MAX_N})")
    check_n(n)
    if samples < 10_000:
        raise ValueError("use at least 10^4 samples")
    measure = exact_measure(n)
    keys = list(measure)
    pos = {k: i for i, k in enumerate(keys)}
    counts = np.zeros(len(keys), dtype=np.int64)
    if corrupt:
        draw = _corrupted_sampler(measure)
    else:
        basis = hypertree_projection_basis(n)

        def draw(rng):
            return sample_hypertree(n, rng, basis)

    for i in range(samples):
        K = draw(RngState(seed, i))
        j = pos.get(K)
        if j is None:
            raise InvariantViolation("sampler produced a complex outside the hypertree support",
                                     case={"n": n, "trial": i, "triangles": K.triangles})
        counts[j] += 1
    probs = np.array([float(measure[k]) for k in keys])
    emp = counts / samples
    chi2, pval = stats.chisquare(counts, probs * samples)
    return {
        "n": n,
        "samples": samples,
        "support": len(keys),
        "missing": int((counts == 0).sum()),
        "tv_distance": float(0.5 * np.abs(emp - probs).sum()),
        "chi_square": float(chi2),
        "p_value": float(pval),
        "corrupted": corrupt,
    }


def _p_rank(factors, p) -> int:
    return sum(1 for d in factors if d % p == 0)


def torsion_report(n: int, trials: int = 0, primes=(2, 3), seed: int = 0, exact: bool = False,
                   rmax: int = 4, snf_cap: int = 15) -> list[dict]:
    """p-torsion rank distribution of H_1 next to Cohen-Lenstra reference values.

    Report only: nothing here is asserted. With ``exact`` the distribution comes
    from the enumerated measure (n <= 6), otherwise from ``trials`` samples.
    """
    dist: dict[int, Counter] = {p: Counter() for p in primes}
    if exact:
        if n > ENUMERATION_MAX_N:
            raise CapacityError(f"exact torsion distribution needs n <= {ENUMERATION_MAX_N}")
        total = 1
        for K, mass in exact_measure(n).items():
            f = h1_integral(K).factors
            for p in primes:
                dist[p][_p_rank(f, p)] += mass
    else:
        if n > snf_cap:
            raise CapacityError(f"Smith form capped at n <= {snf_cap}")
        if trials < 1:
            raise ValueError("trials must be >= 1")
        basis = hypertree_projection_basis(n)
        for i in range(trials):
            K = sample_hypertree(n, RngState(trial_seed(seed, "determinantal", n, i)), basis)
            f = h1_integral(K).factors
            for p in primes:
                dist[p][_p_rank(f, p)] += 1
        total = trials
    rows = []
    for p in primes:
        top = max([rmax] + list(dist[p]))
        for r in range(top + 1):
            rows.append({
                "p": p, "r": r,
                "probability": float(Fraction(dist[p][r]) / total),
                "cohen_lenstra": cohen_lenstra_pmf(p, r, 64),
            })
    return rows
