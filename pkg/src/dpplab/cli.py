"""Command-line front end.

Every operation in the library is reachable as `dpplab <group> <action>`,
with deterministic seeding (--seed, else the DPPLAB_SEED variable, else a
fixed default), optional replica fan-out over derived substreams, and
structured output: a JSON envelope {command, params, seed, results,
timing_ms} or CSV for tabular payloads. Exit codes: 0 success, 1 a check
ran and failed, 2 usage or precondition errors.
"""

import argparse
import concurrent.futures
import itertools
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import derive_substream, resolve_seed
from . import dominance as dom
from . import dpp, ensembles, lpp, stats, ust
from .errors import DpplabError
from .numerics import orthonormalize

CHI2_UST_DF15_999 = 37.6973  # 0.999 quantile of chi-square with df 15


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _fmt_label(x):
    f = float(x)
    return str(int(f)) if f == int(f) else repr(f)


def _parse_scalar(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_json_arg(text, what):
    if text is None:
        raise _Usage(f"missing required value for {what}")
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Usage(f"could not parse {what} as JSON: {exc}") from None


def _parse_labels(text):
    return [_parse_scalar(t) for t in text.split(",") if t != ""]


def _parse_edges(text):
    edges = []
    for part in text.split(","):
        if not part:
            continue
        bits = part.split("-")
        if len(bits) != 2:
            raise _Usage(f"edge {part!r} is not of the form u-v")
        edges.append((int(bits[0]), int(bits[1])))
    return edges


class _Usage(Exception):
    pass


def _space_from_args(size, points, weights):
    if points is not None:
        pts = np.asarray(_parse_labels(points), dtype=np.float64)
    else:
        pts = np.arange(1, size + 1, dtype=np.float64)
    if weights is not None:
        w = np.asarray(_parse_labels(weights), dtype=np.float64)
    else:
        w = np.ones(len(pts))
    return dpp.GroundSpace(pts, w)


def _law_results(law):
    entries = [
        {"subset": [_jsonable(x) for x in key], "probability": val}
        for key, val in law.items()
    ]
    return {"size": law.size, "entries": entries}


def _law_csv(law):
    lines = ["subset,probability"]
    for key, val in law.items():
        lines.append("-".join(_fmt_label(x) for x in key) + f",{val!r}")
    return "\n".join(lines) + "\n"


def _replica_map(replicas, jobs, work):
    """Run work(replica_index) for each replica; merge is index-ordered."""
    if jobs <= 1 or replicas <= 1:
        return [work(i) for i in range(replicas)]
    out = [None] * replicas
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(work, i): i for i in range(replicas)}
        for fut in concurrent.futures.as_completed(futures):
            out[futures[fut]] = fut.result()
    return out


def _merge_counts(dicts):
    total = {}
    for d in dicts:
        for k, v in d.items():
            total[k] = total.get(k, 0) + v
    return {k: total[k] for k in sorted(total)}


# ---------------------------------------------------------------- dpp


def _cmd_dpp(args, seed):
    space = None
    if args.action in ("admissible", "prob"):
        matrix = np.asarray(_parse_json_arg(args.matrix, "--matrix"), dtype=np.float64)
        space = _space_from_args(matrix.shape[0], args.points, args.weights)
        kernel = dpp.KernelMatrix(space, matrix)
    if args.action == "admissible":
        rep = dpp.check_admissible(kernel, tol=args.tol or 1e-10)
        return {
            "admissible": rep.admissible,
            "eigenvalues": list(rep.eigenvalues),
            "violations": list(rep.violations),
        }, rep.admissible
    if args.action == "prob":
        inside = _parse_labels(args.inside) if args.inside else []
        outside = _parse_labels(args.outside) if args.outside else []
        p = dpp.mixed_probability(kernel, inside, outside, tol=args.tol or 1e-10)
        return {"inside": inside, "outside": outside, "probability": p}, True
    rows = np.asarray(_parse_json_arg(args.rows, "--rows"), dtype=np.float64)
    space = _space_from_args(rows.shape[1], args.points, args.weights)
    frame = dpp.ProjectionFrame(space, rows, tol=args.tol or 1e-10)
    if args.action == "law":
        law = dpp.projection_exact_law(frame)
        return _law_results(law), True
    if args.action == "sample":
        num = args.num or 1

        def work(i):
            rng = derive_substream(seed, i)
            return [
                list(dpp.sample_projection(frame, rng).labels)
                for _ in range(num)
            ]

        blocks = _replica_map(args.replicas, args.jobs, work)
        draws = [d for block in blocks for d in block]
        return {"rank": frame.rank, "draws": draws}, True
    raise _Usage(f"unknown dpp action {args.action!r}")


def _csv_dpp(args, results):
    if args.action == "law":
        lines = ["subset,probability"]
        for e in results["entries"]:
            lines.append(
                "-".join(_fmt_label(x) for x in e["subset"])
                + f",{e['probability']!r}"
            )
        return "\n".join(lines) + "\n"
    if args.action == "sample":
        return "\n".join(
            "-".join(_fmt_label(x) for x in d) for d in results["draws"]
        ) + "\n"
    raise _Usage("csv output is only available for dpp law | sample")


# ---------------------------------------------------------------- ust


def _cmd_ust(args, seed):
    n = args.n
    if n is None:
        raise _Usage("--n is required")
    if args.action == "exact":
        stat = args.stat or "distance"
        if stat == "distance":
            vals = [float(p) for p in ust.distance_pmf(n)]
            return {"n": n, "statistic": "distance_pmf", "values": vals}, True
        if stat == "degree":
            k = args.k or 1
            v = ust.degree_factorial_moment(n, k)
            return {
                "n": n, "statistic": "degree_factorial_moment",
                "k": k, "values": [float(v)],
            }, True
        if stat == "leaves":
            rep = ust.leaf_statistics(n)
            return {
                "n": n, "statistic": "leaf_statistics",
                "values": [
                    float(rep.p_leaf), float(rep.expected_fraction),
                    float(rep.cov_pair), float(rep.var_fraction),
                ],
            }, True
        if stat == "subset":
            inside = _parse_edges(args.inside) if args.inside else []
            outside = _parse_edges(args.outside) if args.outside else []
            p = ust.subset_probability(n, inside, outside)
            return {
                "n": n, "statistic": "subset_probability",
                "values": [float(p)],
            }, True
        if stat == "shape":
            if args.k is None or not args.legs:
                raise _Usage("shape needs --k and --legs")
            legs = [int(x) for x in _parse_labels(args.legs)]
            p = ust.shape_probability(n, args.k, legs)
            return {
                "n": n, "statistic": "shape_probability",
                "values": [float(p)],
            }, True
        raise _Usage(f"unknown exact statistic {stat!r}")
    if args.action == "sample":
        num = args.num or 1
        stat = args.stat or "distance"
        if stat == "edges":
            def work(i):
                rng = derive_substream(seed, i)
                return [
                    sorted(ust.sample_wilson(n, rng).edges)
                    for _ in range(num)
                ]

            blocks = _replica_map(args.replicas, args.jobs, work)
            trees = [t for block in blocks for t in block]
            return {"n": n, "statistic": "edges", "trees": trees}, True
        if stat not in ("distance", "degree", "leaves"):
            raise _Usage(f"unknown sample statistic {stat!r}")

        def work(i):
            rng = derive_substream(seed, i)
            vals = ust.sample_statistics(n, num, stat, rng)
            keys, counts = np.unique(np.asarray(vals), return_counts=True)
            return {int(k): int(c) for k, c in zip(keys, counts)}

        blocks = _replica_map(args.replicas, args.jobs, work)
        counts = _merge_counts(blocks)
        return {
            "n": n, "statistic": stat, "counts": counts,
            "total": num * args.replicas,
        }, True
    if args.action == "verify":
        num = args.num or 160000
        stat = args.stat or "uniform"
        rng = derive_substream(seed, 0)
        if stat == "uniform":
            trees = list(ust.enumerate_trees(n))
            index = {t.key(): i for i, t in enumerate(trees)}
            counts = np.zeros(len(trees))
            for _ in range(num):
                counts[index[ust.sample_wilson(n, rng).key()]] += 1
            expected = np.full(len(trees), num / len(trees))
            value = stats.chi_square_statistic(counts, expected)
            critical = CHI2_UST_DF15_999 if len(trees) == 16 else None
            if critical is None:
                # generic Wilson-Hilferty approximation for other sizes
                df = len(trees) - 1
                z = 3.0902  # 0.999 normal quantile
                critical = df * (1 - 2 / (9 * df) + z * (2 / (9 * df)) ** 0.5) ** 3
            ok = value < critical
            return {
                "n": n, "statistic": "chi_square", "value": value,
                "df": len(trees) - 1, "critical": critical, "verdict": ok,
            }, ok
        if stat == "distance":
            tol = args.tol or 0.02
            vals = ust.sample_statistics(n, num, "distance", rng)
            exact = {
                k + 1: float(p) for k, p in enumerate(ust.distance_pmf(n))
            }
            keys, counts = np.unique(np.asarray(vals), return_counts=True)
            emp = {int(k): c / num for k, c in zip(keys, counts)}
            tv = stats.total_variation(emp, exact)
            ok = tv < tol
            return {
                "n": n, "statistic": "distance_tv", "value": tv,
                "tolerance": tol, "verdict": ok,
            }, ok
        raise _Usage(f"unknown verify statistic {stat!r}")
    raise _Usage(f"unknown ust action {args.action!r}")


def _csv_ust(args, results):
    if args.action == "exact":
        lines = ["index,value"]
        for i, v in enumerate(results["values"]):
            lines.append(f"{i},{v!r}")
        return "\n".join(lines) + "\n"
    if args.action == "sample" and results["statistic"] == "edges":
        chunks = []
        for tree in results["trees"]:
            chunks.append("\n".join(f"{u} {v}" for u, v in tree))
        return "\n\n".join(chunks) + "\n"
    if args.action == "sample":
        lines = ["value,count"]
        for k in sorted(results["counts"], key=int):
            lines.append(f"{k},{results['counts'][k]}")
        return "\n".join(lines) + "\n"
    raise _Usage("csv output is only available for ust exact | sample")


# ---------------------------------------------------------------- ensemble


def _spec_from_args(args):
    kind = (args.kind or "").lower()
    if kind == "wishart":
        if args.m is None or args.n is None:
            raise _Usage("wishart needs --m and --n")
        return ensembles.Wishart(args.m, args.n)
    if kind == "jacobi":
        if args.n1 is None or args.n2 is None or args.n is None:
            raise _Usage("jacobi needs --n1, --n2, and --n")
        return ensembles.Jacobi(args.n1, args.n2, args.n)
    if kind == "meixner":
        if args.m is None or args.n is None or args.q is None:
            raise _Usage("meixner needs --m, --n, and --q")
        return ensembles.Meixner(args.m, args.n, args.q)
    raise _Usage("--kind must be wishart, jacobi, or meixner")


def _spec_payload(spec):
    if isinstance(spec, ensembles.Wishart):
        return {"kind": "wishart", "m": spec.m, "n": spec.n}
    if isinstance(spec, ensembles.Jacobi):
        return {"kind": "jacobi", "n1": spec.n1, "n2": spec.n2, "n": spec.n}
    return {"kind": "meixner", "m": spec.m, "n": spec.n, "q": spec.q}


def _cmd_ensemble(args, seed):
    spec = _spec_from_args(args)
    if args.action == "sample":
        num = args.num or 1

        def work(i):
            rng = derive_substream(seed, i)
            return ensembles.sample_eigs_batch(spec, num, rng)

        blocks = _replica_map(args.replicas, args.jobs, work)
        draws = np.vstack(blocks)
        return {
            "spec": _spec_payload(spec),
            "N": int(draws.shape[0]),
            "draws": draws,
        }, True
    if args.action == "density":
        if not args.at:
            raise _Usage("--at x1,x2,... is required")
        config = [float(x) for x in _parse_labels(args.at)]
        logp, logz = ensembles.log_density(spec, config)
        return {
            "spec": _spec_payload(spec), "at": config,
            "log_unnormalized": logp,
            "log_normalizer": logz,
        }, True
    if args.action == "kernel":
        support = args.cutoff
        frame = ensembles.projection_frame(
            spec, support=support, method=args.method or "recurrence"
        )
        return {
            "spec": _spec_payload(spec),
            "points": frame.space.points,
            "weights": frame.space.weights,
            "rows": frame.rows,
        }, True
    raise _Usage(f"unknown ensemble action {args.action!r}")


def _csv_ensemble(args, results):
    if args.action != "sample":
        raise _Usage("csv output is only available for ensemble sample")
    draws = results["draws"]
    return "\n".join(",".join(repr(float(v)) for v in row) for row in draws) + "\n"


def _sidecar_ensemble(results, seed):
    return {
        "spec": results["spec"],
        "seed": seed,
        "N": results["N"],
    }


# ---------------------------------------------------------------- lpp


def _lpp_kind(args):
    kind = (args.kind or "exponential").lower()
    if kind == "exponential":
        return lpp.Exponential(args.rate if args.rate is not None else 1.0)
    if kind == "geometric":
        if args.q is None:
            raise _Usage("geometric needs --q")
        return lpp.Geometric(args.q)
    if kind == "constant":
        return lpp.Constant(args.value if args.value is not None else 1.0)
    raise _Usage("--kind must be exponential, geometric, or constant")


def _cmd_lpp(args, seed):
    if args.m is None or args.n is None:
        raise _Usage("--m and --n are required")
    if args.action == "sample":
        kind = _lpp_kind(args)
        num = args.num or 1

        def work(i):
            rng = derive_substream(seed, i)
            return lpp.sample_passage_batch(args.m, args.n, kind, num, rng)

        blocks = _replica_map(args.replicas, args.jobs, work)
        values = np.concatenate(blocks)
        return {"m": args.m, "n": args.n, "values": values}, True
    if args.action == "bridge":
        which = (args.kind or "exponential").lower()
        num = args.num or 20000
        alpha = args.alpha or 0.001
        rng_g = derive_substream(seed, 0)
        rng_e = derive_substream(seed, 1)
        if which == "exponential":
            kind = lpp.Exponential(1.0)
            g = lpp.sample_passage_batch(args.m, args.n, kind, num, rng_g)
            eig = ensembles.sample_eigs_batch(
                ensembles.Wishart(args.m, args.n), num, rng_e
            )[:, -1]
            shift = 0.0
        elif which == "geometric":
            if args.q is None:
                raise _Usage("geometric bridge needs --q")
            kind = lpp.Geometric(args.q)
            g = lpp.sample_passage_batch(args.m, args.n, kind, num, rng_g)
            eig = ensembles.sample_eigs_batch(
                ensembles.Meixner(args.m, args.n, args.q), num, rng_e
            )[:, -1]
            shift = float(lpp.bridge_shift(kind, args.m))
        else:
            raise _Usage("bridge supports exponential or geometric kinds")
        d = stats.ks_two_sample(g, eig - shift)
        crit = stats.ks_two_sample_critical(num, num, alpha)
        ok = d < crit
        return {
            "m": args.m, "n": args.n, "kind": which, "N": num,
            "statistic": d, "critical": crit, "shift": shift, "verdict": ok,
        }, ok
    raise _Usage(f"unknown lpp action {args.action!r}")


def _csv_lpp(args, results):
    if args.action != "sample":
        raise _Usage("csv output is only available for lpp sample")
    return "\n".join(repr(float(v)) for v in results["values"]) + "\n"


# ---------------------------------------------------------------- dominate


def _random_frame(space, rank, rng, use_complex=False):
    shape = (rank, space.size)
    raw = rng.normal(size=shape)
    if use_complex:
        raw = raw + 1j * rng.normal(size=shape)
    return orthonormalize(raw, space.inner_product())


_FACTORS = {
    "one": lambda x: 1.0,
    "linear": lambda x: 1.0 + float(sum(x)),
    "meixner": lambda x: float(
        np.prod([xi * xi / ((xi + 1.0) * (xi + 2.0)) for xi in x])
    ),
}


def _cmd_dominate(args, seed):
    if args.action in ("exact", "flow"):
        elements = _parse_json_arg(args.elements, "--elements")
        pairs = _parse_json_arg(args.pairs, "--pairs") if args.pairs else []
        poset = dom.FinitePoset.from_pairs(
            [tuple(e) if isinstance(e, list) else e for e in elements],
            [
                (
                    tuple(a) if isinstance(a, list) else a,
                    tuple(b) if isinstance(b, list) else b,
                )
                for a, b in pairs
            ],
        )
        p1 = _parse_json_arg(args.p1, "--p1")
        p2 = _parse_json_arg(args.p2, "--p2")
        keymap = {str(e): e for e in poset.elements}
        pair = dom.MeasurePair(
            poset,
            {keymap[k]: v for k, v in p1.items()},
            {keymap[k]: v for k, v in p2.items()},
        )
        method = "enumerate" if args.action == "exact" else "flow"
        rep = dom.dominance_exact(poset, pair, method=method)
        return rep.payload(), rep.dominated
    if args.action == "lyons":
        ground = args.ground or 4
        rank = args.rank or 1
        trials = args.trials or 20
        space = dpp.GroundSpace.counting(list(range(ground)))
        worst_flow = np.inf
        worst_exh = None
        feasible_all = True
        for t in range(trials):
            rng = derive_substream(seed, t)
            phis = _random_frame(space, rank + 1, rng, use_complex=(t % 2 == 1))
            rep = dom.verify_lyons(space, phis)
            feasible_all &= rep.feasible
            worst_flow = min(worst_flow, rep.flow_value - 1.0)
            if rep.exhaustive_margin is not None:
                worst_exh = (
                    rep.exhaustive_margin
                    if worst_exh is None
                    else min(worst_exh, rep.exhaustive_margin)
                )
        ok = feasible_all and (worst_exh is None or worst_exh >= -1e-10)
        return {
            "ground": ground, "rank": rank, "trials": trials,
            "feasible_all": feasible_all,
            "min_flow_margin": float(worst_flow),
            "min_exhaustive_margin": worst_exh,
            "verdict": ok,
        }, ok
    if args.action == "vandermonde":
        wname = (args.weight or "geometric").lower()
        if wname == "geometric":
            weight = dom.GeometricWeight(args.q if args.q is not None else 0.5)
        elif wname in ("expgrid", "exponential"):
            weight = dom.ExponentialGridWeight(
                args.rate if args.rate is not None else 1.0
            )
        else:
            raise _Usage("--weight must be geometric or expgrid")
        fname = (args.factor or "meixner").lower()
        if fname not in _FACTORS:
            raise _Usage("--factor must be one, linear, or meixner")
        n = args.rank or 2
        cutoff = args.cutoff if args.cutoff is not None else 10
        rep = dom.verify_vandermonde(weight, _FACTORS[fname], n, cutoff)
        payload = rep.payload()
        payload.update({"weight": wname, "factor": fname, "n": n, "cutoff": cutoff})
        return payload, rep.feasible
    if args.action == "ratio":
        weights = np.asarray(_parse_json_arg(args.weights, "--weights"), dtype=float)
        f = np.asarray(_parse_json_arg(args.f, "--f"), dtype=float)
        g = np.asarray(_parse_json_arg(args.g, "--g"), dtype=float)
        rep = dom.density_ratio_domination(weights, f, g)
        ok = rep.ratio_monotone and rep.dominates
        return rep.payload(), ok
    if args.action == "empirical":
        num = args.num or 100000
        delta = args.delta if args.delta is not None else 0.01
        s1 = _empirical_source(args.left, num, derive_substream(seed, 0))
        s2 = _empirical_source(args.right, num, derive_substream(seed, 1))
        rep = dom.empirical_dominance(s1, s2, delta)
        payload = rep.payload()
        payload.update({"left": args.left, "right": args.right, "N": num})
        return payload, rep.verdict == "dominates"
    if args.action == "identities":
        which = (args.which or "all").lower()
        trials = args.trials
        checks = []
        if which in ("discrete", "all"):
            checks.append(_identity_discrete(seed, trials or 10))
        if which in ("positivity", "all"):
            checks.append(_identity_positivity(seed, trials or 50))
        if which in ("continuous", "all"):
            checks.append(_identity_continuous(seed, trials or 10))
        if which in ("inequality", "all"):
            checks.append(_identity_inequality())
        if not checks:
            raise _Usage("--which must be discrete, positivity, continuous, inequality, or all")
        ok = all(c["verdict"] for c in checks)
        return {"checks": checks, "verdict": ok}, ok
    raise _Usage(f"unknown dominate action {args.action!r}")


def _empirical_source(spec_text, num, rng):
    """Largest-eigenvalue or passage-time samples named by a spec string."""
    if spec_text is None:
        raise _Usage("--left and --right sample specs are required")
    if spec_text.startswith("@"):
        return np.loadtxt(spec_text[1:], ndmin=1)
    name, _, rest = spec_text.partition(":")
    parts = [p for p in rest.split(",") if p]
    name = name.lower()
    if name == "wishart":
        m, n = int(parts[0]), int(parts[1])
        return ensembles.sample_eigs_batch(ensembles.Wishart(m, n), num, rng)[:, -1]
    if name == "jacobi":
        n1, n2, n = int(parts[0]), int(parts[1]), int(parts[2])
        return ensembles.sample_eigs_batch(
            ensembles.Jacobi(n1, n2, n), num, rng
        )[:, -1]
    if name == "meixner":
        m, n, q = int(parts[0]), int(parts[1]), float(parts[2])
        return ensembles.sample_eigs_batch(
            ensembles.Meixner(m, n, q), num, rng
        )[:, -1]
    if name == "lpp-exp":
        m, n = int(parts[0]), int(parts[1])
        return lpp.sample_passage_batch(m, n, lpp.Exponential(1.0), num, rng)
    if name == "lpp-geo":
        m, n, q = int(parts[0]), int(parts[1]), float(parts[2])
        return lpp.sample_passage_batch(m, n, lpp.Geometric(q), num, rng)
    raise _Usage(
        "sample spec must be wishart:m,n | jacobi:n1,n2,n | meixner:m,n,q | "
        "lpp-exp:m,n | lpp-geo:m,n,q | @file"
    )


def _identity_discrete(seed, trials):
    worst = 0.0
    for t in range(trials):
        rng = derive_substream(seed, 10_000 + t)
        size = int(rng.integers(4, 7))
        rank = int(rng.integers(2, min(size - 1, 4) + 1))
        space = dpp.GroundSpace(
            np.arange(size, dtype=np.float64), rng.uniform(0.2, 2.0, size)
        )
        phis = _random_frame(space, rank, rng, use_complex=(t % 2 == 1))
        frame = dpp.ProjectionFrame(space, phis)
        for A in itertools.combinations(range(size), rank - 1):
            res = dom.detequality_discrete(frame, [space.points[i] for i in A])
            worst = max(worst, res)
    return {
        "check": "detequality_discrete", "trials": trials,
        "worst_residual": worst, "bound": 1e-12, "verdict": worst < 1e-12,
    }


def _identity_positivity(seed, trials):
    worst_eig = np.inf
    worst_res = 0.0
    for t in range(trials):
        rng = derive_substream(seed, 20_000 + t)
        size = int(rng.integers(4, 8))
        n = int(rng.integers(1, 4))
        pts = list(range(size))
        vals = {x: complex(rng.normal(), rng.normal()) for x in pts}
        signs = {}

        def eps(x, A, _signs=signs, _rng=rng):
            key = (x, tuple(sorted(A)))
            if key not in _signs:
                _signs[key] = 1.0 if _rng.random() < 0.5 else -1.0
            return _signs[key]

        subsets = list(itertools.combinations(pts, n))
        count = int(rng.integers(2, len(subsets) + 1))
        chosen = rng.choice(len(subsets), size=count, replace=False)
        family = [subsets[i] for i in chosen]
        rep = dom.positivity_check(pts, lambda x: vals[x], eps, family)
        worst_eig = min(worst_eig, rep.min_eigenvalue)
        worst_res = max(worst_res, rep.factorization_residual)
    ok = worst_eig >= -1e-10 and worst_res < 1e-12
    return {
        "check": "positivity_check", "trials": trials,
        "min_eigenvalue": float(worst_eig), "worst_residual": worst_res,
        "bound": -1e-10, "verdict": ok,
    }


def _identity_continuous(seed, trials):
    worst = {1: 0.0, 2: 0.0}
    for n in (1, 2):
        for t in range(trials):
            rng = derive_substream(seed, 30_000 + 100 * n + t)
            x = np.sort(rng.uniform(0.0, 8.0, n))
            worst[n] = max(worst[n], dom.detequality_continuous(n, x))
    ok = worst[1] < 1e-10 and worst[2] < 1e-8
    return {
        "check": "detequality_continuous", "trials": trials,
        "worst_residual_n1": worst[1], "worst_residual_n2": worst[2],
        "bounds": [1e-10, 1e-8], "verdict": ok,
    }


def _identity_inequality():
    slack = np.inf
    for n in (1, 2):
        for mode in ("min", "max"):
            for thr in (0.0, 0.5, 1.0, 2.5, 5.0):
                lhs, rhs = dom.detinequality_continuous(n, thr, mode)
                slack = min(slack, lhs - rhs)
    ok = slack >= -1e-8
    return {
        "check": "detinequality_continuous",
        "min_slack": float(slack), "bound": -1e-8, "verdict": ok,
    }


# ---------------------------------------------------------------- plumbing


_GROUPS = {
    "dpp": (_cmd_dpp, _csv_dpp),
    "ust": (_cmd_ust, _csv_ust),
    "ensemble": (_cmd_ensemble, _csv_ensemble),
    "lpp": (_cmd_lpp, _csv_lpp),
    "dominate": (_cmd_dominate, None),
}

_PARAM_KEYS = (
    "action matrix rows points weights inside outside n m k q n1 n2 num "
    "stat legs kind rate value at cutoff method alpha elements pairs p1 p2 "
    "ground rank trials weight factor f g left right delta which replicas"
).split()


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dpplab",
        allow_abbrev=False,
        description="Determinantal processes, spanning trees, ensembles, "
        "last-passage times, and stochastic-dominance checks.",
    )
    sub = parser.add_subparsers(dest="group", required=True)
    for group, actions in (
        ("dpp", ["admissible", "law", "prob", "sample"]),
        ("ust", ["exact", "sample", "verify"]),
        ("ensemble", ["sample", "density", "kernel"]),
        ("lpp", ["sample", "bridge"]),
        ("dominate", ["exact", "flow", "lyons", "vandermonde", "ratio",
                      "empirical", "identities"]),
    ):
        gp = sub.add_parser(group)
        gp.add_argument("action", choices=actions)
        for flag, kwargs in (
            ("--seed", {"type": int}),
            ("--replicas", {"type": int}),
            ("--jobs", {"type": int}),
            ("--out", {}),
            ("--format", {"choices": ["json", "csv"]}),
            ("--tol", {"type": float}),
            ("--config", {}),
            ("--timing", {"action": "store_true", "default": None}),
            ("--matrix", {}),
            ("--rows", {}),
            ("--points", {}),
            ("--weights", {}),
            ("--inside", {"metavar": "LIST"}),
            ("--outside", {"metavar": "LIST"}),
            ("--n", {"type": int}),
            ("--m", {"type": int}),
            ("--k", {"type": int}),
            ("--q", {"type": float}),
            ("--n1", {"type": int}),
            ("--n2", {"type": int}),
            ("--num", {"type": int}),
            ("--stat", {}),
            ("--legs", {}),
            ("--kind", {}),
            ("--rate", {"type": float}),
            ("--value", {"type": float}),
            ("--at", {}),
            ("--cutoff", {"type": int}),
            ("--method", {}),
            ("--alpha", {"type": float}),
            ("--elements", {}),
            ("--pairs", {}),
            ("--p1", {}),
            ("--p2", {}),
            ("--ground", {"type": int}),
            ("--rank", {"type": int}),
            ("--trials", {"type": int}),
            ("--weight", {}),
            ("--factor", {}),
            ("--f", {}),
            ("--g", {}),
            ("--left", {}),
            ("--right", {}),
            ("--delta", {"type": float}),
            ("--which", {}),
        ):
            gp.add_argument(flag, **kwargs)
    return parser


_CASTS = {int: int, float: float}


def _apply_config(args):
    if not args.config:
        return
    pairs = {}
    with open(args.config, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise _Usage(f"config line {line!r} is not key=value")
            key, _, value = line.partition("=")
            pairs[key.strip()] = value.strip()
    for key, raw in pairs.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise _Usage(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            value = _parse_scalar(raw)
            if attr == "timing":
                value = raw.lower() in ("1", "true", "yes")
            setattr(args, attr, value)


def dispatch(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        _apply_config(args)
        if args.replicas is None:
            args.replicas = 1
        if args.replicas < 1:
            raise _Usage("--replicas must be at least 1")
        if args.jobs is None:
            args.jobs = 1
        seed = resolve_seed(args.seed)
        handler, csv_handler = _GROUPS[args.group]
        started = time.perf_counter()
        results, ok = handler(args, seed)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        fmt = args.format or "json"
        if fmt == "csv":
            if csv_handler is None:
                raise _Usage(f"csv output is not available for {args.group}")
            text = csv_handler(args, results)
            sidecar = None
            if args.group == "ensemble" and args.action == "sample":
                sidecar = _sidecar_ensemble(results, seed)
        else:
            params = {
                k: _jsonable(getattr(args, k))
                for k in _PARAM_KEYS
                if hasattr(args, k) and getattr(args, k) is not None
            }
            envelope = {
                "command": f"{args.group} {args.action}",
                "params": params,
                "seed": seed,
                "results": _jsonable(results),
                "timing_ms": elapsed_ms if args.timing else None,
            }
            text = json.dumps(envelope, sort_keys=True, indent=2) + "\n"
            sidecar = None
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            if sidecar is not None:
                with open(args.out + ".json", "w", encoding="utf-8") as fh:
                    fh.write(json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
        else:
            sys.stdout.write(text)
        return 0 if ok else 1
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DpplabError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return 2


def main():
    return dispatch()


if __name__ == "__main__":
    sys.exit(main())
