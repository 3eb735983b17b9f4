"""Command-line front end: simulation, limit sampling, density tables,
trajectory estimation, and verification scenarios.

Exit codes: 0 success / criteria pass, 1 criterion failure, 2 usage or
config error.  Every command is a pure function of (flags, input
files); the seed defaults to $COMBWALK_SEED (else 0) and is recorded in
every output.  CSV floats carry 17 significant digits so files
round-trip losslessly.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import lamperti_limit
from .comb_model import CombSpec
from .scaling_laws import classify_regime
from .stable_proc import sample_positive_stable, sample_stable
from .stat_verify import (VerificationScenario, format_report, hill_estimate,
                          verify_regime)
from .walk_sim import simulate_prw, walk_marginals


class _CliError(Exception):
    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _env_seed():
    v = os.environ.get("COMBWALK_SEED")
    if v is None:
        return None
    try:
        return int(v)
    except ValueError:
        raise _CliError("COMBWALK_SEED must be an integer")


def _load_comb(path):
    try:
        return CombSpec.from_json(path)
    except OSError as e:
        raise _CliError(f"cannot read comb file: {e}")
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as e:
        raise _CliError(f"bad comb file {path}: {e}")


def _out_stream(path):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w"), True
    except OSError as e:
        raise _CliError(f"cannot open output file: {e}")


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args):
    comb = _load_comb(args.comb)
    seed = args.seed
    if args.horizon < 0:
        raise _CliError("horizon must be >= 0")
    if args.horizon > 10_000_000:
        raise _CliError("horizon capped at 10^7 for per-step output")
    traj_path = args.trajectory or (args.out + "_trajectory.csv")
    runs_path = args.runs or (args.out + "_runs.csv")
    comb_json = json.dumps(comb.to_dict())

    header = [f"# combwalk trajectory", f"# seed: {seed}",
              f"# comb: {comb_json}"]
    if args.horizon == 0:
        with open(traj_path, "w") as fh:
            fh.write("\n".join(header) + "\nn,position,step,age\n")
        with open(runs_path, "w") as fh:
            fh.write(f"# combwalk runs\n# seed: {seed}\n# comb: {comb_json}\n"
                     "index,direction,length\n")
        print("steps: 0")
        return 0

    traj = simulate_prw(comb, args.horizon, seed=seed)
    steps = traj.steps()
    pos = traj.positions()[1:]          # S_1..S_horizon
    ages = traj.ages()
    with open(traj_path, "w") as fh:
        fh.write("\n".join(header) + "\nn,position,step,age\n")
        for i in range(len(steps)):
            fh.write(f"{i + 1},{int(pos[i])},{int(steps[i])},"
                     f"{int(ages[i])}\n")
    with open(runs_path, "w") as fh:
        fh.write(f"# combwalk runs\n# seed: {seed}\n# comb: {comb_json}\n"
                 "index,direction,length\n")
        for i, (d, l) in enumerate(zip(traj.directions, traj.lengths)):
            fh.write(f"{i},{d},{int(l)}\n")
    n = len(steps)
    print(f"steps: {n}")
    print(f"final position: {int(pos[-1])}")
    print(f"empirical drift: {_fmt(pos[-1] / n)}")
    print(f"wrote {traj_path}, {runs_path}")
    return 0


# ---------------------------------------------------------------------------
# density


def cmd_density(args):
    if not 0.0 < args.alpha < 1.0:
        raise _CliError("alpha must lie in (0, 1)")
    if not -1.0 < args.m < 1.0:
        raise _CliError("m must lie in (-1, 1)")
    if args.t <= 0:
        raise _CliError("t must be positive")
    if args.npoints < 2:
        raise _CliError("need at least 2 grid points")
    t = args.t
    # interior grid: strictly inside (-t, t), hits x = 0 when npoints is odd
    x = np.linspace(-t, t, args.npoints + 2)[1:-1]
    x[np.abs(x) < 1e-9 * t] = 0.0
    f = lamperti_limit.density_f(args.alpha, args.m, t, x)
    F = lamperti_limit.cdf_f(args.alpha, args.m, t, x)
    fh, close = _out_stream(args.out)
    fh.write(f"# combwalk density alpha={_fmt(args.alpha)} "
             f"m={_fmt(args.m)} t={_fmt(t)}\n")
    fh.write("x,f,F\n")
    for i in range(args.npoints):
        fh.write(f"{_fmt(x[i])},{_fmt(f[i])},{_fmt(F[i])}\n")
    if close:
        fh.close()
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# sample-limit


def cmd_sample_limit(args):
    seed = args.seed
    rng = np.random.default_rng(seed)
    n = args.n
    fh, close = _out_stream(args.out)
    if args.kind == "marginal":
        s = lamperti_limit.sample_marginal(args.alpha, args.m, args.t,
                                           rng, size=n)
        fh.write(f"# combwalk sample-limit marginal alpha={_fmt(args.alpha)}"
                 f" m={_fmt(args.m)} t={_fmt(args.t)} seed={seed}\n")
        fh.write("sample\n")
        for v in s:
            fh.write(_fmt(v) + "\n")
    elif args.kind == "ratio":
        s = lamperti_limit.sample_ratio(args.alpha, args.b, rng, size=n)
        fh.write(f"# combwalk sample-limit ratio alpha={_fmt(args.alpha)}"
                 f" b={_fmt(args.b)} seed={seed}\n")
        fh.write("sample\n")
        for v in s:
            fh.write(_fmt(v) + "\n")
    elif args.kind == "stable":
        s = sample_stable(args.alpha, args.beta, n, rng,
                          scale=args.scale)
        fh.write(f"# combwalk sample-limit stable alpha={_fmt(args.alpha)}"
                 f" beta={_fmt(args.beta)} seed={seed}\n")
        fh.write("sample\n")
        for v in s:
            fh.write(_fmt(v) + "\n")
    elif args.kind == "positive-stable":
        if not 0.0 < args.alpha < 1.0:
            raise _CliError("positive-stable needs alpha in (0, 1)")
        s = sample_positive_stable(args.alpha, n, rng)
        fh.write(f"# combwalk sample-limit positive-stable "
                 f"alpha={_fmt(args.alpha)} seed={seed}\n")
        fh.write("sample\n")
        for v in s:
            fh.write(_fmt(v) + "\n")
    elif args.kind == "ensemble":
        S, A, H = lamperti_limit.sample_anomalous_ensemble(
            args.alpha, args.b, n, seed, level=args.t,
            t_max=args.t_max, threads=args.threads)
        fh.write(f"# combwalk sample-limit ensemble alpha={_fmt(args.alpha)}"
                 f" b={_fmt(args.b)} level={_fmt(args.t)} seed={seed}\n")
        fh.write("S,age,excess\n")
        for i in range(n):
            fh.write(f"{_fmt(S[i])},{_fmt(A[i])},{_fmt(H[i])}\n")
    elif args.kind == "path":
        t_max = args.t_max if args.t_max else 3.0
        path = lamperti_limit.labelled_subordinator(
            args.alpha, args.b, t_max, rng=rng)
        ap = lamperti_limit.anomalous_path(path)
        total = path.total()
        ts = np.linspace(0.0, total, n)
        fh.write(f"# combwalk sample-limit path alpha={_fmt(args.alpha)}"
                 f" b={_fmt(args.b)} t_max={_fmt(t_max)} seed={seed}"
                 f" T={_fmt(total)}\n")
        fh.write("t,S,label,age\n")
        for t in ts:
            S_t, lab, age = ap.evaluate(t)[:3]
            fh.write(f"{_fmt(t)},{_fmt(S_t)},{_fmt(lab)},{_fmt(age)}\n")
    if close:
        fh.close()
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _resolve_scenario(name):
    if os.path.exists(name):
        return name
    stem = name if name.endswith(".json") else name + ".json"
    bundled = os.path.join(os.path.dirname(__file__), "scenarios", stem)
    if os.path.exists(bundled):
        return bundled
    raise _CliError(f"scenario '{name}' is neither a file nor bundled "
                    f"(looked at {bundled})")


def cmd_verify(args):
    path = _resolve_scenario(args.scenario)
    try:
        scenario = VerificationScenario.from_json(path)
    except (ValueError, OSError) as e:
        raise _CliError(f"bad scenario file: {e}")
    try:
        report = verify_regime(scenario, seed=args.seed,
                               threads=args.threads)
    except ValueError as e:
        raise _CliError(f"scenario rejected: {e}")
    text = format_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0 if report["pass"] else 1


# ---------------------------------------------------------------------------
# estimate


def _read_trajectory(path):
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as e:
        raise _CliError(f"cannot read trajectory: {e}")
    rows = [ln for ln in lines if not ln.startswith("#")]
    if not rows:
        raise _CliError("trajectory file has no header row")
    cols = rows[0].split(",")
    if "step" not in cols:
        raise _CliError(f"trajectory header {cols} lacks a 'step' column")
    j = cols.index("step")
    try:
        steps = np.array([int(r.split(",")[j]) for r in rows[1:]])
    except (ValueError, IndexError):
        raise _CliError("malformed trajectory rows")
    if np.any(np.abs(steps) != 1) and len(steps):
        raise _CliError("steps must be +-1")
    return steps


def cmd_estimate(args):
    steps = _read_trajectory(args.trajectory)
    if len(steps) < 100:
        raise _CliError("trajectory too short to estimate anything")
    # run-length encode
    change = np.flatnonzero(np.diff(steps) != 0)
    bounds = np.concatenate([[-1], change, [len(steps) - 1]])
    lengths = np.diff(bounds)
    dirs = steps[bounds[1:]]
    # drop the final (possibly clipped) run
    if len(lengths) > 1:
        lengths, dirs = lengths[:-1], dirs[:-1]
    up = lengths[dirs > 0]
    dn = lengths[dirs < 0]
    if len(up) < 5 or len(dn) < 5:
        raise _CliError("needs at least 5 completed runs per direction")
    mu, md = float(np.mean(up)), float(np.mean(dn))
    m_hat = (mu - md) / (mu + md)
    print(f"completed runs : {len(up)} up, {len(dn)} down")
    print(f"mean run length: up {_fmt(mu)}, down {_fmt(md)}")
    print(f"drift estimate : {_fmt(m_hat)}  (truncated-mean ratio)")
    alphas = []
    degenerate = short = False
    for name, arr in (("up", up), ("down", dn)):
        try:
            h = hill_estimate(arr.astype(float), args.k_frac)
        except ValueError as e:
            print(f"tail index {name} : declined ({e})")
            degenerate |= "degenerate" in str(e)
            short |= "exceedances" in str(e)
            continue
        alphas.append(h.alpha)
        print(f"tail index {name} : {h.alpha:.3f}  "
              f"ci=({h.ci[0]:.3f}, {h.ci[1]:.3f})  k={h.k}")
    if not alphas:
        if degenerate and not short:
            print("implied regime : gaussian "
                  "(runs are (near-)deterministic; no heavy tail)")
        else:
            print("implied regime : undetermined "
                  "(too few completed runs for tail estimation; "
                  "lengthen the trajectory or raise --k-frac)")
        return 0
    amin = min(alphas)
    if amin < 0.95:
        regime = "anomalous"
    elif amin < 1.05:
        regime = "cauchy (near the alpha = 1 boundary)"
    elif amin < 1.95:
        regime = "generic"
    else:
        regime = "gaussian"
    print(f"implied regime : {regime}  (min tail index {amin:.3f}; "
          "Hill is biased for light tails -- treat >= 2 as 'not heavy')")
    return 0


# ---------------------------------------------------------------------------
# selftest


def cmd_selftest(args):
    from .comb_model import constant_comb, power_comb
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        flag = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"[{flag}] {name}" + (f"  ({detail})" if detail else ""))

    f0 = lamperti_limit.density_f(0.5, 0.0, 1.0, 0.0)
    check("arcsine point value", abs(f0 * np.pi - 1.0) < 1e-12,
          f"f(0)={f0:.12f}")

    worst = 0.0
    for a in (0.3, 0.5, 0.7):
        for m in (-0.5, 0.0, 0.5):
            ev = lamperti_limit.DensityEvaluator(a, m, nhalf=800)
            worst = max(worst, abs(ev.mass - 1.0), abs(ev.mean - m) / 10.0)
    check("density mass and mean (9-point grid)", worst < 1e-7,
          f"worst={worst:.2e}")

    comb = power_comb(0.5)
    p = lamperti_limit.lamperti_recursion(comb, 300)
    rows = np.max(np.abs(p.sum(axis=1) - 1.0))
    cum = np.cumsum(p[300])
    w = np.arange(301) / 300.0
    F = (2.0 / np.pi) * np.arcsin(np.sqrt(w))
    ks = max(np.max(np.abs(cum - F)),
             np.max(np.abs(np.concatenate([[0.0], cum[:-1]]) - F)))
    check("occupation recursion rows sum to 1", rows < 1e-12,
          f"max={rows:.2e}")
    check("occupation law near arcsine (n=300)", ks < 0.08, f"KS={ks:.4f}")

    v = lamperti_limit.flt_f(0.6, 0.3, 1.0, 0.0)
    check("transform at zero frequency", abs(v - 1.0) < 1e-12)

    rng = np.random.default_rng(12)
    tpos = sample_positive_stable(0.5, 20_000, rng)
    lam = np.array([0.5, 1.0, 2.0])
    emp = np.exp(-np.outer(lam, tpos)).mean(axis=1)
    dev = np.max(np.abs(emp - np.exp(-np.sqrt(lam))))
    check("one-sided stable Laplace transform", dev < 0.01,
          f"max dev={dev:.4f}")

    comb = constant_comb(0.3, 0.5)
    a = walk_marginals(comb, [2000], 2000, seed=9, threads=1)
    b = walk_marginals(comb, [2000], 2000, seed=9, threads=4)
    check("thread-count determinism", np.array_equal(a, b))

    gf_comb = power_comb(0.5, c=3.0, a_d=0.5, c_d=1.0)
    val, _ = lamperti_limit.double_gf_limit(gf_comb, 0.999, 1.0)
    check("generating-function series pin", abs(val - 0.6655291) < 1e-5,
          f"value={val:.7f}")

    print()
    print("selftest:", "PASS" if failures == 0 else f"{failures} FAILURE(S)")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="combwalk",
        description="Persistent random walks with heavy-tailed memory: "
                    "simulation, limit laws, and verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one walk trajectory")
    p.add_argument("--comb", required=True, help="comb spec JSON file")
    p.add_argument("--horizon", type=int, required=True,
                   help="number of steps")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="walk",
                   help="output prefix (default 'walk')")
    p.add_argument("--trajectory", default=None,
                   help="explicit trajectory CSV path")
    p.add_argument("--runs", default=None, help="explicit runs CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("density", help="tabulate the anomalous-limit "
                                       "marginal density/CDF")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--npoints", type=int, default=1001)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sample-limit", help="draw from the limit laws")
    p.add_argument("--kind", required=True,
                   choices=["marginal", "ratio", "stable", "positive-stable",
                            "ensemble", "path"])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--t", type=float, default=1.0,
                   help="time / level of the marginal")
    p.add_argument("--t-max", type=float, default=None,
                   help="subordinator horizon (ensemble, path)")
    p.add_argument("--n", type=int, required=True,
                   help="draws (or grid points for --kind path)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sample_limit)

    p = sub.add_parser("verify", help="run a verification scenario")
    p.add_argument("--scenario", required=True,
                   help="scenario JSON path or bundled name")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="estimate drift/tails from a "
                                        "trajectory CSV")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--k-frac", type=float, default=0.1,
                   help="Hill top fraction of completed runs (default 0.1)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("selftest", help="fast internal consistency checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            env = _env_seed()
            if env is not None:
                args.seed = env
            elif args.func is not cmd_verify:
                args.seed = 0   # verify falls back to the scenario's seed
        return args.func(args)
    except _CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
