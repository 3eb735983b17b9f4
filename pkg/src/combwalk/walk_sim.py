"""Exact simulation of comb walks.

The walk starts just after an up-to-down turn, so runs alternate
d, u, d, u, ...  Run lengths are drawn from the persistence laws, which
is equivalent to stepping the age-dependent switch probabilities one
step at a time but vastly faster.

Two simulators:

  simulate_prw      one trajectory, run-resolved, optional step arrays
  walk_marginals    many replicas, recording S only at target times;
                    cycle-vectorized and deterministically chunked so
                    results are identical for any thread count
"""

import concurrent.futures

import numpy as np

_STEP_CAP = 10_000
_TABLE_CAP = 50_000_000


class Trajectory:
    """A single walk realisation held as alternating runs."""

    def __init__(self, directions, lengths, horizon):
        self.directions = np.asarray(directions)     # 'd'/'u' per run
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.horizon = int(horizon)
        self._ends = np.cumsum(self.lengths)         # step index ending each run
        signs = np.where(self.directions == "u", 1, -1)
        self._disp = np.concatenate([[0], np.cumsum(signs * self.lengths)])

    @property
    def n_runs(self):
        return len(self.lengths)

    def position_at(self, n):
        """S_n for integer step(s) n in [0, horizon]."""
        n = np.asarray(n, dtype=np.int64)
        if np.any(n < 0) or np.any(n > self.horizon):
            raise ValueError("step outside simulated horizon")
        r = np.searchsorted(self._ends, n, side="left")
        start = self._ends[r] - self.lengths[r]
        sgn = np.where(self.directions[r] == "u", 1, -1)
        return self._disp[r] + sgn * (n - start)

    def steps(self):
        """X_1..X_horizon."""
        reps = self.lengths.copy()
        reps[-1] -= self._ends[-1] - self.horizon
        return np.repeat(np.where(self.directions == "u", 1, -1), reps)

    def positions(self):
        """S_0..S_horizon."""
        return np.concatenate([[0], np.cumsum(self.steps())])

    def ages(self):
        """Age of the active run after each of steps 1..horizon."""
        reps = self.lengths.copy()
        reps[-1] -= self._ends[-1] - self.horizon
        return np.concatenate([np.arange(1, r + 1) for r in reps])

    def skeleton(self):
        """(T, M): times and positions at the ends of completed up-runs."""
        up = np.nonzero(self.directions == "u")[0]
        up = up[self._ends[up] <= self.horizon]
        return self._ends[up], self._disp[up + 1]

    def counting(self, t):
        """Number of full down-up cycles completed by time t."""
        T, _ = self.skeleton()
        return int(np.searchsorted(T, np.floor(t), side="right"))


def simulate_prw(comb, horizon, seed=None, rng=None, step_detail=False):
    """One trajectory out to `horizon` steps.

    step_detail=True asks Trajectory.steps()/ages() callers for per-step
    arrays; it is refused for horizons above 10^4 to keep memory flat.
    The run-level record is always exact at any horizon.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if step_detail and horizon > _STEP_CAP:
        raise ValueError(f"step detail capped at horizon {_STEP_CAP}")
    if rng is None:
        rng = np.random.default_rng(seed)
    dirs = []
    lens = []
    total = 0
    block = 64
    while total < horizon:
        d = comb.down_law.sample(rng, block)
        u = comb.up_law.sample(rng, block)
        for k in range(block):
            dirs.append("d")
            lens.append(d[k])
            total += d[k]
            if total >= horizon:
                break
            dirs.append("u")
            lens.append(u[k])
            total += u[k]
            if total >= horizon:
                break
    return Trajectory(np.array(dirs), np.array(lens), horizon)


def skeleton(traj):
    return traj.skeleton()


def counting(traj, t):
    return traj.counting(t)


def age_process(traj):
    return traj.ages()


def rescaled_path(traj, u, space, drift):
    """t -> (S_{floor(u t)} - drift * u * t) / space on [0, horizon/u]."""

    def path(t):
        t = np.asarray(t, dtype=float)
        n = np.floor(u * t).astype(np.int64)
        return (traj.position_at(n) - drift * u * t) / space

    return path


# ---------------------------------------------------------------------------
# replicated marginals


def _chunk_marginals(cdf_d, cdf_u, targets, rng, batch):
    tmax = targets[-1]
    pos = np.zeros(batch)
    tnow = np.zeros(batch)
    rec = np.full((batch, len(targets)), np.nan)
    while np.any(tnow <= tmax):
        td = np.searchsorted(cdf_d, rng.random(batch), side="left").astype(float)
        tu = np.searchsorted(cdf_u, rng.random(batch), side="left").astype(float)
        tot = td + tu
        for j, tj in enumerate(targets):
            o = tj - tnow
            hit = (o >= 1) & (o <= tot)
            if hit.any():
                oo = o[hit]
                rec[hit, j] = (pos[hit] - np.minimum(oo, td[hit])
                               + np.maximum(0.0, oo - td[hit]))
        pos += tu - td
        tnow += tot
    return rec


def walk_marginals(comb, targets, n_rep, seed, threads=1, batch=4096):
    """S at the given integer times for n_rep independent walks.

    Replicas are generated in fixed 4096-lane chunks, each with its own
    child seed, and reduced in chunk order -- the output is identical
    for any `threads` value.
    """
    targets = np.asarray(sorted(int(t) for t in targets), dtype=np.int64)
    if len(targets) == 0 or targets[0] < 1:
        raise ValueError("targets must be integers >= 1")
    tmax = int(targets[-1])
    if tmax + 2 > _TABLE_CAP:
        raise ValueError("target horizon too large for table sampling; "
                         "use simulate_prw run records instead")
    cdf_d = comb.down_law.cdf_table(tmax + 1)
    cdf_u = comb.up_law.cdf_table(tmax + 1)
    n_chunks = (n_rep + batch - 1) // batch
    kids = np.random.SeedSequence(seed).spawn(n_chunks)
    out = np.empty((n_rep, len(targets)))

    def work(i):
        rng = np.random.default_rng(kids[i])
        return i, _chunk_marginals(cdf_d, cdf_u, targets, rng, batch)

    if threads <= 1:
        results = map(work, range(n_chunks))
        for i, rec in results:
            lo = i * batch
            hi = min(lo + batch, n_rep)
            out[lo:hi] = rec[: hi - lo]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            for i, rec in ex.map(work, range(n_chunks)):
                lo = i * batch
                hi = min(lo + batch, n_rep)
                out[lo:hi] = rec[: hi - lo]
    return out
