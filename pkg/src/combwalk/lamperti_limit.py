"""The anomalous (slow-tail) limit: labelled subordinators, the
arcsine-Lamperti marginal law, and the occupation-number recursion.

The limit path S is built from an alpha-subordinator whose jump
intervals are labelled +-1 (P(+1) = (1+b)/2); S moves with slope equal
to the label across each jump interval and with slope m (the label
mean) across the leftover drift time of the epsilon-approximation, so
it is 1-Lipschitz by construction.

The single-time marginal of S(t)/t has the closed-form density

    f(x) = (2 sin(pi a)/pi) (1-x)^{a-1}(1+x)^{a-1} /
           [r (1-x)^{2a} + 2 cos(pi a)(1-x)^a (1+x)^a + (1+x)^{2a}/r]

on (-1, 1) with r = (1+m)/(1-m), reducing to the arcsine law at
a = 1/2, m = 0.  The (1 -+ x)^{a-1} endpoint singularities carry real
mass: all quadrature and interpolation here run in the substituted
coordinates y = (1 +- x)^a where the density is tame.
"""

import functools

import numpy as np
from scipy.special import gammaln

from .comb_model import CombSpec
from .scaling_laws import classify_regime
from .stable_proc import (default_jump_cut, sample_positive_stable,
                          subordinator_path)

import concurrent.futures


def _ks_uniform(u):
    u = np.sort(u)
    n = len(u)
    return max(np.max(np.arange(1, n + 1) / n - u),
               np.max(u - np.arange(0, n) / n))


# ---------------------------------------------------------------------------
# labelled subordinator and the limit path


class LabelledSubordinatorPath:
    """Subordinator jumps with i.i.d. +-1 labels.

    residual_slope is the slope given to drift (sub-epsilon) time when
    the path is integrated; it defaults to the label mean b.
    """

    def __init__(self, alpha, b, t_max, times, jumps, drift, labels):
        if len(labels) != len(jumps):
            raise ValueError("labels must match jumps one to one")
        self.alpha = alpha
        self.b = b
        self.t_max = t_max
        self.times = times
        self.jumps = jumps
        self.drift = drift
        self.labels = labels
        self.residual_slope = b
        cum = np.concatenate([[0.0], np.cumsum(jumps)])
        self.T_before = drift * times + cum[:-1]   # T(s_i-)
        self.T_after = self.T_before + jumps       # T(s_i)
        self._cum_j = cum
        self._cum_lj = np.concatenate([[0.0], np.cumsum(labels * jumps)])

    @property
    def n_jumps(self):
        return len(self.jumps)

    def total(self):
        """T(t_max)."""
        return float(self.drift * self.t_max + self._cum_j[-1])

    def thinned_sum(self, t, sign):
        """T^u(t) (sign=+1) or T^d(t) (sign=-1): labelled jump mass by
        subordinator time t, plus the label-share of drift time."""
        t = float(t)
        if not 0.0 <= t <= self.t_max:
            raise ValueError("t outside [0, t_max]")
        k = np.searchsorted(self.times, t, side="right")
        mask = self.labels[:k] == sign
        share = (1.0 + sign * self.b) / 2.0
        return float(self.jumps[:k][mask].sum() + share * self.drift * t)


def labelled_subordinator(alpha, b, t_max, epsilon=None, rng=None):
    """Subordinator path with independent +-1 labels, P(+1) = (1+b)/2."""
    if not -1.0 <= b <= 1.0:
        raise ValueError("label bias must lie in [-1, 1]")
    if rng is None:
        rng = np.random.default_rng()
    s, J, drift = subordinator_path(alpha, t_max, rng, eps=epsilon)
    lab = np.where(rng.random(len(J)) < (1.0 + b) / 2.0, 1.0, -1.0)
    return LabelledSubordinatorPath(alpha, b, t_max, s, J, drift, lab)


def renewal_state(path, t):
    """(G, H, N, A, excess) of the subordinator range at level t.

    G/H are the last/first range points around t, N the number of jump
    intervals closed by t.  On the (epsilon-approximate) range
    G = H = t and the age/excess vanish.
    """
    total = path.total()
    if not 0.0 <= t <= total:
        raise ValueError("level beyond the simulated path")
    idx = int(np.searchsorted(path.T_after, t, side="right"))
    if idx >= path.n_jumps or t <= path.T_before[idx]:
        return t, t, idx, 0.0, 0.0
    G = float(path.T_before[idx])
    H = float(path.T_after[idx])
    return G, H, idx, t - G, H - t


class AnomalousPath:
    """Evaluator view of the labelled path: the limit walk S(t) and its
    renewal decorations, valid for t in [0, T(t_max)]."""

    def __init__(self, path):
        self.path = path

    def S(self, t):
        """Integral of the label process up to t (vectorized)."""
        p = self.path
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > p.total()):
            raise ValueError("level beyond the simulated path")
        idx = np.searchsorted(p.T_after, t, side="right")
        full_lj = p._cum_lj[idx]
        full_j = p._cum_j[idx]
        inside = (idx < p.n_jumps)
        tb = np.where(inside, p.T_before[np.minimum(idx, p.n_jumps - 1)], np.inf)
        st = np.where(inside & (tb < t), t - tb, 0.0)
        lab = np.where(inside, p.labels[np.minimum(idx, p.n_jumps - 1)], 0.0)
        return (full_lj + lab * st
                + p.residual_slope * (t - full_j - st))

    def evaluate(self, t):
        """Full decoration at scalar t:
        (S, label_value, age, excess, lag, lead, G, H, N)."""
        p = self.path
        G, H, N, age, exc = renewal_state(p, t)
        S_t = float(self.S(t))
        if age == 0.0 and exc == 0.0:
            x_val = p.residual_slope
            lag = lead = S_t
        else:
            x_val = float(p.labels[N])
            lag = float(self.S(G))
            lead = lag + float(p.labels[N] * p.jumps[N])
        return S_t, x_val, age, exc, lag, lead, G, H, N


def anomalous_path(path):
    return AnomalousPath(path)


def default_t_max(alpha, level=1.0):
    """Horizon making P(T(t_max) < level) negligible (~exp(-30c))."""
    return float(level ** alpha * 30.0 ** (1.0 - alpha))


def sample_anomalous_ensemble(alpha, b, n_rep, seed, level=1.0, t_max=None,
                              epsilon=None, threads=1, chunk=64):
    """(S(level), age, excess) over n_rep independent labelled paths.

    Deterministically chunked like walk_marginals: identical output for
    any thread count.
    """
    if t_max is None:
        t_max = default_t_max(alpha, level)
    if epsilon is None:
        epsilon = default_jump_cut(alpha, t_max)
    lam = t_max * epsilon ** (-alpha)
    if lam > 50_000_000 / max(1, n_rep // 1000):
        pass  # per-path cap enforced inside subordinator sampling
    drift = alpha * epsilon ** (1.0 - alpha) / (1.0 - alpha)
    n_chunks = (n_rep + chunk - 1) // chunk
    kids = np.random.SeedSequence(seed).spawn(n_chunks)
    S = np.empty(n_rep)
    A = np.empty(n_rep)
    H = np.empty(n_rep)

    def work(i):
        rng = np.random.default_rng(kids[i])
        m = min(chunk, n_rep - i * chunk)
        out = np.empty((m, 3))
        for r in range(m):
            n = rng.poisson(lam)
            s = np.sort(rng.random(n)) * t_max
            J = epsilon * rng.random(n) ** (-1.0 / alpha)
            lab = np.where(rng.random(n) < (1.0 + b) / 2.0, 1.0, -1.0)
            cum = np.cumsum(J)
            total = drift * t_max + (cum[-1] if n else 0.0)
            if total < level:
                raise RuntimeError("path did not reach the requested level; "
                                   "increase t_max")
            Tb = drift * s + np.concatenate([[0.0], cum[:-1]])
            Ta = Tb + J
            idx = int(np.searchsorted(Ta, level, side="right"))
            full_lj = float((lab[:idx] * J[:idx]).sum())
            full_j = float(cum[idx - 1]) if idx > 0 else 0.0
            if idx < n and Tb[idx] < level:
                st = level - Tb[idx]
                out[r, 0] = full_lj + lab[idx] * st + b * (level - full_j - st)
                out[r, 1] = st
                out[r, 2] = Ta[idx] - level
            else:
                out[r, 0] = full_lj + b * (level - full_j)
                out[r, 1] = 0.0
                out[r, 2] = 0.0
        return i, out

    if threads <= 1:
        results = map(work, range(n_chunks))
        for i, out in results:
            lo = i * chunk
            S[lo:lo + len(out)] = out[:, 0]
            A[lo:lo + len(out)] = out[:, 1]
            H[lo:lo + len(out)] = out[:, 2]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            for i, out in ex.map(work, range(n_chunks)):
                lo = i * chunk
                S[lo:lo + len(out)] = out[:, 0]
                A[lo:lo + len(out)] = out[:, 1]
                H[lo:lo + len(out)] = out[:, 2]
    return S, A, H


# ---------------------------------------------------------------------------
# the marginal law


def density_f(alpha, m, t, x):
    """Density of S(t): supported on (-t, t), self-similar of index 1."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not -1.0 < m < 1.0:
        raise ValueError("drift must lie in (-1, 1)")
    if t <= 0:
        raise ValueError("t must be positive")
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) >= t):
        raise ValueError("density supported on (-t, t)")
    z = x / t
    r = (1.0 + m) / (1.0 - m)
    tm = (1.0 - z) ** alpha
    tp = (1.0 + z) ** alpha
    den = r * tm * tm + 2.0 * np.cos(np.pi * alpha) * tm * tp + tp * tp / r
    out = (2.0 * np.sin(np.pi * alpha) / (np.pi * t)
           * (1.0 - z) ** (alpha - 1.0) * (1.0 + z) ** (alpha - 1.0) / den)
    return float(out[0]) if scalar else out


_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(24)


def _edge_integrand(alpha, m, y, side):
    """Density of S(1) in the substituted coordinate y = (1 -+ x)^alpha
    of the nearer endpoint (side -1: x = y^(1/a) - 1, side +1 mirrored).
    The edge singularity cancels against the Jacobian:

        g(y) = (2 sin(pi a)/(pi a)) (2 - y^(1/a))^(a-1) / den(y)

    which is bounded on (0, 1] -- no underflow from forming 1 + x.
    """
    r = (1.0 + m) / (1.0 - m)
    far = (2.0 - y ** (1.0 / alpha)) ** alpha
    if side < 0:
        tm, tp = far, y
    else:
        tm, tp = y, far
    den = r * tm * tm + 2.0 * np.cos(np.pi * alpha) * tm * tp + tp * tp / r
    num = (2.0 * np.sin(np.pi * alpha) / (np.pi * alpha)
           * (2.0 - y ** (1.0 / alpha)) ** (alpha - 1.0))
    return num / den


class DensityEvaluator:
    """Quadrature cache for one (alpha, m): CDF, inverse CDF, moments.

    Panels are uniform in the edge coordinate y = (1 -+ x)^alpha of the
    nearer endpoint, where the integrand is bounded; interpolation also
    runs in y, so sub-panel mass near the edges is represented
    correctly (plain x-space grids lose ~1e-1 KS at alpha = 0.3).
    """

    def __init__(self, alpha, m, nhalf=2500):
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not -1.0 < m < 1.0:
            raise ValueError("drift must lie in (-1, 1)")
        self.alpha = alpha
        self.m = m
        yb = np.linspace(0.0, 1.0, nhalf + 1)
        self._yb = yb
        # Gauss nodes on every panel, in y
        mid = 0.5 * (yb[1:] + yb[:-1])
        half = 0.5 * (yb[1:] - yb[:-1])
        ynod = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
        wnod = half[:, None] * _GAUSS_W[None, :]
        inv = 1.0 / alpha
        # left side: x = y^(1/a) - 1, dx = (1/a) y^(1/a - 1) dy
        xl = ynod ** inv - 1.0
        gl = _edge_integrand(alpha, m, ynod, -1)
        panl = np.sum(gl * wnod, axis=1)
        self._FL = np.concatenate([[0.0], np.cumsum(panl)])
        self._meanL = float(np.sum(xl * gl * wnod))
        # right side: x = 1 - y^(1/a); G(y) = mass on [x(y), 1)
        xr = 1.0 - ynod ** inv
        gr = _edge_integrand(alpha, m, ynod, +1)
        panr = np.sum(gr * wnod, axis=1)
        self._GR = np.concatenate([[0.0], np.cumsum(panr)])
        self._meanR = float(np.sum(xr * gr * wnod))
        self.mass = float(self._FL[-1] + self._GR[-1])
        self.mean = self._meanL + self._meanR

    # -- CDF / inverse ------------------------------------------------------

    def cdf(self, x, t=1.0):
        scalar = np.isscalar(x)
        z = np.clip(np.atleast_1d(np.asarray(x, dtype=float)) / t, -1.0, 1.0)
        out = np.empty_like(z)
        left = z <= 0.0
        yq = (1.0 + z[left]) ** self.alpha
        out[left] = np.interp(yq, self._yb, self._FL)
        yq = (1.0 - z[~left]) ** self.alpha
        out[~left] = self.mass - np.interp(yq, self._yb, self._GR)
        return float(out[0]) if scalar else out

    def ppf(self, q, t=1.0):
        """Exact inverse of the cached CDF (piecewise linear in y)."""
        scalar = np.isscalar(q)
        q = np.atleast_1d(np.asarray(q, dtype=float)) * self.mass
        out = np.empty_like(q)
        inv = 1.0 / self.alpha
        left = q <= self._FL[-1]
        i = np.clip(np.searchsorted(self._FL, q[left], side="right") - 1,
                    0, len(self._yb) - 2)
        dF = self._FL[i + 1] - self._FL[i]
        y = self._yb[i] + (q[left] - self._FL[i]) * (self._yb[i + 1]
                                                     - self._yb[i]) / dF
        out[left] = y ** inv - 1.0
        g = self.mass - q[~left]
        i = np.clip(np.searchsorted(self._GR, g, side="right") - 1,
                    0, len(self._yb) - 2)
        dG = self._GR[i + 1] - self._GR[i]
        y = self._yb[i] + (g - self._GR[i]) * (self._yb[i + 1]
                                               - self._yb[i]) / dG
        out[~left] = 1.0 - y ** inv
        out *= t
        return float(out[0]) if scalar else out

    def sample(self, rng, t=1.0, size=None):
        u = rng.random(size)
        return self.ppf(u, t=t)


@functools.lru_cache(maxsize=64)
def _evaluator(alpha, m):
    return DensityEvaluator(alpha, m)


def cdf_f(alpha, m, t, x):
    """CDF of S(t), quadrature-backed, edge mass resolved."""
    return _evaluator(alpha, m).cdf(x, t=t)


def ppf_f(alpha, m, t, q):
    return _evaluator(alpha, m).ppf(q, t=t)


def sample_marginal(alpha, m, t, rng, size=None):
    """Inversion sampler for the marginal law of S(t)."""
    return _evaluator(alpha, m).sample(rng, t=t, size=size)


def sample_ratio(alpha, b, rng, size=None):
    """(T_u - T_d)/(T_u + T_d) with T_u, T_d independent positive stable
    weighted by the label probabilities -- same law as S(1)."""
    p1 = sample_positive_stable(alpha, size, rng)
    p2 = sample_positive_stable(alpha, size, rng)
    tu = ((1.0 + b) / 2.0) ** (1.0 / alpha) * p1
    td = ((1.0 - b) / 2.0) ** (1.0 / alpha) * p2
    return (tu - td) / (tu + td)


def flt_f(alpha, m, s, y):
    """Fourier-Laplace transform of the marginal family: time is
    Laplace (s > 0), space is Fourier (frequency y).

        ((1+m)/2 (s-iy)^{a-1} + (1-m)/2 (s+iy)^{a-1}) /
        ((1+m)/2 (s-iy)^a     + (1-m)/2 (s+iy)^a)

    Weights appear in numerator and denominator alike; this is the
    convention that reproduces the numeric transform (y = 0 -> 1/s).
    """
    if s <= 0:
        raise ValueError("Laplace variable must be positive")
    p = (1.0 + m) / 2.0
    q = (1.0 - m) / 2.0
    zm = s - 1j * y
    zp = s + 1j * y
    num = p * zm ** (alpha - 1.0) + q * zp ** (alpha - 1.0)
    den = p * zm ** alpha + q * zp ** alpha
    return num / den


# ---------------------------------------------------------------------------
# occupation-number recursion and its generating-function limit


def lamperti_recursion(comb, n_max):
    """p[n, k] = P(k up-steps among the n window increments), exactly.

    The window starts just after an up-to-down turn.  Cycles are a full
    down run (length l) then a full up run (length m), consuming l+m
    increments and adding m up-steps; partial runs close the window.
    Dynamic programming with both convolution phases as contiguous
    matrix-vector products (rows stored bottom-up, the second phase on
    a skew-shifted copy), O(n_max^3) time, O(n_max^2) memory.
    """
    if n_max > 5000:
        raise ValueError("recursion table capped at n_max = 5000")
    N = int(n_max)
    n = np.arange(0, N + 2, dtype=float)
    Td = comb.down_law.tail(n)
    Tu = comb.up_law.tail(n)
    d = np.zeros(N + 2)
    d[1:] = Td[:-1] - Td[1:]
    u = np.zeros(N + 2)
    u[1:] = Tu[:-1] - Tu[1:]
    p_rev = np.zeros((N + 1, N + 1))    # p_rev[N-r] = p[r]
    wsk = np.zeros((N + 1, N + 1))      # wsk[N-r, k+N-r] = W[r, k]
    p_rev[N, 0] = 1.0
    for nn in range(1, N + 1):
        w = d[1:nn + 1] @ p_rev[N - nn + 1:N + 1]
        wsk[N - nn, N - nn:] = w[:nn + 1]
        conv = u[1:nn + 1] @ wsk[N - nn + 1:N + 1]
        row = np.zeros(N + 1)
        row[:nn + 1] = conv[N - nn:]
        row[0] += Td[nn]
        # down run ends at length nn-k, up run not yet closed after k steps
        row[0:nn] += d[1:nn + 1][::-1] * Tu[0:nn]
        p_rev[N - nn] = row
    return p_rev[::-1].copy()


def _gf_series(law, z, tol=1e-14, budget=2_000_000):
    # sum_{n>=0} T(n) z^n; remainder <= z^(M+1)/(1-z)
    if not 0.0 < z < 1.0:
        raise ValueError("series argument must lie in (0, 1)")
    M = int(np.ceil(np.log(tol * (1.0 - z)) / np.log(z)))
    if M > budget:
        raise ValueError(f"series needs ~{M} terms at argument {z}; "
                         "move x away from 1")
    n = np.arange(0, M + 1, dtype=float)
    return float(np.sum(law.tail(n) * z ** n))


def double_gf_limit(comb, x, lam):
    """(value, target) of the occupation generating-function limit.

    value  = (1-x) * P(x, e^{-lam(1-x)}) with P the joint generating
             function of (window length, up-step count), summed as a
             series to tail < 1e-14
    target = ((1+lam)^{a-1} + rho) / ((1+lam)^a + rho),
             rho = (1-b)/(1+b) the down/up tail-constant ratio
    """
    rep = classify_regime(comb)
    if rep.regime != "anomalous":
        raise ValueError("generating-function limit requires the anomalous "
                         "regime (tail index < 1)")
    au = comb.up_law.tail_index
    ad = comb.down_law.tail_index
    if au is None or ad is None or abs(au - ad) > 1e-12:
        raise ValueError("generating-function limit needs equal tail indices")
    if not 0.0 < x < 1.0:
        raise ValueError("x must lie in (0, 1)")
    if lam <= 0:
        raise ValueError("lam must be positive")
    alpha = rep.alpha
    rho = (1.0 - rep.balance) / (1.0 + rep.balance)
    target = ((1.0 + lam) ** (alpha - 1.0) + rho) / ((1.0 + lam) ** alpha + rho)
    y = np.exp(-lam * (1.0 - x))
    t_d = _gf_series(comb.down_law, x)
    t_u = _gf_series(comb.up_law, x * y)
    f_d = 1.0 - (1.0 - x) * t_d            # sum d_n x^n
    f_u = 1.0 - (1.0 - x * y) * t_u
    value = (1.0 - x) * (t_d + y * f_d * t_u) / (1.0 - f_d * f_u)
    return value, target


# ---------------------------------------------------------------------------
# kernel diagnostics


def markov_kernel_check(paths, t, a_bin, alpha=None):
    """Conditional law of the excess given the age at level t against
    the closed-form kernel CDF 1 - (a/(a+h))^alpha.

    `paths` is either an iterable of LabelledSubordinatorPath or a
    pre-collected (age, excess) array pair.  Applying each sample's own
    age to the kernel CDF gives an exact uniform pivot; the KS of that
    pivot is reported, alongside the cruder bin-midpoint comparison.
    """
    lo, hi = float(a_bin[0]), float(a_bin[1])
    if isinstance(paths, tuple) and len(paths) == 2:
        A, H = np.asarray(paths[0]), np.asarray(paths[1])
        if alpha is None:
            raise ValueError("alpha required with raw (age, excess) arrays")
    else:
        ages, excs = [], []
        for p in paths:
            if not isinstance(p, LabelledSubordinatorPath):
                raise ValueError("paths must hold LabelledSubordinatorPath "
                                 "objects or be an (age, excess) pair")
            if alpha is None:
                alpha = p.alpha
            _, _, _, a, h = renewal_state(p, t)
            ages.append(a)
            excs.append(h)
        A, H = np.array(ages), np.array(excs)
    sel = (A >= lo) & (A <= hi) & (A > 0.0)
    n = int(sel.sum())
    if n < 200:
        raise ValueError(f"age bin holds {n} samples (< 200); "
                         "widen the bin or add replicas")
    a, h = A[sel], H[sel]
    pit = 1.0 - (a / (a + h)) ** alpha
    ks = _ks_uniform(pit)
    amid = 0.5 * (lo + hi)
    um = 1.0 - (amid / (amid + h)) ** alpha
    ks_mid = _ks_uniform(um)
    return {"n": n, "ks": float(ks), "ks_midpoint": float(ks_mid)}
