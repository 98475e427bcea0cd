"""Crossing points, BKT and power-law data collapse, and norm-scaling fits.

The collapse quality is the weighted mean squared deviation of the
transformed points from a leave-one-out local-linear master curve (Gaussian
kernel, bandwidth 0.5 in the collapse abscissa unless stated otherwise).
All searches are deterministic grid-then-refine; nothing here draws random
numbers except the explicitly seeded bootstrap.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit, minimize_scalar


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class Curve:
    """Mutual-information (or similar) values on a gamma grid for one size."""

    L: int
    gammas: np.ndarray
    values: np.ndarray
    stderr: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "gammas", np.asarray(self.gammas, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.stderr is not None:
            object.__setattr__(self, "stderr",
                               np.asarray(self.stderr, dtype=float))
        if len(self.gammas) < 3:
            raise ValueError("a curve needs at least 3 gamma points")
        if np.any(np.diff(self.gammas) <= 0):
            raise ValueError("gamma grid must be strictly increasing")
        if len(self.values) != len(self.gammas):
            raise ValueError("values must align with the gamma grid")


@dataclass
class CurveFamily:
    curves: list

    def __post_init__(self):
        if len({c.L for c in self.curves}) != len(self.curves):
            raise ValueError("duplicate sizes in curve family")

    def sizes(self) -> list:
        return sorted(c.L for c in self.curves)

    def curve(self, L: int) -> Curve:
        for c in self.curves:
            if c.L == L:
                return c
        raise KeyError(f"no curve for L={L}")


@dataclass(frozen=True)
class CrossingResult:
    gamma: float
    ambiguous: bool = False


@dataclass
class ScalingFitResult:
    gamma_c: float
    nu: float
    residual: float
    method: str  # "bkt" | "power_law"
    extra: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)


def detect_crossing(fam: CurveFamily, L1: int, L2: int):
    """Gamma where the two size curves cross, by sign change of the difference.

    Returns None when the difference never changes sign; with several sign
    changes returns the largest-gamma crossing flagged as ambiguous.
    """
    c1, c2 = fam.curve(L1), fam.curve(L2)
    if len(c1.gammas) == len(c2.gammas) and np.allclose(c1.gammas, c2.gammas):
        grid = c1.gammas
        diff = c1.values - c2.values
    else:
        lo = max(c1.gammas.min(), c2.gammas.min())
        hi = min(c1.gammas.max(), c2.gammas.max())
        if lo >= hi:
            raise ValueError("curves share no gamma overlap")
        grid = np.unique(np.concatenate([
            c1.gammas[(c1.gammas >= lo) & (c1.gammas <= hi)],
            c2.gammas[(c2.gammas >= lo) & (c2.gammas <= hi)]]))
        diff = (np.interp(grid, c1.gammas, c1.values)
                - np.interp(grid, c2.gammas, c2.values))
    return _crossings_from_difference(grid, diff)


def _crossings_from_difference(grid: np.ndarray, diff: np.ndarray):
    found = []
    for k in range(len(grid)):
        if diff[k] == 0.0:
            found.append(float(grid[k]))
        elif k + 1 < len(grid) and diff[k] * diff[k + 1] < 0:
            frac = diff[k] / (diff[k] - diff[k + 1])
            found.append(float(grid[k] + frac * (grid[k + 1] - grid[k])))
    found = sorted(set(np.round(found, 12)))
    if not found:
        return None
    return CrossingResult(gamma=found[-1], ambiguous=len(found) > 1)


@dataclass
class CrossingBootstrap:
    fraction_crossed: float
    ci_low: float
    ci_high: float
    n_boot: int
    samples: np.ndarray


def crossing_bootstrap(gammas, traj_values_1: np.ndarray,
                       traj_values_2: np.ndarray, n_boot: int = 1000,
                       seed: int = 0, ci: float = 0.95) -> CrossingBootstrap:
    """Bootstrap the crossing point over per-trajectory mutual-information
    values (rows = trajectories, columns = the shared gamma grid)."""
    gammas = np.asarray(gammas, dtype=float)
    a = np.asarray(traj_values_1, dtype=float)
    b = np.asarray(traj_values_2, dtype=float)
    rng = np.random.default_rng(seed)
    hits = []
    for _ in range(n_boot):
        ia = rng.integers(0, a.shape[0], size=a.shape[0])
        ib = rng.integers(0, b.shape[0], size=b.shape[0])
        res = _crossings_from_difference(
            gammas, a[ia].mean(axis=0) - b[ib].mean(axis=0))
        if res is not None:
            hits.append(res.gamma)
    hits = np.array(hits)
    if len(hits) == 0:
        return CrossingBootstrap(0.0, np.nan, np.nan, n_boot, hits)
    tail = 0.5 * (1.0 - ci)
    lo, hi = np.quantile(hits, [tail, 1.0 - tail])
    return CrossingBootstrap(len(hits) / n_boot, float(lo), float(hi),
                             n_boot, hits)


def g_factor(L, log_base: float = np.e) -> np.ndarray:
    """Finite-size prefactor [1 + 1/(2 log L - 4)]^(-1) of the BKT ansatz."""
    logs = np.log(np.asarray(L, dtype=float)) / np.log(log_base)
    denom = 2.0 * logs - 4.0
    if np.any(denom <= 0):
        raise ValueError("g factor needs 2 log L - 4 > 0")
    return 1.0 / (1.0 + 1.0 / denom)


def collapse_residual(x: np.ndarray, y: np.ndarray, w: np.ndarray,
                      bandwidth: float) -> float:
    """Weighted mean squared deviation from a leave-one-out local-linear
    master curve, relative to the weighted variance of y.

    The variance normalization makes the value scale-free, so transforms
    that carry free vertical rescalings (such as y = I * L^beta) cannot
    lower the objective just by shrinking every y toward zero.  Points whose
    kernel neighborhood is empty are skipped; if fewer than 80% of points
    keep a usable neighborhood the value is infinite, which stops parameter
    search from scattering the cloud until nothing overlaps.
    """
    n = len(x)
    if n < 4:
        return np.inf
    sq = 0.0
    wsum = 0.0
    used = 0
    for i in range(n):
        dx = x - x[i]
        k = w * np.exp(-0.5 * (dx / bandwidth) ** 2)
        k[i] = 0.0
        s0 = k.sum()
        if s0 <= 1e-12:
            continue
        s1 = (k * dx).sum()
        s2 = (k * dx * dx).sum()
        t0 = (k * y).sum()
        t1 = (k * dx * y).sum()
        denom = s0 * s2 - s1 * s1
        if denom > 1e-300:
            yhat = (s2 * t0 - s1 * t1) / denom
        else:
            yhat = t0 / s0
        sq += w[i] * (y[i] - yhat) ** 2
        wsum += w[i]
        used += 1
    if used < max(4, int(0.8 * n)) or wsum <= 0:
        return np.inf
    mean = (w * y).sum() / w.sum()
    var = (w * (y - mean) ** 2).sum() / w.sum()
    if var <= 0:
        return sq / wsum
    return sq / wsum / var


def _point_weights(stderr, scale) -> np.ndarray:
    """Inverse-variance weights of scale*value points; uniform without errors."""
    scale = np.broadcast_to(np.asarray(scale, dtype=float),
                            np.shape(stderr) if stderr is not None else
                            np.shape(scale)).copy()
    if stderr is None or np.all(np.asarray(stderr) <= 0):
        return np.ones_like(scale)
    sigma = np.maximum(np.abs(scale) * np.asarray(stderr, dtype=float), 1e-12)
    return 1.0 / sigma ** 2


def _bkt_points(fam: CurveFamily, gamma_c: float, nu: float,
                log_base: float) -> tuple:
    xs, ys, ws = [], [], []
    for c in fam.curves:
        mask = c.gammas > gamma_c + 1e-12
        if mask.sum() < 4:
            return None
        g = g_factor(c.L, log_base)
        x = np.log(c.L) - nu / np.sqrt(c.gammas[mask] - gamma_c)
        scale = g * c.gammas[mask]
        xs.append(x)
        ys.append(scale * c.values[mask])
        ws.append(_point_weights(
            c.stderr[mask] if c.stderr is not None else None, scale))
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)


def bkt_collapse_fit(fam: CurveFamily, gamma_c_range: tuple = None,
                     nu_range: tuple = (0.2, 10.0), bandwidth: float = 0.5,
                     coarse_step: float = 0.02,
                     log_base: float = np.e) -> ScalingFitResult:
    """Fit (gamma_c, nu) of g(L)*gamma*I = F[log L - nu/sqrt(gamma-gamma_c)].

    Coarse gamma_c grid (step 0.02), nested bounded 1-d refinement for nu,
    then a bounded refinement of gamma_c around the best coarse cell.
    """
    if len(fam.curves) < 3:
        raise FitError("BKT collapse needs at least 3 sizes")
    gamma_min = min(c.gammas.min() for c in fam.curves)
    if gamma_c_range is None:
        gamma_c_range = (max(0.0, gamma_min - 1.0), gamma_min - 1e-6)
    lo, hi = gamma_c_range
    if hi >= gamma_min:
        hi = gamma_min - 1e-6

    def nu_profile(gamma_c: float):
        def obj(nu):
            pts = _bkt_points(fam, gamma_c, nu, log_base)
            if pts is None:
                return np.inf
            return collapse_residual(*pts, bandwidth)
        res = minimize_scalar(obj, bounds=nu_range, method="bounded",
                              options={"xatol": 1e-5})
        return float(res.fun), float(res.x)

    grid = np.arange(lo, hi + coarse_step / 2, coarse_step)
    grid = grid[grid < gamma_min]
    if len(grid) == 0:
        raise FitError("empty gamma_c search grid")
    coarse = [nu_profile(gc) for gc in grid]
    best_idx = int(np.lexsort((grid, [c[0] for c in coarse]))[0])
    if not np.isfinite(coarse[best_idx][0]):
        raise FitError("no feasible (gamma_c, nu): too few points above gamma_c")
    gc_lo = grid[max(0, best_idx - 1)]
    gc_hi = min(grid[min(len(grid) - 1, best_idx + 1)], hi)
    refine = minimize_scalar(lambda gc: nu_profile(gc)[0],
                             bounds=(gc_lo, gc_hi), method="bounded",
                             options={"xatol": 1e-5})
    gamma_c = float(refine.x)
    residual, nu = nu_profile(gamma_c)
    flags = []
    span = nu_range[1] - nu_range[0]
    if min(nu - nu_range[0], nu_range[1] - nu) < 1e-3 * span:
        flags.append("nu_at_boundary")
    return ScalingFitResult(gamma_c=gamma_c, nu=nu, residual=residual,
                            method="bkt", flags=flags)


def loess_residual(x: np.ndarray, y: np.ndarray, w: np.ndarray,
                   span: float = 0.05) -> float:
    """Leave-one-out local-linear master curve with k-nearest-neighbor
    (tricube) windows, normalized by the weighted variance of y.

    Scale-free in x, which matters for transforms like (gamma-gamma_p) *
    L^(1/nu) whose spread varies by orders of magnitude over the parameter
    search; a fixed kernel bandwidth cannot track that.
    """
    n = len(x)
    if n < 6:
        return np.inf
    k = max(4, int(np.ceil(span * n)))
    sq = 0.0
    wsum = 0.0
    for i in range(n):
        dx = np.abs(x - x[i])
        dx[i] = np.inf
        order = np.argsort(dx, kind="stable")[:k]
        width = dx[order[-1]]
        if width <= 0 or not np.isfinite(width):
            continue
        tri = (1.0 - np.minimum(dx[order] / width, 1.0) ** 3) ** 3
        tri = np.maximum(tri, 1e-6)
        kk = w[order] * tri
        d = x[order] - x[i]
        s0, s1, s2 = kk.sum(), (kk * d).sum(), (kk * d * d).sum()
        t0, t1 = (kk * y[order]).sum(), (kk * d * y[order]).sum()
        denom = s0 * s2 - s1 * s1
        yhat = (s2 * t0 - s1 * t1) / denom if denom > 1e-300 else t0 / s0
        sq += w[i] * (y[i] - yhat) ** 2
        wsum += w[i]
    if wsum <= 0:
        return np.inf
    mean = (w * y).sum() / w.sum()
    var = (w * (y - mean) ** 2).sum() / w.sum()
    if var <= 0:
        return sq / wsum
    return sq / wsum / var


def _power_points(fam: CurveFamily, gamma_p: float, beta: float,
                  nu: float) -> tuple:
    xs, ys, ws = [], [], []
    for c in fam.curves:
        scale = np.full(len(c.gammas), float(c.L) ** beta)
        x = (c.gammas - gamma_p) * float(c.L) ** (1.0 / nu)
        xs.append(x)
        ys.append(scale * c.values)
        ws.append(_point_weights(c.stderr, scale))
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)


def power_law_collapse_fit(fam: CurveFamily, gamma_p_range: tuple = None,
                           beta_range: tuple = (0.0, 4.0),
                           nu_range: tuple = (0.5, 4.0),
                           span: float = 0.05,
                           grid_size: int = 9,
                           refinements: int = 4) -> ScalingFitResult:
    """Fit (gamma_p, beta, nu) of I = L^(-beta) f((gamma-gamma_p) L^(1/nu)).

    Uses the nearest-neighbor (scale-free) master-curve residual because the
    abscissa spread varies wildly with (nu, gamma_p); the search is a
    deterministic zooming grid.
    """
    if len(fam.curves) < 3:
        raise FitError("power-law collapse needs at least 3 sizes")
    if gamma_p_range is None:
        gamma_p_range = (min(c.gammas.min() for c in fam.curves),
                         max(c.gammas.max() for c in fam.curves))

    def objective(params):
        pts = _power_points(fam, *params)
        if pts is None:
            return np.inf
        return loess_residual(*pts, span)

    ranges = [gamma_p_range, beta_range, nu_range]
    best = None
    for _ in range(refinements):
        axes = [np.linspace(lo, hi, grid_size) for lo, hi in ranges]
        vals = np.empty([grid_size] * 3)
        for i, gp in enumerate(axes[0]):
            for j, be in enumerate(axes[1]):
                for k, nu in enumerate(axes[2]):
                    vals[i, j, k] = objective((gp, be, nu))
        flat = int(vals.argmin())
        if not np.isfinite(vals.flat[flat]):
            raise FitError("no feasible (gamma_p, beta, nu) in search ranges")
        idx = np.unravel_index(flat, vals.shape)
        best = tuple(axes[a][idx[a]] for a in range(3))
        new_ranges = []
        for a in range(3):
            step = axes[a][1] - axes[a][0]
            new_ranges.append((max(ranges[a][0], best[a] - step),
                               min(ranges[a][1], best[a] + step)))
        ranges = new_ranges
    gamma_p, beta, nu = best
    residual = objective(best)
    flags = []
    if min(beta - beta_range[0], beta_range[1] - beta) < 1e-9:
        flags.append("beta_at_boundary")
    if min(nu - nu_range[0], nu_range[1] - nu) < 1e-9:
        flags.append("nu_at_boundary")
    return ScalingFitResult(gamma_c=float(gamma_p), nu=float(nu),
                            residual=float(residual), method="power_law",
                            extra={"beta": float(beta)}, flags=flags)


@dataclass
class PowerLawFit:
    a: float
    mu: float
    b: float
    residual: float
    stderr: tuple = (np.nan, np.nan, np.nan)
    degenerate: bool = False


@dataclass
class LogFit:
    p: float
    q: float
    residual: float


def power_law_fit(sizes, values, maxfev: int = 20000) -> PowerLawFit:
    """Nonlinear least squares of a*L^mu + b, seeded by a log-log fit of the
    consecutive differences (which cancel b exactly)."""
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(sizes) < 4:
        raise FitError("power-law fit needs at least 4 sizes")
    if np.ptp(values) <= 1e-12 * max(1.0, np.abs(values).max()):
        return PowerLawFit(a=0.0, mu=0.0, b=float(values.mean()),
                           residual=float(np.var(values)), degenerate=True)
    diffs = np.diff(values)
    sign = 1.0 if diffs.sum() >= 0 else -1.0
    good = np.abs(diffs) > 0
    mu0 = 1.0
    if good.sum() >= 2:
        mu0 = np.polyfit(np.log(sizes[:-1][good]),
                         np.log(np.abs(diffs[good])), 1)[0]
    denom = sizes[-1] ** mu0 - sizes[0] ** mu0
    a0 = sign * max(np.abs(values[-1] - values[0]) / max(abs(denom), 1e-12),
                    1e-12)
    b0 = values[0] - a0 * sizes[0] ** mu0

    def f(L, a, mu, b):
        return a * L ** mu + b

    try:
        with warnings.catch_warnings():
            # near-log data makes (a, b) ill-conditioned; the fit itself is fine
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, pcov = curve_fit(f, sizes, values, p0=(a0, mu0, b0),
                                   maxfev=maxfev)
    except RuntimeError as exc:
        raise FitError(f"power-law fit did not converge: {exc}") from exc
    resid = values - f(sizes, *popt)
    stderr = tuple(np.sqrt(np.abs(np.diag(pcov))))
    return PowerLawFit(a=float(popt[0]), mu=float(popt[1]), b=float(popt[2]),
                       residual=float(np.mean(resid ** 2)), stderr=stderr)


def pure_power_fit(sizes, values, maxfev: int = 20000) -> PowerLawFit:
    """Two-parameter a*L^mu fit (no offset), the complexity-matched rival of
    log_fit for model selection.

    The offset form a*L^mu + b contains the log law as its mu -> 0 limit, so
    its least-squares residual can never lose to log_fit; classification
    between a genuine power law and logarithmic growth therefore compares
    this offset-free family against p*log L + q instead.
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(sizes) < 3:
        raise FitError("pure power fit needs at least 3 sizes")
    if np.any(values <= 0):
        raise FitError("pure power fit needs positive values")
    mu0, loga0 = np.polyfit(np.log(sizes), np.log(values), 1)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, pcov = curve_fit(lambda L, a, mu: a * L ** mu, sizes,
                                   values, p0=(np.exp(loga0), mu0),
                                   maxfev=maxfev)
    except RuntimeError as exc:
        raise FitError(f"pure power fit did not converge: {exc}") from exc
    resid = values - popt[0] * sizes ** popt[1]
    stderr = np.sqrt(np.abs(np.diag(pcov)))
    return PowerLawFit(a=float(popt[0]), mu=float(popt[1]), b=0.0,
                       residual=float(np.mean(resid ** 2)),
                       stderr=(float(stderr[0]), float(stderr[1]), np.nan))


def log_fit(sizes, values) -> LogFit:
    """Least squares of p*log(L) + q (natural log)."""
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(sizes) < 3:
        raise FitError("log fit needs at least 3 sizes")
    p, q = np.polyfit(np.log(sizes), values, 1)
    resid = values - (p * np.log(sizes) + q)
    return LogFit(p=float(p), q=float(q), residual=float(np.mean(resid ** 2)))
