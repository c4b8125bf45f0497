"""Trace-of-product maps, extremum location, correlations, and the two
one-parameter curve fits used in the correlation study.

The central quantity is Tr(Phi(a)[rho] Phi(b)[rho]) for a pure probe; in
Bloch form it is 1/2 (1 + c(a) c(b) |r|^2) with c(x) = 1 - 4x/3, so the
minimum over a at fixed gap e sits at a = 0.75 - e/2 independent of the
probe.  The study correlates achieved discrimination probabilities
against this map and against the diamond-distance map, per ansatz depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import channels as ch_mod, diamond as dm, vardisc
from .qcore import ContractError, DensityMatrix, ketbra, KET_PLUS


@dataclass
class FitResult:
    parameter: float
    residual_sum: float
    iterations: int


def plus_state() -> DensityMatrix:
    return DensityMatrix(ketbra(KET_PLUS, KET_PLUS), check=False)


def trace_product(rho: DensityMatrix, a: float, b: float) -> float:
    """Tr(Phi(a)[rho] Phi(b)[rho]) for the depolarizing channel."""
    ra = ch_mod.apply(ch_mod.depolarizing(a), rho)
    rb = ch_mod.apply(ch_mod.depolarizing(b), rho)
    return float(np.trace(ra.mat @ rb.mat).real)


def trace_product_extremum(eps: float, grid_step: float = 1e-3) -> float:
    """Location of the minimum of a -> Tr(Phi(a)[rho] Phi(a+eps)[rho]).

    Grid scan plus bounded local refinement; the result does not depend
    on the (pure, non-maximally-mixed) probe choice.
    """
    if not 0.0 <= eps <= 1.0:
        raise ContractError(f"eps={eps} outside [0, 1]")
    rho = plus_state()
    hi = 1.0 - eps
    grid = np.arange(0.0, hi + grid_step / 2, grid_step)
    vals = [trace_product(rho, a, a + eps) for a in grid]
    k = int(np.argmin(vals))
    lo_b = grid[max(k - 1, 0)]
    hi_b = grid[min(k + 1, len(grid) - 1)]
    if hi_b <= lo_b:
        return float(grid[k])
    res = minimize_scalar(lambda a: trace_product(rho, a, a + eps),
                          bounds=(lo_b, hi_b), method="bounded")
    return float(res.x)


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ContractError("pearson needs two equal-length vectors (n >= 2)")
    if np.std(x) == 0 or np.std(y) == 0:
        raise ContractError("pearson undefined for zero variance")
    return float(np.corrcoef(x, y)[0, 1])


def _fit_one_param(model, ls, vs, lo: float, hi: float,
                   n_scan: int = 200) -> FitResult:
    """Least squares on a single parameter: bracket by scanning, then
    golden-section refinement."""
    ls = np.asarray(ls, dtype=float)
    vs = np.asarray(vs, dtype=float)

    def residual(p):
        return float(((model(ls, p) - vs) ** 2).sum())

    ps = np.linspace(lo, hi, n_scan)
    rs = [residual(p) for p in ps]
    k = int(np.argmin(rs))
    if k == 0 or k == n_scan - 1:
        raise ContractError(
            f"no interior bracket for the fit in [{lo}, {hi}]")
    res = minimize_scalar(residual,
                          bracket=(ps[k - 1], ps[k], ps[k + 1]),
                          method="golden", options={"xtol": 1e-12})
    return FitResult(parameter=float(res.x), residual_sum=float(res.fun),
                     iterations=int(res.nit))


def fit_power(ls, vs) -> FitResult:
    """Fit v = l^(-1/a) over a > 0."""
    if np.any(np.asarray(ls) <= 0):
        raise ContractError("fit_power needs positive l values")
    return _fit_one_param(lambda l, a: l ** (-1.0 / a), ls, vs, 0.05, 50.0)


def fit_exp(ls, vs) -> FitResult:
    """Fit v = 1 - exp(-b l) over b > 0."""
    return _fit_one_param(lambda l, b: 1.0 - np.exp(-b * l), ls, vs,
                          1e-4, 20.0)


def grid_maps(alpha_grid, p: int = 2, restarts: int = 10, seed: int = 0):
    """Trace-product and discrimination-bound maps over an alpha grid.

    Returns (trace_map, p_diamond_map); the probe for the trace map is
    the fixed |+><+| state.
    """
    alpha_grid = list(alpha_grid)
    m = len(alpha_grid)
    rho = plus_state()
    tmap = np.zeros((m, m))
    dmap = np.zeros((m, m))
    for i, a0 in enumerate(alpha_grid):
        for j, a1 in enumerate(alpha_grid):
            tmap[i, j] = trace_product(rho, a0, a1)
            if j < i:
                dmap[i, j] = dmap[j, i]
                continue
            if a0 == a1:
                dmap[i, j] = 0.5
                continue
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, j]))
            dmap[i, j] = dm.p_diamond(ch_mod.depolarizing(a0),
                                      ch_mod.depolarizing(a1), p=p,
                                      restarts=restarts, rng=rng)
    return tmap, dmap


DESK_PAIRS = [(0.0, 0.1), (0.2, 0.3), (0.45, 0.55), (0.7, 0.8), (0.9, 1.0)]
DESK_LAYERS = [2, 6, 10, 14]


def correlation_study(pairs=DESK_PAIRS, layers=DESK_LAYERS, runs: int = 5,
                      strategy: str = "parallel", p: int = 2, r: int = 1,
                      seed: int = 0, diamond_restarts: int = 10) -> dict:
    """Per-depth Pearson correlations of achieved success probabilities
    against the trace-product and diamond maps.

    Each (pair, depth) point averages ``runs`` independent single-restart
    trainings.  Desk-scale defaults keep the total register small.
    """
    rho = plus_state()
    tvals = np.array([trace_product(rho, a0, a1) for a0, a1 in pairs])
    dvals = []
    for i, (a0, a1) in enumerate(pairs):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 77, i]))
        dvals.append(dm.p_diamond(ch_mod.depolarizing(a0),
                                  ch_mod.depolarizing(a1), p=p,
                                  restarts=diamond_restarts, rng=rng))
    dvals = np.array(dvals)

    corr_trace, corr_diamond, mean_ps = {}, {}, {}
    for l in layers:
        ps = []
        for i, (a0, a1) in enumerate(pairs):
            vals = []
            for run in range(runs):
                spec = vardisc.StrategySpec(
                    strategy, p=p, r=r, l=l, restarts=1,
                    seed=int(np.random.default_rng(
                        np.random.SeedSequence([seed, l, i, run]))
                        .integers(2 ** 31)))
                rep = vardisc.train(ch_mod.depolarizing(a0),
                                    ch_mod.depolarizing(a1), spec)
                vals.append(rep.best_value)
            ps.append(np.mean(vals))
        ps = np.array(ps)
        mean_ps[l] = ps
        corr_trace[l] = pearson(tvals, ps)
        corr_diamond[l] = pearson(dvals, ps)
    return {"pairs": list(pairs), "layers": list(layers),
            "trace_products": tvals, "p_diamond": dvals,
            "mean_ps": mean_ps, "corr_trace": corr_trace,
            "corr_diamond": corr_diamond}
