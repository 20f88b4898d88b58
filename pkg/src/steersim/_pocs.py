"""Alternating-projection kernel for local-hidden-state feasibility at fixed radius.

Variables are x = [p_0 .. p_{m-1}, u_0 .. u_{m-1}] with each u_i a 3-vector,
one block per deterministic response function.  Feasibility of the
reconstruction relations at radius R is decided by projecting alternately
onto the affine subspace of the relations and onto the product of
second-order cones {(p, u) : |u| <= R p}.
"""

import numpy as np
from numba import njit

FEASIBLE = 0
INFEASIBLE = 1
UNRESOLVED = 2


@njit(cache=True, nogil=True)
def run(Q, xp, R, x0, m, max_iter, feas_tol, stall_window, stall_floor, rel_improve):
    """Alternate affine and cone projections until converged or stalled.

    Returns (status, y, displacement, iterations) where y is the cone-side
    iterate (exactly cone-feasible, affine violation ~ displacement).
    """
    n = x0.shape[0]
    x = x0.copy()
    y = x0.copy()
    ring = np.zeros(stall_window)
    d = np.inf
    it = 0
    for k in range(max_iter):
        it = k + 1
        xa = xp + Q @ x
        dsq = 0.0
        for i in range(m):
            t0 = xa[i]
            ox, oy, oz = xa[m + 3 * i], xa[m + 3 * i + 1], xa[m + 3 * i + 2]
            s = np.sqrt(ox * ox + oy * oy + oz * oz)
            if s <= R * t0 and t0 >= 0.0:
                t1, ux, uy, uz = t0, ox, oy, oz
            elif R * s <= -t0:
                t1, ux, uy, uz = 0.0, 0.0, 0.0, 0.0
            else:
                t1 = (t0 + R * s) / (1.0 + R * R)
                f = (R * t1) / s if s > 0.0 else 0.0
                ux, uy, uz = f * ox, f * oy, f * oz
            y[i] = t1
            y[m + 3 * i] = ux
            y[m + 3 * i + 1] = uy
            y[m + 3 * i + 2] = uz
            dsq += (t1 - t0) ** 2 + (ux - ox) ** 2 + (uy - oy) ** 2 + (uz - oz) ** 2
        d = np.sqrt(dsq)
        if d < feas_tol:
            return FEASIBLE, y, d, it
        ring[k % stall_window] = d
        if k >= stall_window:
            d_old = ring[(k + 1) % stall_window]
            if d > stall_floor and (d_old - d) < rel_improve * d:
                return INFEASIBLE, y, d, it
        x[:] = y
    if d < 10.0 * feas_tol:
        return FEASIBLE, y, d, it
    return UNRESOLVED, y, d, it
