"""Pure-Python two-phase simplex kernel for bounded variables.

Solves  minimize c.y  subject to  A y = b,  0 <= y <= upper  (upper may be
+inf) on a dense tableau.  Rows whose slack column can serve as an initial
basic variable start that way; only the remaining rows get artificials,
which phase 1 drives to zero before phase 2 re-optimizes the true
objective with the artificials pinned.

Numerical discipline, in order of importance:

* two-pass ratio test: the leaving row is the largest-pivot row among
  those whose true ratio lies within a hair (RELAX) of the minimum, which
  keeps degenerate pivots off near-zero elements and the tableau well
  conditioned;
* the reduced-cost rows and the basic values are recomputed from the
  maintained tableau on a fixed cadence, so incremental drift cannot
  accumulate;
* after a degeneracy stall the entering rule falls back to Bland's
  smallest-index rule until the objective moves again.

Determinism: every choice breaks ties by smallest variable index with
exact floating-point comparisons, so repeated solves are bit-identical.

The compiled kernel in ``_kernel.pyx`` is a line-by-line transliteration
of this module; any change here must be mirrored there (a parity test
compares the two on random programs).
"""

from __future__ import annotations

import numpy as np

INF = float("inf")
TOL_COST = 1e-9     # reduced-cost threshold for entering eligibility
TOL_PIVOT = 1e-10   # smallest acceptable pivot magnitude
TOL_FEAS = 1e-9     # phase-1 residual above which the program is infeasible
RELAX = 1e-12       # ratio-test band half-width (Harris-style grouping)
STALL_LIMIT = 50    # degenerate pivots before engaging Bland's rule for the phase
REFRESH_EVERY = 64  # pivots between exact recomputations

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_STALLED = 3
STATUS_NEEDS_EXACT = 4  # internal: perturbed basis not valid for the true rhs

# Charnes-style anti-degeneracy: each row's working rhs is nudged by a
# distinct tiny amount, breaking the massive ratio-test ties these models
# produce (many rows share rhs 0).  The basis is re-anchored to the true
# rhs before extraction, so the shift never reaches the caller.
PERTURBATION = 1e-11


def _pick_entering(d, at_upper, in_basis, ub, ncols, bland):
    """Index and direction of the entering variable, or (-1, 0) at optimum."""
    best_j = -1
    best_dir = 0
    best_score = TOL_COST
    for j in range(ncols):
        if in_basis[j] or ub[j] == 0.0:
            continue
        dj = d[j]
        if at_upper[j]:
            if dj > TOL_COST:
                if bland:
                    return j, -1
                if dj > best_score:
                    best_score = dj
                    best_j = j
                    best_dir = -1
        else:
            if dj < -TOL_COST:
                if bland:
                    return j, 1
                if -dj > best_score:
                    best_score = -dj
                    best_j = j
                    best_dir = 1
    return best_j, best_dir


def _refactor(A0, b0, basis, T, r0, m, ncols):
    """Rebuild the tableau as B^-1 [A0 | b0] from the original data.

    Gauss-Jordan with partial pivoting (largest pivot, smallest row index on
    ties); physical row swaps keep the result in basis-position order.
    Returns False on a numerically singular basis.
    """
    aug = np.empty((m, m + ncols + 1))
    for i in range(m):
        for k in range(m):
            aug[i, k] = A0[i, basis[k]]
        aug[i, m : m + ncols] = A0[i]
        aug[i, m + ncols] = b0[i]
    for k in range(m):
        piv_row = k
        piv_val = aug[k, k] if aug[k, k] >= 0.0 else -aug[k, k]
        for i in range(k + 1, m):
            v = aug[i, k] if aug[i, k] >= 0.0 else -aug[i, k]
            if v > piv_val:
                piv_val = v
                piv_row = i
        if piv_val <= 1e-13:
            return False
        if piv_row != k:
            for col in range(m + ncols + 1):
                tmp = aug[k, col]
                aug[k, col] = aug[piv_row, col]
                aug[piv_row, col] = tmp
        inv = 1.0 / aug[k, k]
        aug[k, :] *= inv
        for i in range(m):
            if i == k:
                continue
            f = aug[i, k]
            if f != 0.0:
                aug[i, :] -= f * aug[k]
    for i in range(m):
        T[i, :] = aug[i, m : m + ncols]
        r0[i] = aug[i, m + ncols]
    return True


def _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis, at_upper, ub, xb,
            m, ncols):
    """Refactorize, then recompute reduced costs and basic values."""
    if m > 0 and not _refactor(A0, b0, basis, T, r0, m, ncols):
        return False
    for j in range(ncols):
        d1[j] = cost1[j]
        d2[j] = cost2[j]
    for i in range(m):
        cb = cost1[basis[i]]
        if cb != 0.0:
            d1 -= cb * T[i]
        cb = cost2[basis[i]]
        if cb != 0.0:
            d2 -= cb * T[i]
    for i in range(m):
        xb[i] = r0[i]
    for j in range(ncols):
        if at_upper[j] and ub[j] != 0.0:
            w = ub[j]
            for i in range(m):
                xb[i] = xb[i] - T[i, j] * w
    return True


def solve_standard(A, b, c, upper, max_iter, perturb=PERTURBATION):
    """Run the two-phase bounded simplex.

    Returns ``(status, y, iterations)`` with ``y`` meaningful only when
    ``status == STATUS_OPTIMAL``.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    m, n = A.shape
    ncols = n + m

    T = np.zeros((m, ncols))
    r0 = np.zeros(m)  # basis image of the working (perturbed) rhs
    b_true = np.zeros(m)  # sign-normalized unperturbed rhs
    xb = np.zeros(m)
    for i in range(m):
        bi = b[i] + perturb * (i + 1)
        if bi < 0.0:
            T[i, :n] = -A[i]
            r0[i] = -bi
            b_true[i] = -b[i]
        else:
            T[i, :n] = A[i]
            r0[i] = bi
            b_true[i] = b[i]

    ub = np.empty(ncols)
    ub[:n] = upper
    ub[n:] = INF  # artificials: basic in phase 1, pinned to 0 afterwards

    # crash basis: a singleton +1 column with bounds [0, inf) and zero cost
    # (a slack, structurally) starts basic; other rows get artificials
    basis = np.empty(m, dtype=np.int64)
    is_artificial_row = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        basis[i] = n + i
        is_artificial_row[i] = True
    singleton_row = np.full(n, -1, dtype=np.int64)
    for j in range(n):
        nz_row = -1
        count = 0
        for i in range(m):
            if T[i, j] != 0.0:
                nz_row = i
                count += 1
                if count > 1:
                    break
        if count == 1:
            singleton_row[j] = nz_row
    for j in range(n - 1, -1, -1):
        i = singleton_row[j]
        if i >= 0 and is_artificial_row[i] and T[i, j] == 1.0 \
                and ub[j] == INF and c[j] == 0.0:
            basis[i] = j
            is_artificial_row[i] = False
    n_art = 0
    for i in range(m):
        if is_artificial_row[i]:
            T[i, n + i] = 1.0
            n_art += 1
        xb[i] = r0[i]

    in_basis = np.zeros(ncols, dtype=np.bool_)
    for i in range(m):
        in_basis[basis[i]] = True
    at_upper = np.zeros(ncols, dtype=np.bool_)

    cost1 = np.zeros(ncols)  # phase-1 cost: 1 on artificial columns
    for i in range(m):
        if is_artificial_row[i]:
            cost1[n + i] = 1.0
    cost2 = np.zeros(ncols)
    cost2[:n] = c

    # pristine copies for refactorization
    A0 = T.copy()
    b0 = r0.copy()

    d1 = np.zeros(ncols)
    d2 = np.zeros(ncols)
    _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis, at_upper, ub, xb,
            m, ncols)

    iters = 0
    for phase in (1, 2):
        if phase == 1 and n_art == 0:
            continue
        if phase == 2 and n_art > 0:
            if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis,
                           at_upper, ub, xb, m, ncols):
                return STATUS_STALLED, np.zeros(n), iters
            resid = 0.0  # exact phase-1 residual
            for i in range(m):
                if basis[i] >= n:
                    resid += xb[i]
            if resid > TOL_FEAS:
                return STATUS_INFEASIBLE, np.zeros(n), iters
            ub[n:] = 0.0  # artificials may stay basic only at value 0
        d = d1 if phase == 1 else d2
        bland = False
        stall = 0
        since_resync = 0
        retried_after_resync = False
        while True:
            iters += 1
            if iters > max_iter:
                return STATUS_STALLED, np.zeros(n), iters
            if since_resync >= REFRESH_EVERY:
                if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis,
                               at_upper, ub, xb, m, ncols):
                    return STATUS_STALLED, np.zeros(n), iters
                since_resync = 0
            j, direction = _pick_entering(d, at_upper, in_basis, ub, ncols, bland)
            if j < 0:
                if not retried_after_resync:
                    # confirm optimality on freshly recomputed reduced costs
                    if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis,
                                   at_upper, ub, xb, m, ncols):
                        return STATUS_STALLED, np.zeros(n), iters
                    since_resync = 0
                    retried_after_resync = True
                    continue
                break

            # pass 1: smallest blocking ratio, each relaxed by RELAX
            theta = ub[j]  # own-range flip; may be inf
            for i in range(m):
                a = direction * T[i, j]
                if a > TOL_PIVOT:
                    numer = xb[i]
                    if numer < 0.0:
                        numer = 0.0
                    lim = (numer + RELAX) / a
                elif a < -TOL_PIVOT:
                    u_i = ub[basis[i]]
                    if u_i == INF:
                        continue
                    numer = u_i - xb[i]
                    if numer < 0.0:
                        numer = 0.0
                    lim = (numer + RELAX) / (-a)
                else:
                    continue
                if lim < theta:
                    theta = lim
            if theta == INF:
                if not retried_after_resync:
                    # rule out drift before trusting an infinite ray
                    if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis,
                                   at_upper, ub, xb, m, ncols):
                        return STATUS_STALLED, np.zeros(n), iters
                    since_resync = 0
                    retried_after_resync = True
                    continue
                dj = d[j] if d[j] >= 0.0 else -d[j]
                if phase == 2 and dj > 1e-6:
                    return STATUS_UNBOUNDED, np.zeros(n), iters
                # a noise-scale reduced cost whose blocking rows all sit
                # below the pivot tolerance is a phantom, not a ray:
                # neutralize the column and move on
                d[j] = 0.0
                continue
            retried_after_resync = False

            # pass 2.  Dantzig mode: the largest pivot within the Harris
            # band wins (numerical stability).  Bland mode: the textbook
            # rule exactly -- minimum true ratio, smallest basic index on
            # ties -- whose anti-cycling guarantee needs no band.
            best_r = -1
            best_a = 0.0
            best_ratio = 0.0
            best_hits_upper = False
            for i in range(m):
                a = direction * T[i, j]
                if a > TOL_PIVOT:
                    numer = xb[i]
                    if numer < 0.0:
                        numer = 0.0
                    ratio = numer / a
                    hits_upper = False
                elif a < -TOL_PIVOT:
                    u_i = ub[basis[i]]
                    if u_i == INF:
                        continue
                    numer = u_i - xb[i]
                    if numer < 0.0:
                        numer = 0.0
                    ratio = numer / (-a)
                    hits_upper = True
                else:
                    continue
                aa = a if a > 0.0 else -a
                if bland:
                    take = (
                        best_r < 0
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[best_r])
                    )
                else:
                    if ratio > theta:
                        continue
                    take = aa > best_a or (
                        aa == best_a
                        and best_r >= 0
                        and basis[i] < basis[best_r]
                    )
                if take:
                    best_r = i
                    best_a = aa
                    best_ratio = ratio
                    best_hits_upper = hits_upper

            flip = ub[j] != INF and (best_r < 0 or ub[j] < best_ratio)
            delta = ub[j] if flip else best_ratio
            step = direction * delta
            if delta > 1e-12:
                stall = 0
            else:
                stall += 1
                if stall > STALL_LIMIT:
                    bland = True  # sticky until the phase ends

            if flip:
                if step != 0.0:
                    for i in range(m):
                        xb[i] = xb[i] - T[i, j] * step
                at_upper[j] = not at_upper[j]
                since_resync += 1
                continue

            r = best_r
            piv = T[r, j]
            leave = basis[r]
            in_basis[leave] = False
            at_upper[leave] = best_hits_upper
            y_enter = (ub[j] if at_upper[j] else 0.0) + step
            if step != 0.0:
                for i in range(m):
                    if i != r:
                        xb[i] = xb[i] - T[i, j] * step
            xb[r] = y_enter

            inv = 1.0 / piv
            T[r, :] *= inv
            r0[r] *= inv
            row = T[r]
            row_r0 = r0[r]
            for i in range(m):
                if i == r:
                    continue
                f = T[i, j]
                if f != 0.0:
                    T[i, :] -= f * row
                    r0[i] -= f * row_r0
            f = d1[j]
            if f != 0.0:
                d1 -= f * row
            f = d2[j]
            if f != 0.0:
                d2 -= f * row
            basis[r] = j
            in_basis[j] = True
            at_upper[j] = False
            since_resync += 1

    # re-anchor the final basis to the true rhs; reduced costs do not
    # depend on it, so optimality carries over whenever the vertex stays
    # within bounds
    if m > 0 and perturb != 0.0:
        if not _refactor(A0, b_true, basis, T, r0, m, ncols):
            return STATUS_STALLED, np.zeros(n), iters
        for i in range(m):
            xb[i] = r0[i]
        for j in range(ncols):
            if at_upper[j] and ub[j] != 0.0:
                w = ub[j]
                for i in range(m):
                    xb[i] = xb[i] - T[i, j] * w
        for i in range(m):
            v = xb[i]
            u_i = ub[basis[i]]
            if v < -1e-10 or (u_i != INF and v > u_i + 1e-10):
                return STATUS_NEEDS_EXACT, np.zeros(n), iters

    y = np.zeros(n)
    for j in range(n):
        if not in_basis[j] and at_upper[j]:
            y[j] = ub[j]
    for i in range(m):
        if basis[i] < n:
            v = xb[i]
            if v < 0.0:
                v = 0.0
            u_i = ub[basis[i]]
            if u_i != INF and v > u_i:
                v = u_i
            y[basis[i]] = v
    return STATUS_OPTIMAL, y, iters
