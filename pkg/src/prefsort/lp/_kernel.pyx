# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_kernel_py``: the same two-phase bounded simplex,
same pivot rules, same tolerances, compiled without fp-contraction so both
kernels produce bit-identical results.  Keep in sync with ``_kernel_py.py``."""

import numpy as np

from libc.math cimport INFINITY

cdef double TOL_COST = 1e-9
cdef double TOL_PIVOT = 1e-10
cdef double TOL_FEAS = 1e-9
cdef double RELAX = 1e-12
cdef long long STALL_LIMIT = 50
cdef long long REFRESH_EVERY = 64

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_STALLED = 3
STATUS_NEEDS_EXACT = 4

cdef double PERTURBATION = 1e-11


cdef bint _refactor(
    double[:, ::1] A0, double[::1] b0, long long[::1] basis,
    double[:, ::1] T, double[::1] r0, double[:, ::1] aug,
    Py_ssize_t m, Py_ssize_t ncols,
) noexcept nogil:
    """Rebuild the tableau as B^-1 [A0 | b0]; Gauss-Jordan, partial pivoting."""
    cdef Py_ssize_t i, k, col, piv_row, width
    cdef double piv_val, v, tmp, inv, f
    width = m + ncols + 1
    for i in range(m):
        for k in range(m):
            aug[i, k] = A0[i, basis[k]]
        for k in range(ncols):
            aug[i, m + k] = A0[i, k]
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
            for col in range(width):
                tmp = aug[k, col]
                aug[k, col] = aug[piv_row, col]
                aug[piv_row, col] = tmp
        inv = 1.0 / aug[k, k]
        for col in range(width):
            aug[k, col] = aug[k, col] * inv
        for i in range(m):
            if i == k:
                continue
            f = aug[i, k]
            if f != 0.0:
                for col in range(width):
                    aug[i, col] = aug[i, col] - f * aug[k, col]
    for i in range(m):
        for k in range(ncols):
            T[i, k] = aug[i, m + k]
        r0[i] = aug[i, m + ncols]
    return True


cdef inline bint _resync(
    double[:, ::1] A0, double[::1] b0,
    double[:, ::1] T, double[::1] r0, double[::1] d1, double[::1] d2,
    double[::1] cost1, double[::1] cost2, long long[::1] basis,
    unsigned char[::1] at_upper, double[::1] ub, double[::1] xb,
    double[:, ::1] aug, Py_ssize_t m, Py_ssize_t ncols,
) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double cb, w
    if m > 0:
        if not _refactor(A0, b0, basis, T, r0, aug, m, ncols):
            return False
    for j in range(ncols):
        d1[j] = cost1[j]
        d2[j] = cost2[j]
    for i in range(m):
        cb = cost1[basis[i]]
        if cb != 0.0:
            for k in range(ncols):
                d1[k] = d1[k] - cb * T[i, k]
        cb = cost2[basis[i]]
        if cb != 0.0:
            for k in range(ncols):
                d2[k] = d2[k] - cb * T[i, k]
    for i in range(m):
        xb[i] = r0[i]
    for j in range(ncols):
        if at_upper[j] and ub[j] != 0.0:
            w = ub[j]
            for i in range(m):
                xb[i] = xb[i] - T[i, j] * w
    return True


def solve_standard(A_in, b_in, c_in, upper_in, max_iter_in,
                   perturb_in=None):
    """Mirror of ``_kernel_py.solve_standard`` (see there for the contract)."""
    cdef double perturb = PERTURBATION if perturb_in is None else perturb_in
    A_arr = np.ascontiguousarray(A_in, dtype=np.float64)
    b_arr = np.ascontiguousarray(np.asarray(b_in, dtype=np.float64))
    c_arr = np.ascontiguousarray(np.asarray(c_in, dtype=np.float64))
    upper_arr = np.ascontiguousarray(np.asarray(upper_in, dtype=np.float64))

    cdef Py_ssize_t m = A_arr.shape[0]
    cdef Py_ssize_t n = A_arr.shape[1]
    cdef Py_ssize_t ncols = n + m
    cdef long long max_iter = max_iter_in

    T_arr = np.zeros((m, ncols))
    r0_arr = np.zeros(m)
    b_true_arr = np.zeros(m)
    xb_arr = np.zeros(m)
    ub_arr = np.empty(ncols)
    basis_arr = np.empty(m, dtype=np.int64)
    art_row_arr = np.zeros(m, dtype=np.uint8)
    singleton_arr = np.full(n, -1, dtype=np.int64)
    in_basis_arr = np.zeros(ncols, dtype=np.uint8)
    at_upper_arr = np.zeros(ncols, dtype=np.uint8)
    cost1_arr = np.zeros(ncols)
    cost2_arr = np.zeros(ncols)
    d1_arr = np.zeros(ncols)
    d2_arr = np.zeros(ncols)
    y_arr = np.zeros(n)
    A0_arr = np.zeros((m, ncols))
    b0_arr = np.zeros(m)
    aug_arr = np.zeros((m, m + ncols + 1))

    cdef double[:, ::1] A = A_arr
    cdef double[::1] b = b_arr
    cdef double[::1] c = c_arr
    cdef double[::1] upper = upper_arr
    cdef double[:, ::1] T = T_arr
    cdef double[::1] r0 = r0_arr
    cdef double[::1] b_true = b_true_arr
    cdef double[::1] xb = xb_arr
    cdef double[::1] ub = ub_arr
    cdef long long[::1] basis = basis_arr
    cdef unsigned char[::1] is_artificial_row = art_row_arr
    cdef long long[::1] singleton_row = singleton_arr
    cdef unsigned char[::1] in_basis = in_basis_arr
    cdef unsigned char[::1] at_upper = at_upper_arr
    cdef double[::1] cost1 = cost1_arr
    cdef double[::1] cost2 = cost2_arr
    cdef double[::1] d1 = d1_arr
    cdef double[::1] d2 = d2_arr
    cdef double[::1] y = y_arr
    cdef double[:, ::1] A0 = A0_arr
    cdef double[::1] b0 = b0_arr
    cdef double[:, ::1] aug = aug_arr
    cdef double[::1] d

    cdef Py_ssize_t i, j, k, nz_row, count, n_art, phase, r, best_r, best_j
    cdef Py_ssize_t leave, j_enter
    cdef long long iters = 0
    cdef int direction, best_dir
    cdef bint bland, retried_after_resync, flip, hits_upper, best_hits_upper, take
    cdef long long stall, since_resync
    cdef double dj, best_score, theta, a, numer, lim, u_i, ratio, aa
    cdef double best_a, best_ratio, delta, step, piv, inv, f, w, cb, resid
    cdef double y_enter, v, row_r0, bi

    with nogil:
        for i in range(m):
            bi = b[i] + perturb * (i + 1)
            if bi < 0.0:
                for k in range(n):
                    T[i, k] = -A[i, k]
                r0[i] = -bi
                b_true[i] = -b[i]
            else:
                for k in range(n):
                    T[i, k] = A[i, k]
                r0[i] = bi
                b_true[i] = b[i]

        for j in range(n):
            ub[j] = upper[j]
        for j in range(n, ncols):
            ub[j] = INFINITY

        for i in range(m):
            basis[i] = n + i
            is_artificial_row[i] = 1
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
                    and ub[j] == INFINITY and c[j] == 0.0:
                basis[i] = j
                is_artificial_row[i] = 0
        n_art = 0
        for i in range(m):
            if is_artificial_row[i]:
                T[i, n + i] = 1.0
                n_art += 1
            xb[i] = r0[i]

        for i in range(m):
            in_basis[basis[i]] = 1

        for i in range(m):
            if is_artificial_row[i]:
                cost1[n + i] = 1.0
        for j in range(n):
            cost2[j] = c[j]

        for i in range(m):
            for k in range(ncols):
                A0[i, k] = T[i, k]
            b0[i] = r0[i]

        _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis, at_upper, ub, xb,
                aug, m, ncols)

        for phase in range(1, 3):
            if phase == 1 and n_art == 0:
                continue
            if phase == 2 and n_art > 0:
                if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis,
                               at_upper, ub, xb, aug, m, ncols):
                    with gil:
                        return STATUS_STALLED, y_arr, iters
                resid = 0.0
                for i in range(m):
                    if basis[i] >= n:
                        resid += xb[i]
                if resid > TOL_FEAS:
                    with gil:
                        return STATUS_INFEASIBLE, y_arr, iters
                for j in range(n, ncols):
                    ub[j] = 0.0
            if phase == 1:
                d = d1
            else:
                d = d2
            bland = False
            stall = 0
            since_resync = 0
            retried_after_resync = False
            while True:
                iters += 1
                if iters > max_iter:
                    with gil:
                        return STATUS_STALLED, y_arr, iters
                if since_resync >= REFRESH_EVERY:
                    if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2, basis,
                                   at_upper, ub, xb, aug, m, ncols):
                        with gil:
                            return STATUS_STALLED, y_arr, iters
                    since_resync = 0

                # entering: most negative reduced cost, Bland when stalled
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
                                best_j = j
                                best_dir = -1
                                break
                            if dj > best_score:
                                best_score = dj
                                best_j = j
                                best_dir = -1
                    else:
                        if dj < -TOL_COST:
                            if bland:
                                best_j = j
                                best_dir = 1
                                break
                            if -dj > best_score:
                                best_score = -dj
                                best_j = j
                                best_dir = 1
                j_enter = best_j
                direction = best_dir
                if j_enter < 0:
                    if not retried_after_resync:
                        if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2,
                                       basis, at_upper, ub, xb, aug, m, ncols):
                            with gil:
                                return STATUS_STALLED, y_arr, iters
                        since_resync = 0
                        retried_after_resync = True
                        continue
                    break
                j = j_enter

                # pass 1: smallest blocking ratio, each relaxed by RELAX
                theta = ub[j]
                for i in range(m):
                    a = direction * T[i, j]
                    if a > TOL_PIVOT:
                        numer = xb[i]
                        if numer < 0.0:
                            numer = 0.0
                        lim = (numer + RELAX) / a
                    elif a < -TOL_PIVOT:
                        u_i = ub[basis[i]]
                        if u_i == INFINITY:
                            continue
                        numer = u_i - xb[i]
                        if numer < 0.0:
                            numer = 0.0
                        lim = (numer + RELAX) / (-a)
                    else:
                        continue
                    if lim < theta:
                        theta = lim
                if theta == INFINITY:
                    if not retried_after_resync:
                        if not _resync(A0, b0, T, r0, d1, d2, cost1, cost2,
                                       basis, at_upper, ub, xb, aug, m, ncols):
                            with gil:
                                return STATUS_STALLED, y_arr, iters
                        since_resync = 0
                        retried_after_resync = True
                        continue
                    dj = d[j] if d[j] >= 0.0 else -d[j]
                    if phase == 2 and dj > 1e-6:
                        with gil:
                            return STATUS_UNBOUNDED, y_arr, iters
                    # noise-scale phantom ray: neutralize and move on
                    d[j] = 0.0
                    continue
                retried_after_resync = False

                # pass 2: Dantzig mode takes the largest pivot in the band;
                # Bland mode is the exact textbook rule (min ratio, smallest
                # basic index), sticky until the phase ends
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
                        if u_i == INFINITY:
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

                flip = ub[j] != INFINITY and (best_r < 0 or ub[j] < best_ratio)
                if flip:
                    delta = ub[j]
                else:
                    delta = best_ratio
                step = direction * delta
                if delta > 1e-12:
                    stall = 0
                else:
                    stall += 1
                    if stall > STALL_LIMIT:
                        bland = True

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
                in_basis[leave] = 0
                at_upper[leave] = best_hits_upper
                if at_upper[j]:
                    y_enter = ub[j] + step
                else:
                    y_enter = step
                if step != 0.0:
                    for i in range(m):
                        if i != r:
                            xb[i] = xb[i] - T[i, j] * step
                xb[r] = y_enter

                inv = 1.0 / piv
                for k in range(ncols):
                    T[r, k] = T[r, k] * inv
                r0[r] = r0[r] * inv
                row_r0 = r0[r]
                for i in range(m):
                    if i == r:
                        continue
                    f = T[i, j]
                    if f != 0.0:
                        for k in range(ncols):
                            T[i, k] = T[i, k] - f * T[r, k]
                        r0[i] = r0[i] - f * row_r0
                f = d1[j]
                if f != 0.0:
                    for k in range(ncols):
                        d1[k] = d1[k] - f * T[r, k]
                f = d2[j]
                if f != 0.0:
                    for k in range(ncols):
                        d2[k] = d2[k] - f * T[r, k]
                basis[r] = j
                in_basis[j] = 1
                at_upper[j] = 0
                since_resync += 1

        if m > 0 and perturb != 0.0:
            if not _refactor(A0, b_true, basis, T, r0, aug, m, ncols):
                with gil:
                    return STATUS_STALLED, y_arr, iters
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
                if v < -1e-10 or (u_i != INFINITY and v > u_i + 1e-10):
                    with gil:
                        return STATUS_NEEDS_EXACT, y_arr, iters

        for j in range(n):
            if not in_basis[j] and at_upper[j]:
                y[j] = ub[j]
        for i in range(m):
            if basis[i] < n:
                v = xb[i]
                if v < 0.0:
                    v = 0.0
                u_i = ub[basis[i]]
                if u_i != INFINITY and v > u_i:
                    v = u_i
                y[basis[i]] = v

    return STATUS_OPTIMAL, y_arr, iters
