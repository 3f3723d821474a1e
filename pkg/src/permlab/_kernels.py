"""Compiled float kernels: Gray-code permanent, feasibility repair, and the ascent loop.

All kernels release the GIL so search restarts can run on a thread pool.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def gray_permanent(a):
    """Ryser permanent, Gray-code order, centered row sums (Nijenhuis-Wilf).

    Centering halves the subset count to 2^(n-1) and keeps partial sums small,
    which matters for the cancellation-heavy nonnegative case.  The running
    total is Kahan-compensated.
    """
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return a[0, 0]
    x = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += a[i, j]
        x[i] = a[i, n - 1] - 0.5 * s
    p = 1.0
    for i in range(n):
        p *= x[i]
    total = p
    comp = 0.0
    sign = 1.0
    gray = 0
    for k in range(1, 1 << (n - 1)):
        j = 0
        while not (k >> j) & 1:
            j += 1
        gray ^= 1 << j
        if (gray >> j) & 1:
            for i in range(n):
                x[i] += a[i, j]
        else:
            for i in range(n):
                x[i] -= a[i, j]
        sign = -sign
        p = 1.0
        for i in range(n):
            p *= x[i]
        y = sign * p - comp
        t = total + y
        comp = (t - total) - y
        total = t
    if n % 2 == 1:
        return 2.0 * total
    return -2.0 * total


@njit(cache=True, nogil=True)
def per_i_minus(a):
    n = a.shape[0]
    p = -a
    for i in range(n):
        p[i, i] += 1.0
    return gray_permanent(p)


@njit(cache=True, nogil=True)
def _violation(m, s, check_total):
    n = m.shape[0]
    worst = 0.0
    tot = 0.0
    for i in range(n):
        r = 0.0
        c = 0.0
        for j in range(n):
            r += m[i, j]
            c += m[j, i]
            if -m[i, j] > worst:
                worst = -m[i, j]
        tot += r
        if r - 1.0 > worst:
            worst = r - 1.0
        if c - 1.0 > worst:
            worst = c - 1.0
    if check_total and abs(tot - s) > worst:
        worst = abs(tot - s)
    return worst


@njit(cache=True, nogil=True)
def _clamp(m, zero_diag):
    n = m.shape[0]
    for i in range(n):
        for j in range(n):
            if m[i, j] < 0.0 or (zero_diag and i == j):
                m[i, j] = 0.0


@njit(cache=True, nogil=True)
def repair_substochastic(m, s, zero_diag, tol, max_rounds):
    """In place: clamp, cap rows, cap columns, rescale the total to s; repeat.

    Returns (rounds used, feasible).
    """
    n = m.shape[0]
    for rnd in range(1, max_rounds + 1):
        _clamp(m, zero_diag)
        for i in range(n):
            r = 0.0
            for j in range(n):
                r += m[i, j]
            if r > 1.0:
                for j in range(n):
                    m[i, j] /= r
        for j in range(n):
            c = 0.0
            for i in range(n):
                c += m[i, j]
            if c > 1.0:
                for i in range(n):
                    m[i, j] /= c
        tot = 0.0
        for i in range(n):
            for j in range(n):
                tot += m[i, j]
        if tot > 0.0:
            f = s / tot
            for i in range(n):
                for j in range(n):
                    m[i, j] *= f
        elif s > 0.0:
            fill = s / (n * (n - 1) if zero_diag and n > 1 else n * n)
            for i in range(n):
                for j in range(n):
                    if not (zero_diag and i == j):
                        m[i, j] = fill
        if _violation(m, s, True) <= tol:
            return rnd, True
    return max_rounds, False


@njit(cache=True, nogil=True)
def repair_stochastic(m, zero_diag, tol, max_rounds):
    """In place Sinkhorn balancing to row and column sums 1."""
    n = m.shape[0]
    for rnd in range(1, max_rounds + 1):
        _clamp(m, zero_diag)
        for i in range(n):
            r = 0.0
            for j in range(n):
                r += m[i, j]
            if r <= 0.0:
                for j in range(n):
                    if not (zero_diag and i == j):
                        m[i, j] = 1.0 / (n - 1 if zero_diag and n > 1 else n)
            else:
                for j in range(n):
                    m[i, j] /= r
        for j in range(n):
            c = 0.0
            for i in range(n):
                c += m[i, j]
            if c > 0.0:
                for i in range(n):
                    m[i, j] /= c
        worst = 0.0
        for i in range(n):
            r = 0.0
            c = 0.0
            for j in range(n):
                r += m[i, j]
                c += m[j, i]
            worst = max(worst, abs(r - 1.0), abs(c - 1.0))
        if worst <= tol:
            return rnd, True
    return max_rounds, False


@njit(cache=True, nogil=True)
def repair(m, s, stochastic, zero_diag, tol, max_rounds):
    if stochastic:
        return repair_stochastic(m, zero_diag, tol, max_rounds)
    return repair_substochastic(m, s, zero_diag, tol, max_rounds)


@njit(cache=True, nogil=True)
def _pick(m, allowed, positive_only, u):
    """Flat index of the k-th allowed entry (k from uniform u), optionally among positives only."""
    n = m.shape[0]
    if not positive_only:
        return allowed[min(int(u * allowed.shape[0]), allowed.shape[0] - 1)]
    count = 0
    for q in allowed:
        if m[q // n, q % n] > 0.0:
            count += 1
    if count == 0:
        return -1
    k = min(int(u * count), count - 1)
    for q in allowed:
        if m[q // n, q % n] > 0.0:
            if k == 0:
                return q
            k -= 1
    return -1


@njit(cache=True, nogil=True)
def ascend(a, s, stochastic, zero_diag, tol, max_rounds, init_step, decay, u):
    """Strict-ascent walk from ``a``; returns (best matrix, best value, evaluations).

    Row ``t`` of ``u`` drives step ``t``: the source entry (among positive
    entries), the destination entry, the amount, and the move type.  The
    amount is ``step * 10^(-3 u)`` with ``step`` decaying geometrically, capped
    by the source entry.  Plain moves transfer mass between two entries and
    repair; in the stochastic class half the moves are four-entry exchanges
    (i,l),(k,j) -> (i,j),(k,l), which keep every line sum exact.
    """
    n = a.shape[0]
    allowed_list = []
    for i in range(n):
        for j in range(n):
            if not (zero_diag and i == j):
                allowed_list.append(i * n + j)
    allowed = np.array(allowed_list, dtype=np.int64)
    cur = a.copy()
    best = per_i_minus(cur)
    evals = 1
    trial = np.empty_like(cur)
    step = init_step
    for t in range(u.shape[0]):
        scale = step * 10.0 ** (-3.0 * u[t, 2])
        step *= decay
        src = _pick(cur, allowed, True, u[t, 0])
        if src < 0:
            continue
        si = src // n
        sj = src % n
        trial[:, :] = cur
        if stochastic and u[t, 3] < 0.5:
            other = _pick(cur, allowed, True, u[t, 1])
            if other < 0:
                continue
            ki = other // n
            kj = other % n
            if ki == si or kj == sj:
                continue
            if zero_diag and (si == kj or ki == sj):
                continue
            amount = min(cur[si, sj], cur[ki, kj], scale)
            if amount <= 0.0:
                continue
            trial[si, sj] -= amount
            trial[ki, kj] -= amount
            trial[si, kj] += amount
            trial[ki, sj] += amount
        else:
            dst = _pick(cur, allowed, False, u[t, 1])
            if dst == src:
                continue
            amount = min(cur[si, sj], scale)
            if amount <= 0.0:
                continue
            trial[si, sj] -= amount
            trial[dst // n, dst % n] += amount
        _, ok = repair(trial, s, stochastic, zero_diag, tol, max_rounds)
        if not ok:
            continue
        f = per_i_minus(trial)
        evals += 1
        if f > best + tol:
            cur[:, :] = trial
            best = f
    return cur, best, evals
