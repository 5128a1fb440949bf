# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernels.

Twin of _pykernels.py: same floating-point operations in the same order
on the same CSR arrays, so both return bit-identical results for equal
inputs.  Keep any change here in lockstep with the Python source.
"""

from libc.math cimport exp

COMPILED = True


cdef inline bint _lex_smaller(unsigned char[::1] bits,
                              unsigned char[::1] best_bits,
                              Py_ssize_t n) noexcept:
    cdef Py_ssize_t j
    for j in range(n):
        if bits[j] != best_bits[j]:
            return bits[j] < best_bits[j]
    return False


def exact_search(double[::1] h, int[::1] indptr, int[::1] indices,
                 double[::1] values, unsigned char[::1] bits,
                 unsigned char[::1] best_bits):
    """Enumerate all 2**n states, stepping one bit flip at a time.

    bits must arrive all-zero.  On return best_bits holds the minimizer
    (the lexicographically smallest one when several states tie) and the
    best energy is returned.
    """
    cdef Py_ssize_t n = h.shape[0]
    cdef double e = 0.0
    cdef double best_e = 0.0
    cdef double acc
    cdef Py_ssize_t j, k, i
    cdef unsigned long long s, t, total
    for j in range(n):
        best_bits[j] = 0
    total = (<unsigned long long>1) << n
    for s in range(1, total):
        t = s
        i = 0
        while (t & 1) == 0:
            t >>= 1
            i += 1
        acc = h[i]
        for k in range(indptr[i], indptr[i + 1]):
            if bits[indices[k]]:
                acc += values[k]
        if bits[i]:
            bits[i] = 0
            e -= acc
        else:
            bits[i] = 1
            e += acc
        if e < best_e:
            best_e = e
            for j in range(n):
                best_bits[j] = bits[j]
        elif e == best_e and _lex_smaller(bits, best_bits, n):
            for j in range(n):
                best_bits[j] = bits[j]
    return best_e


cdef void _init_deltas(double[::1] h, int[::1] indptr, int[::1] indices,
                       double[::1] values, unsigned char[::1] bits,
                       double[::1] delta) noexcept:
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = h[i]
        for k in range(indptr[i], indptr[i + 1]):
            if bits[indices[k]]:
                acc += values[k]
        delta[i] = -acc if bits[i] else acc


cdef void _apply_flip(int[::1] indptr, int[::1] indices, double[::1] values,
                      unsigned char[::1] bits, double[::1] delta,
                      Py_ssize_t i) noexcept:
    """Flip bit i and keep the one-flip energy deltas consistent."""
    cdef double sgn, contrib
    cdef Py_ssize_t k, j
    if bits[i]:
        bits[i] = 0
        sgn = -1.0
    else:
        bits[i] = 1
        sgn = 1.0
    delta[i] = -delta[i]
    for k in range(indptr[i], indptr[i + 1]):
        j = indices[k]
        contrib = values[k] * sgn
        if bits[j]:
            delta[j] -= contrib
        else:
            delta[j] += contrib


def tabu_run(double[::1] h, int[::1] indptr, int[::1] indices,
             double[::1] values, unsigned char[::1] bits,
             unsigned char[::1] best_bits, double[::1] delta,
             long long[::1] tabu_until, double e0, long long max_iter,
             long long tenure):
    """Deterministic tabu descent from the given start state.

    Each iteration flips the best non-banned move (ties to the lowest
    index), banning the flipped variable for `tenure` iterations; a banned
    move is still taken when it beats the best energy seen.  Returns
    (best energy, flips performed).
    """
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t j, i, chosen
    cdef long long it, flips
    cdef double e, best_e, d, chosen_d
    _init_deltas(h, indptr, indices, values, bits, delta)
    for j in range(n):
        best_bits[j] = bits[j]
        tabu_until[j] = 0
    e = e0
    best_e = e0
    flips = 0
    for it in range(1, max_iter + 1):
        chosen = -1
        chosen_d = 0.0
        for i in range(n):
            d = delta[i]
            if tabu_until[i] >= it and not (e + d < best_e):
                continue
            if chosen < 0 or d < chosen_d:
                chosen = i
                chosen_d = d
        if chosen < 0:
            for i in range(n):
                d = delta[i]
                if chosen < 0 or d < chosen_d:
                    chosen = i
                    chosen_d = d
        e += chosen_d
        _apply_flip(indptr, indices, values, bits, delta, chosen)
        tabu_until[chosen] = it + tenure
        flips += 1
        if e < best_e:
            best_e = e
            for j in range(n):
                best_bits[j] = bits[j]
    return best_e, flips


def anneal_run(double[::1] h, int[::1] indptr, int[::1] indices,
               double[::1] values, unsigned char[::1] bits,
               unsigned char[::1] best_bits, double[::1] delta,
               double e0, double[::1] uniforms, double[::1] temps):
    """Metropolis annealing over a fixed geometric temperature ladder.

    One sweep proposes every variable in index order; each proposal
    consumes one pregenerated uniform whether or not it is needed, so the
    random stream position depends only on (sweep, variable).  Returns
    (best energy, accepted flips).
    """
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t j, i, sw, pos
    cdef Py_ssize_t sweeps = temps.shape[0]
    cdef long long accepts = 0
    cdef double e, best_e, d, u, t
    _init_deltas(h, indptr, indices, values, bits, delta)
    for j in range(n):
        best_bits[j] = bits[j]
    e = e0
    best_e = e0
    pos = 0
    for sw in range(sweeps):
        t = temps[sw]
        for i in range(n):
            d = delta[i]
            u = uniforms[pos]
            pos += 1
            if d <= 0.0 or u < exp(-d / t):
                e += d
                _apply_flip(indptr, indices, values, bits, delta, i)
                accepts += 1
                if e < best_e:
                    best_e = e
                    for j in range(n):
                        best_bits[j] = bits[j]
    return best_e, accepts
