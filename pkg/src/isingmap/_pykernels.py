"""Pure-Python solver kernels.

Fallback twin of the compiled extension module.  Both implementations
perform the same floating-point operations in the same order on the same
CSR arrays, so for equal inputs they return bit-identical results; the
test suite and the benchmark rely on that.  Keep any change here in
lockstep with the .pyx source.
"""

from __future__ import annotations

import math

COMPILED = False


def _lex_smaller(bits, best_bits, n):
    for j in range(n):
        if bits[j] != best_bits[j]:
            return bits[j] < best_bits[j]
    return False


def exact_search(h, indptr, indices, values, bits, best_bits):
    """Enumerate all 2**n states, stepping one bit flip at a time.

    bits must arrive all-zero.  On return best_bits holds the minimizer
    (the lexicographically smallest one when several states tie) and the
    best energy is returned.
    """
    n = h.shape[0]
    e = 0.0
    best_e = 0.0
    for j in range(n):
        best_bits[j] = 0
    total = 1 << n
    for s in range(1, total):
        i = (s & -s).bit_length() - 1
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


def _init_deltas(h, indptr, indices, values, bits, delta):
    n = h.shape[0]
    for i in range(n):
        acc = h[i]
        for k in range(indptr[i], indptr[i + 1]):
            if bits[indices[k]]:
                acc += values[k]
        delta[i] = -acc if bits[i] else acc


def _apply_flip(indptr, indices, values, bits, delta, i):
    """Flip bit i and keep the one-flip energy deltas consistent."""
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


def tabu_run(h, indptr, indices, values, bits, best_bits, delta, tabu_until,
             e0, max_iter, tenure):
    """Deterministic tabu descent from the given start state.

    Each iteration flips the best non-banned move (ties to the lowest
    index), banning the flipped variable for `tenure` iterations; a banned
    move is still taken when it beats the best energy seen.  Returns
    (best energy, flips performed).
    """
    n = h.shape[0]
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


def anneal_run(h, indptr, indices, values, bits, best_bits, delta,
               e0, uniforms, temps):
    """Metropolis annealing over a fixed geometric temperature ladder.

    One sweep proposes every variable in index order; each proposal
    consumes one pregenerated uniform whether or not it is needed, so the
    random stream position depends only on (sweep, variable).  Returns
    (best energy, accepted flips).
    """
    n = h.shape[0]
    _init_deltas(h, indptr, indices, values, bits, delta)
    for j in range(n):
        best_bits[j] = bits[j]
    e = e0
    best_e = e0
    accepts = 0
    pos = 0
    sweeps = temps.shape[0]
    for sw in range(sweeps):
        t = temps[sw]
        for i in range(n):
            d = delta[i]
            u = uniforms[pos]
            pos += 1
            if d <= 0.0 or u < math.exp(-d / t):
                e += d
                _apply_flip(indptr, indices, values, bits, delta, i)
                accepts += 1
                if e < best_e:
                    best_e = e
                    for j in range(n):
                        best_bits[j] = bits[j]
    return best_e, accepts
