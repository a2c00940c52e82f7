"""Compiled whole-circuit kernels on split real/imaginary buffers.

Every mixer column applies the same 2x2 to every qubit, so the order in
which qubits are visited is free.  Passes are only ever run on the top
``k`` bit positions, where the paired slices are long and contiguous; the
index is rotated ``k`` bits at a time (a transpose of the
``(2**(n-r), 2**r)`` view) until every qubit has been through the top
block and the rotations add up to ``n``.  Within a block, qubits are taken
two at a time so each pass touches memory once per pair of gates.

The phase operator splits the diagonal into integer ZZ levels (few distinct
values, one cos/sin each) and a product of single-qubit field phases built
by doubling, so no per-amplitude trigonometry is needed.
"""

import numpy as np
from numba import njit

GENERAL, RX, RY = 0, 1, 2
LOW_QUBITS = 5


def low_block(n):
    """Width of the rotated top block (0 = plain passes, for small n)."""
    k = min(LOW_QUBITS, n // 2)
    return k if k >= 3 else 0


# ------------------------------------------------------------ 2x2 updates

@njit(cache=True, fastmath=True, inline="always")
def _gate(kind, u, x0r, x0i, x1r, x1i):
    if kind == RX:
        # [[c, -is], [-is, c]]
        c, s = u[0], u[1]
        return (c * x0r + s * x1i, c * x0i - s * x1r,
                c * x1r + s * x0i, c * x1i - s * x0r)
    if kind == RY:
        # [[c, -s], [s, c]]
        c, s = u[0], u[1]
        return (c * x0r - s * x1r, c * x0i - s * x1i,
                s * x0r + c * x1r, s * x0i + c * x1i)
    ar, ai, br, bi, cr, ci, dr, di = u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7]
    return (ar * x0r - ai * x0i + br * x1r - bi * x1i,
            ar * x0i + ai * x0r + br * x1i + bi * x1r,
            cr * x0r - ci * x0i + dr * x1r - di * x1i,
            cr * x0i + ci * x0r + dr * x1i + di * x1r)


@njit(cache=True, fastmath=True)
def _pairs(kind, u, lr, li, hr, hi):
    for i in range(lr.shape[0]):
        lr[i], li[i], hr[i], hi[i] = _gate(kind, u, lr[i], li[i], hr[i], hi[i])


@njit(cache=True, fastmath=True)
def _quads(kind, u, a0r, a0i, a1r, a1i, a2r, a2i, a3r, a3i):
    # (0,1) and (2,3) differ in the lower qubit, (0,2) and (1,3) in the upper
    for i in range(a0r.shape[0]):
        y0r, y0i, y1r, y1i = _gate(kind, u, a0r[i], a0i[i], a1r[i], a1i[i])
        y2r, y2i, y3r, y3i = _gate(kind, u, a2r[i], a2i[i], a3r[i], a3i[i])
        a0r[i], a0i[i], a2r[i], a2i[i] = _gate(kind, u, y0r, y0i, y2r, y2i)
        a1r[i], a1i[i], a3r[i], a3i[i] = _gate(kind, u, y1r, y1i, y3r, y3i)


@njit(cache=True, fastmath=True)
def _apply_positions(re, im, lo, hi, kind, u):
    """Same gate on bit positions lo..hi-1."""
    n_amps = re.shape[0]
    q = lo
    while q + 1 < hi:
        s = 1 << q
        for b in range(0, n_amps, 4 * s):
            _quads(kind, u,
                   re[b:b + s], im[b:b + s],
                   re[b + s:b + 2 * s], im[b + s:b + 2 * s],
                   re[b + 2 * s:b + 3 * s], im[b + 2 * s:b + 3 * s],
                   re[b + 3 * s:b + 4 * s], im[b + 3 * s:b + 4 * s])
        q += 2
    if q < hi:
        s = 1 << q
        for b in range(0, n_amps, 2 * s):
            _pairs(kind, u, re[b:b + s], im[b:b + s], re[b + s:b + 2 * s], im[b + s:b + 2 * s])


@njit(cache=True, fastmath=True)
def _rotate(src, dst, n, r):
    """dst = src with the index rotated so its low r bits become the top r."""
    rows = 1 << (n - r)
    cols = 1 << r
    s = src.reshape((rows, cols))
    d = dst.reshape((cols, rows))
    tile = 32 if rows >= 32 else rows
    for r0 in range(0, rows, tile):
        for c in range(cols):
            for i in range(r0, r0 + tile):
                d[c, i] = s[i, c]


@njit(cache=True, fastmath=True)
def column(re, im, tre, tim, n, k, kind, u, rotate_back=True):
    """Apply one 2x2 to every qubit.

    Returns True when the result ended up in (tre, tim) instead of (re, im).
    With ``rotate_back=False`` (and k > 0) the last rotation by k is left to
    the caller, whose next permutation absorbs it.
    """
    if k == 0:
        _apply_positions(re, im, 0, n, kind, u)
        return False
    _apply_positions(re, im, n - k, n, kind, u)
    swapped = False
    remaining = n - k
    while remaining > 0:
        r = min(k, remaining)
        if swapped:
            _rotate(tre, re, n, r)
            _rotate(tim, im, n, r)
            _apply_positions(re, im, n - r, n, kind, u)
        else:
            _rotate(re, tre, n, r)
            _rotate(im, tim, n, r)
            _apply_positions(tre, tim, n - r, n, kind, u)
        swapped = not swapped
        remaining -= r
    if not rotate_back:
        return swapped
    if swapped:
        _rotate(tre, re, n, k)
        _rotate(tim, im, n, k)
    else:
        _rotate(re, tre, n, k)
        _rotate(im, tim, n, k)
    return not swapped


# ------------------------------------------------------------ diagonal, etc.

@njit(cache=True, fastmath=True)
def diag_phase(re, im, fr, fi, gamma, levels, level_index, fields):
    """Multiply by exp(-i*gamma*(zz(x) + sum_j h_j z_j(x))).

    ``levels[level_index[x]]`` is the ZZ part; ``fr``/``fi`` are scratch.
    """
    cos_l = np.cos(gamma * levels)
    sin_l = np.sin(gamma * levels)
    n_fields = fields.shape[0]
    if n_fields == 0:
        for x in range(re.shape[0]):
            c = cos_l[level_index[x]]
            s = sin_l[level_index[x]]
            r = re[x]
            m = im[x]
            re[x] = r * c + m * s
            im[x] = m * c - r * s
        return
    # exp(-i*gamma*h*z): z = +1 on bit 0, -1 on bit 1; built by doubling
    fr[0] = 1.0
    fi[0] = 0.0
    for j in range(n_fields):
        c = np.cos(gamma * fields[j])
        s = np.sin(gamma * fields[j])
        half = 1 << j
        for x in range(half):
            a = fr[x]
            b = fi[x]
            fr[x + half] = a * c - b * s
            fi[x + half] = b * c + a * s
            fr[x] = a * c + b * s
            fi[x] = b * c - a * s
    for x in range(re.shape[0]):
        c0 = cos_l[level_index[x]]
        s0 = sin_l[level_index[x]]
        # (c0 - i s0) * (fr + i fi)
        pr = c0 * fr[x] + s0 * fi[x]
        pi = c0 * fi[x] - s0 * fr[x]
        r = re[x]
        m = im[x]
        re[x] = r * pr - m * pi
        im[x] = r * pi + m * pr


def gather_index(dest, n, k):
    """Source index of every output amplitude for the CNOT permutation.

    For k > 0 the pending rotation by k left over from the RX column is
    composed in: amplitude i of the unrotated buffer belongs at rot(i).
    """
    size = 1 << n
    i = np.arange(size, dtype=np.int64)
    rot = ((i & ((1 << k) - 1)) << (n - k)) | (i >> k) if k else i
    src = np.empty(size, dtype=np.int64)
    src[dest[rot]] = i
    return src


@njit(cache=True, fastmath=True)
def gather(src_r, src_i, dst_r, dst_i, src_index):
    for y in range(dst_r.shape[0]):
        dst_r[y] = src_r[src_index[y]]
        dst_i[y] = src_i[src_index[y]]


@njit(cache=True, fastmath=True)
def expectation(re, im, table):
    total = 0.0
    for x in range(re.shape[0]):
        total += (re[x] * re[x] + im[x] * im[x]) * table[x]
    return total


@njit(cache=True, fastmath=True)
def evolve(re, im, tre, tim, n, k, levels, level_index, fields, src_index, params, entangled):
    """Plus state, then (phase, mixer) per layer; params are [g, b1, b2]*p.

    The final state is left in (re, im); (tre, tim) are scratch.
    """
    a_r, a_i, b_r, b_i = re, im, tre, tim
    flipped = False
    a_r[:] = 2.0 ** (-0.5 * n)
    a_i[:] = 0.0
    u = np.empty(8)
    for layer in range(params.shape[0] // 3):
        gamma = params[3 * layer]
        c1, s1 = np.cos(params[3 * layer + 1]), np.sin(params[3 * layer + 1])
        c2, s2 = np.cos(params[3 * layer + 2]), np.sin(params[3 * layer + 2])
        diag_phase(a_r, a_i, b_r, b_i, gamma, levels, level_index, fields)
        if entangled:
            u[0] = c1
            u[1] = s1
            if column(a_r, a_i, b_r, b_i, n, k, RX, u, False):
                a_r, a_i, b_r, b_i = b_r, b_i, a_r, a_i
                flipped = not flipped
            gather(a_r, a_i, b_r, b_i, src_index)
            a_r, a_i, b_r, b_i = b_r, b_i, a_r, a_i
            flipped = not flipped
            u[0] = c2
            u[1] = s2
            if column(a_r, a_i, b_r, b_i, n, k, RY, u):
                a_r, a_i, b_r, b_i = b_r, b_i, a_r, a_i
                flipped = not flipped
        else:
            # RY(b2) @ RX(b1) as a single 2x2
            u[0] = c2 * c1
            u[1] = s2 * s1
            u[2] = -s2 * c1
            u[3] = -c2 * s1
            u[4] = s2 * c1
            u[5] = -c2 * s1
            u[6] = c2 * c1
            u[7] = -s2 * s1
            if column(a_r, a_i, b_r, b_i, n, k, GENERAL, u):
                a_r, a_i, b_r, b_i = b_r, b_i, a_r, a_i
                flipped = not flipped
    if flipped:
        re[:] = a_r
        im[:] = a_i
