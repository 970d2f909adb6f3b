"""Compiled inner loops for applying small operators to flat state vectors.

A state of ``m`` bits is a complex vector of length ``2**m``; bit ``q`` of the
index is qubit ``q``. An operator on ``k`` bits is a dense ``2**k x 2**k``
matrix in the local basis where ``bits[0]`` is the most significant local bit.

Density matrices reuse the same kernels: row-major ``vec(rho)`` keeps the row
index in the high ``n`` bits and the column index in the low ``n`` bits.
"""
import numba
import numpy as np


@numba.njit(nogil=True, cache=True)
def _apply_1(vec, b, m):
    s = 1 << b
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    if m01 == 0 and m10 == 0:
        for hi in range(0, vec.shape[0], 2 * s):
            for i in range(hi, hi + s):
                vec[i] *= m00
                vec[i + s] *= m11
        return
    for hi in range(0, vec.shape[0], 2 * s):
        for i in range(hi, hi + s):
            a0 = vec[i]
            a1 = vec[i + s]
            vec[i] = m00 * a0 + m01 * a1
            vec[i + s] = m10 * a0 + m11 * a1


@numba.njit(nogil=True, cache=True)
def _monomial_2(m):
    # column index and value of the single nonzero in each row, or (-1, ...)
    src = np.full(4, -1, dtype=np.int64)
    val = np.zeros(4, dtype=np.complex128)
    for r in range(4):
        for c in range(4):
            if m[r, c] != 0:
                if src[r] >= 0:
                    src[0] = -1
                    return src, val
                src[r] = c
                val[r] = m[r, c]
    return src, val


@numba.njit(nogil=True, cache=True)
def _apply_2(vec, b0, b1, m):
    s0 = 1 << b0
    s1 = 1 << b1
    slo = 1 << min(b0, b1)
    shi = 1 << max(b0, b1)
    n = vec.shape[0]
    src, val = _monomial_2(m)
    if src[0] >= 0 and src[1] >= 0 and src[2] >= 0 and src[3] >= 0:
        c0, c1, c2, c3 = src[0], src[1], src[2], src[3]
        v0, v1, v2, v3 = val[0], val[1], val[2], val[3]
        a = np.empty(4, dtype=np.complex128)
        for x in range(0, n, 2 * shi):
            for y in range(x, x + shi, 2 * slo):
                for i in range(y, y + slo):
                    a[0] = vec[i]
                    a[1] = vec[i + s1]
                    a[2] = vec[i + s0]
                    a[3] = vec[i + s0 + s1]
                    vec[i] = v0 * a[c0]
                    vec[i + s1] = v1 * a[c1]
                    vec[i + s0] = v2 * a[c2]
                    vec[i + s0 + s1] = v3 * a[c3]
        return
    m00, m01, m02, m03 = m[0, 0], m[0, 1], m[0, 2], m[0, 3]
    m10, m11, m12, m13 = m[1, 0], m[1, 1], m[1, 2], m[1, 3]
    m20, m21, m22, m23 = m[2, 0], m[2, 1], m[2, 2], m[2, 3]
    m30, m31, m32, m33 = m[3, 0], m[3, 1], m[3, 2], m[3, 3]
    if (m01 == 0 and m02 == 0 and m10 == 0 and m13 == 0
            and m20 == 0 and m23 == 0 and m31 == 0 and m32 == 0):
        # {0, 3} and {1, 2} do not mix: single-qubit channel superoperators
        # that keep populations and coherences apart
        for x in range(0, n, 2 * shi):
            for y in range(x, x + shi, 2 * slo):
                for i in range(y, y + slo):
                    a0 = vec[i]
                    a1 = vec[i + s1]
                    a2 = vec[i + s0]
                    a3 = vec[i + s0 + s1]
                    vec[i] = m00 * a0 + m03 * a3
                    vec[i + s1] = m11 * a1 + m12 * a2
                    vec[i + s0] = m21 * a1 + m22 * a2
                    vec[i + s0 + s1] = m30 * a0 + m33 * a3
        return
    for x in range(0, n, 2 * shi):
        for y in range(x, x + shi, 2 * slo):
            for i in range(y, y + slo):
                a0 = vec[i]
                a1 = vec[i + s1]
                a2 = vec[i + s0]
                a3 = vec[i + s0 + s1]
                vec[i] = m00 * a0 + m01 * a1 + m02 * a2 + m03 * a3
                vec[i + s1] = m10 * a0 + m11 * a1 + m12 * a2 + m13 * a3
                vec[i + s0] = m20 * a0 + m21 * a1 + m22 * a2 + m23 * a3
                vec[i + s0 + s1] = m30 * a0 + m31 * a1 + m32 * a2 + m33 * a3


@numba.njit(nogil=True, cache=True)
def _apply_k(vec, bits, m):
    k = bits.shape[0]
    dim = 1 << k
    offsets = np.zeros(dim, dtype=np.int64)
    for loc in range(dim):
        off = 0
        for j in range(k):
            if (loc >> (k - 1 - j)) & 1:
                off |= 1 << bits[j]
        offsets[loc] = off
    sorted_bits = np.sort(bits)
    nnz = 0
    for r in range(dim):
        for c in range(dim):
            if m[r, c] != 0:
                nnz += 1
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.complex128)
    e = 0
    for r in range(dim):
        for c in range(dim):
            if m[r, c] != 0:
                rows[e] = r
                cols[e] = c
                vals[e] = m[r, c]
                e += 1
    buf_in = np.empty(dim, dtype=np.complex128)
    buf_out = np.empty(dim, dtype=np.complex128)
    for g in range(vec.shape[0] >> k):
        base = g
        for j in range(k):
            b = sorted_bits[j]
            base = ((base >> b) << (b + 1)) | (base & ((1 << b) - 1))
        for loc in range(dim):
            buf_in[loc] = vec[base + offsets[loc]]
            buf_out[loc] = 0.0
        for e in range(nnz):
            buf_out[rows[e]] += vals[e] * buf_in[cols[e]]
        for loc in range(dim):
            vec[base + offsets[loc]] = buf_out[loc]


@numba.njit(nogil=True, cache=True)
def apply_matrix(vec, bits, m):
    """In-place ``vec <- M vec`` with ``M`` acting on ``bits``."""
    k = bits.shape[0]
    if k == 1:
        _apply_1(vec, bits[0], m)
    elif k == 2:
        _apply_2(vec, bits[0], bits[1], m)
    else:
        _apply_k(vec, bits, m)


@numba.njit(nogil=True, cache=True)
def run_program(vec, bit_ptr, bits, mat_ptr, data):
    """Apply a sequence of operators in place.

    Operator ``i`` acts on ``bits[bit_ptr[i]:bit_ptr[i+1]]``; its row-major
    matrix starts at ``data[mat_ptr[i]]``.
    """
    for i in range(bit_ptr.shape[0] - 1):
        b = bits[bit_ptr[i]:bit_ptr[i + 1]]
        d = 1 << b.shape[0]
        m = data[mat_ptr[i]:mat_ptr[i] + d * d].reshape((d, d))
        apply_matrix(vec, b, m)
