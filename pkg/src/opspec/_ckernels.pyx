# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exact kernels over the Gaussian integers (see _pykernels)."""


def zi_matmul(list ar, list ai, list br, list bi, Py_ssize_t n, Py_ssize_t m, Py_ssize_t p):
    cdef Py_ssize_t i, j, k, row, out, col
    cdef list cr = [0] * (n * p)
    cdef list ci = [0] * (n * p)
    cdef object xr, xi, yr, yi
    for i in range(n):
        row = i * m
        out = i * p
        for k in range(m):
            xr = ar[row + k]
            xi = ai[row + k]
            if xr == 0 and xi == 0:
                continue
            col = k * p
            for j in range(p):
                yr = br[col + j]
                yi = bi[col + j]
                cr[out + j] += xr * yr - xi * yi
                ci[out + j] += xr * yi + xi * yr
    return cr, ci


cdef inline tuple _zi_exact_div(object ar, object ai, object br, object bi):
    cdef object den = br * br + bi * bi
    cdef object nr = ar * br + ai * bi
    cdef object ni = ai * br - ar * bi
    qr, rr = divmod(nr, den)
    qi, ri = divmod(ni, den)
    if rr or ri:
        raise ArithmeticError("inexact Gaussian-integer division in Bareiss step")
    return qr, qi


def zi_rank(re_, im_, Py_ssize_t rows, Py_ssize_t cols):
    cdef list mr = list(re_)
    cdef list mi = list(im_)
    cdef object prev_r = 1, prev_i = 0
    cdef object pr, pi, er, ei, xr, xi, yr, yi, tr, ti
    cdef Py_ssize_t r = 0, c, i, j, piv, a, b
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if mr[i * cols + c] != 0 or mi[i * cols + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                a = r * cols + j
                b = piv * cols + j
                mr[a], mr[b] = mr[b], mr[a]
                mi[a], mi[b] = mi[b], mi[a]
        pr = mr[r * cols + c]
        pi = mi[r * cols + c]
        for i in range(r + 1, rows):
            er = mr[i * cols + c]
            ei = mi[i * cols + c]
            if er == 0 and ei == 0:
                # row only needs rescaling by the pivot ratio
                for j in range(c + 1, cols):
                    xr = mr[i * cols + j]
                    xi = mi[i * cols + j]
                    tr = pr * xr - pi * xi
                    ti = pr * xi + pi * xr
                    mr[i * cols + j], mi[i * cols + j] = _zi_exact_div(tr, ti, prev_r, prev_i)
                continue
            for j in range(c + 1, cols):
                xr = mr[i * cols + j]
                xi = mi[i * cols + j]
                yr = mr[r * cols + j]
                yi = mi[r * cols + j]
                tr = (pr * xr - pi * xi) - (er * yr - ei * yi)
                ti = (pr * xi + pi * xr) - (er * yi + ei * yr)
                mr[i * cols + j], mi[i * cols + j] = _zi_exact_div(tr, ti, prev_r, prev_i)
            mr[i * cols + c] = 0
            mi[i * cols + c] = 0
        prev_r = pr
        prev_i = pi
        r += 1
    return r
