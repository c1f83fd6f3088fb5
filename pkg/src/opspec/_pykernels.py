"""Pure-Python exact kernels over the Gaussian integers.

Matrices are passed as flat row-major lists of Python ints, one list for the
real parts and one for the imaginary parts.  The compiled twin in
``_ckernels.pyx`` exposes the same functions with the same semantics.
"""


def zi_matmul(ar, ai, br, bi, n, m, p):
    """Product of an n x m and an m x p Gaussian-integer matrix."""
    cr = [0] * (n * p)
    ci = [0] * (n * p)
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


def _zi_exact_div(ar, ai, br, bi):
    den = br * br + bi * bi
    nr = ar * br + ai * bi
    ni = ai * br - ar * bi
    qr, rr = divmod(nr, den)
    qi, ri = divmod(ni, den)
    if rr or ri:
        raise ArithmeticError("inexact Gaussian-integer division in Bareiss step")
    return qr, qi


def zi_rank(re_, im_, rows, cols):
    """Rank by fraction-free (Bareiss) elimination over Z[i]."""
    mr = list(re_)
    mi = list(im_)
    prev_r, prev_i = 1, 0
    r = 0
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
                a, b = r * cols + j, piv * cols + j
                mr[a], mr[b] = mr[b], mr[a]
                mi[a], mi[b] = mi[b], mi[a]
        pr = mr[r * cols + c]
        pi = mi[r * cols + c]
        for i in range(r + 1, rows):
            er = mr[i * cols + c]
            ei = mi[i * cols + c]
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
        prev_r, prev_i = pr, pi
        r += 1
    return r
