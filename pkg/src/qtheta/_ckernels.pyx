# cython: boundscheck=False, wraparound=False, cdivision=True
"""Native truncated convolution over int64 with overflow detection.

Inputs that do not fit in int64, or products/sums that would overflow it,
raise ``OverflowError``; the caller is expected to retry on the exact
pure-Python path.
"""

from cpython.array cimport array, clone

cdef extern from *:
    bint mul_overflow "__builtin_mul_overflow"(long long a, long long b, long long *res) nogil
    bint add_overflow "__builtin_add_overflow"(long long a, long long b, long long *res) nogil

cdef array _template = array('q', [])


def convolve(a, b, Py_ssize_t n):
    cdef array aa = array('q', a[:n])
    cdef array bb = array('q', b[:n])
    cdef Py_ssize_t nza = 0, nzb = 0, i
    for i in range(len(aa)):
        if aa.data.as_longlongs[i] != 0:
            nza += 1
    for i in range(len(bb)):
        if bb.data.as_longlongs[i] != 0:
            nzb += 1
    if nzb < nza:
        aa, bb = bb, aa
    cdef array out = clone(_template, n, zero=True)
    if not _axpy_all(aa.data.as_longlongs, len(aa), bb.data.as_longlongs, len(bb),
                     out.data.as_longlongs, n):
        raise OverflowError("int64 accumulator overflow")
    return out.tolist()


cdef bint _axpy_all(const long long *a, Py_ssize_t la, const long long *b, Py_ssize_t lb,
                    long long *out, Py_ssize_t n) nogil:
    # for each nonzero a[i]: out[i:] += a[i] * b[:n-i]
    cdef Py_ssize_t i, j, stop
    cdef long long ai, prod
    for i in range(min(la, n)):
        ai = a[i]
        if ai == 0:
            continue
        stop = min(lb, n - i)
        if ai == 1:
            for j in range(stop):
                if add_overflow(out[i + j], b[j], &out[i + j]):
                    return False
        else:
            for j in range(stop):
                if mul_overflow(ai, b[j], &prod):
                    return False
                if add_overflow(out[i + j], prod, &out[i + j]):
                    return False
    return True
