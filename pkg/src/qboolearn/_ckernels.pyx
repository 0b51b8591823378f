# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np

from libc.math cimport exp, frexp, log, pow, sqrt
from libc.stdlib cimport free, malloc

cdef enum:
    MODE_CLASSICAL = 0
    MODE_QUANTUM_REAL = 1
    MODE_QUANTUM_GENERAL = 2
    LOG_SPACE_MIN_DIM = 65

cdef double LN2 = 0.6931471805599453


cdef struct Circuit:
    int n_bits
    int dim
    int mode
    const unsigned char* target
    const double* signs
    const double* cos_phi
    const double* sin_phi
    const long long* sub_index
    const long long* sub_offset


cdef void _prob_zero_row(const double* p, double* w, const Circuit* c) noexcept nogil:
    # ``w`` holds at least 2 * dim doubles; the upper half is scratch.
    cdef int D = c.dim
    cdef double* wi = w + D
    cdef int i, x, b
    cdef long long j, k
    cdef double v, cs, sn, er, ei, ar, ai, br, bi, nar, nai
    if c.mode == MODE_CLASSICAL:
        for x in range(D):
            w[x] = 2.0 * p[x] - 1.0
        for i in range(c.n_bits):
            b = 1 << i
            for x in range(D):
                if x & b:
                    w[x] *= w[x ^ b]
        for x in range(D):
            w[x] = 0.5 + 0.5 * w[x]
    elif c.mode == MODE_QUANTUM_REAL:
        # Gates commute as plane rotations; track exp(i * angle) per input.
        for x in range(D):
            w[x] = sqrt(p[x])
            wi[x] = c.signs[x] * sqrt(1.0 - p[x])
        for i in range(c.n_bits):
            b = 1 << i
            for x in range(D):
                if x & b:
                    v = w[x] * w[x ^ b] - wi[x] * wi[x ^ b]
                    wi[x] = w[x] * wi[x ^ b] + wi[x] * w[x ^ b]
                    w[x] = v
        for x in range(D):
            w[x] = w[x] * w[x]
    else:
        for x in range(D):
            ar = 1.0
            ai = 0.0
            br = 0.0
            bi = 0.0
            for j in range(c.sub_offset[x], c.sub_offset[x + 1]):
                k = c.sub_index[j]
                cs = sqrt(p[k])
                sn = sqrt(1.0 - p[k])
                er = c.cos_phi[k]
                ei = c.sin_phi[k]
                # alpha' = cs alpha + e sn beta ; beta' = -conj(e) sn alpha + cs beta
                nar = cs * ar + sn * (er * br - ei * bi)
                nai = cs * ai + sn * (er * bi + ei * br)
                br = cs * br - sn * (er * ar + ei * ai)
                bi = cs * bi - sn * (er * ai - ei * ar)
                ar = nar
                ai = nai
            w[x] = ar * ar + ai * ai


cdef double _row_fidelity(const double* p, double* w, const Circuit* c) noexcept nogil:
    cdef int D = c.dim
    cdef int x
    cdef double pt, prod, acc
    cdef int ex
    _prob_zero_row(p, w, c)
    if D < LOG_SPACE_MIN_DIM:
        prod = 1.0
        for x in range(D):
            pt = w[x]
            if c.target[x]:
                pt = 1.0 - pt
            if pt < 0.0:
                pt = 0.0
            elif pt > 1.0:
                pt = 1.0
            prod *= sqrt(pt)
        return pow(prod, 1.0 / D)
    # Log space via a renormalized running product: one log per row.
    prod = 1.0
    acc = 0.0
    for x in range(D):
        pt = w[x]
        if c.target[x]:
            pt = 1.0 - pt
        if pt <= 0.0:
            return 0.0
        elif pt > 1.0:
            pt = 1.0
        prod *= pt
        if prod < 1e-200:
            prod = frexp(prod, &ex)
            acc += ex
    return exp(0.5 * (log(prod) + acc * LN2) / D)


cdef class _Bound:
    """Keeps the circuit arrays alive while a raw ``Circuit`` points at them."""
    cdef Circuit c
    cdef object refs

    def __cinit__(self, int n_bits, int mode, target, signs, cos_phi, sin_phi,
                  sub_index, sub_offset):
        cdef const unsigned char[::1] t = np.ascontiguousarray(target, dtype=np.uint8)
        cdef const double[::1] sg = np.ascontiguousarray(signs, dtype=np.float64)
        cdef const double[::1] cp = np.ascontiguousarray(cos_phi, dtype=np.float64)
        cdef const double[::1] sp = np.ascontiguousarray(sin_phi, dtype=np.float64)
        cdef const long long[::1] si = np.ascontiguousarray(sub_index, dtype=np.int64)
        cdef const long long[::1] so = np.ascontiguousarray(sub_offset, dtype=np.int64)
        if t.shape[0] != (1 << n_bits) or sg.shape[0] != t.shape[0]:
            raise ValueError("circuit arrays do not match n_bits")
        if cp.shape[0] != t.shape[0] or sp.shape[0] != t.shape[0]:
            raise ValueError("circuit arrays do not match n_bits")
        if so.shape[0] != t.shape[0] + 1:
            raise ValueError("sub_offset must have 2^N + 1 entries")
        if mode == MODE_QUANTUM_GENERAL and si.shape[0] < so[t.shape[0]]:
            raise ValueError("sub_index shorter than sub_offset claims")
        self.refs = (t, sg, cp, sp, si, so)
        self.c.n_bits = n_bits
        self.c.dim = 1 << n_bits
        self.c.mode = mode
        self.c.target = &t[0]
        self.c.signs = &sg[0]
        self.c.cos_phi = &cp[0]
        self.c.sin_phi = &sp[0]
        self.c.sub_index = &si[0] if si.shape[0] else NULL
        self.c.sub_offset = &so[0]


cdef inline void _check_rows(const double[:, ::1] P, int dim) except *:
    if P.shape[1] != dim:
        raise ValueError(f"expected {dim} columns, got {P.shape[1]}")


def batch_fidelity(P, int n_bits, int mode, target, signs, cos_phi, sin_phi,
                   sub_index, sub_offset):
    cdef _Bound bound = _Bound(n_bits, mode, target, signs, cos_phi, sin_phi,
                               sub_index, sub_offset)
    cdef const double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    _check_rows(Pv, bound.c.dim)
    out = np.empty(Pv.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef double* w = <double*>malloc(2 * bound.c.dim * sizeof(double))
    cdef Py_ssize_t i
    if w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(Pv.shape[0]):
                o[i] = _row_fidelity(&Pv[i, 0], w, &bound.c)
    finally:
        free(w)
    return out


def prob_zero(P, int n_bits, int mode, signs, cos_phi, sin_phi, sub_index,
              sub_offset):
    target = np.zeros(1 << n_bits, dtype=np.uint8)
    cdef _Bound bound = _Bound(n_bits, mode, target, signs, cos_phi, sin_phi,
                               sub_index, sub_offset)
    cdef const double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    _check_rows(Pv, bound.c.dim)
    out = np.empty((Pv.shape[0], bound.c.dim), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double* w = <double*>malloc(2 * bound.c.dim * sizeof(double))
    cdef Py_ssize_t i, x
    if w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(Pv.shape[0]):
                _prob_zero_row(&Pv[i, 0], w, &bound.c)
                for x in range(bound.c.dim):
                    o[i, x] = w[x]
    finally:
        free(w)
    return out


def count_at_least(P, double threshold, int n_bits, int mode, target, signs,
                   cos_phi, sin_phi, sub_index, sub_offset):
    cdef _Bound bound = _Bound(n_bits, mode, target, signs, cos_phi, sin_phi,
                               sub_index, sub_offset)
    cdef const double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    _check_rows(Pv, bound.c.dim)
    cdef double* w = <double*>malloc(2 * bound.c.dim * sizeof(double))
    cdef Py_ssize_t i, hits = 0
    if w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(Pv.shape[0]):
                if _row_fidelity(&Pv[i, 0], w, &bound.c) >= threshold:
                    hits += 1
    finally:
        free(w)
    return hits


def first_at_least(P, double threshold, int n_bits, int mode, target, signs,
                   cos_phi, sin_phi, sub_index, sub_offset):
    cdef _Bound bound = _Bound(n_bits, mode, target, signs, cos_phi, sin_phi,
                               sub_index, sub_offset)
    cdef const double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    _check_rows(Pv, bound.c.dim)
    cdef double* w = <double*>malloc(2 * bound.c.dim * sizeof(double))
    cdef Py_ssize_t i, found = -1
    if w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(Pv.shape[0]):
                if _row_fidelity(&Pv[i, 0], w, &bound.c) >= threshold:
                    found = i
                    break
    finally:
        free(w)
    return found


def de_generation(double[:, ::1] P, double[::1] F, const long long[::1] a,
                  const long long[::1] b, const long long[::1] c,
                  const double[:, ::1] r, const long long[::1] s,
                  double weight, double crossover, int n_bits, int mode, target,
                  signs, cos_phi, sin_phi, sub_index, sub_offset):
    cdef _Bound bound = _Bound(n_bits, mode, target, signs, cos_phi, sin_phi,
                               sub_index, sub_offset)
    cdef Py_ssize_t M = P.shape[0]
    cdef int D = bound.c.dim
    if P.shape[1] != D or r.shape[1] != D or r.shape[0] != M:
        raise ValueError("population and crossover draws must be (M, 2^N)")
    if F.shape[0] != M or a.shape[0] != M or b.shape[0] != M or c.shape[0] != M \
            or s.shape[0] != M:
        raise ValueError("per-member arrays must have length M")
    trial_arr = np.empty((M, D), dtype=np.float64)
    ft_arr = np.empty(M, dtype=np.float64)
    cdef double[:, ::1] T = trial_arr
    cdef double[::1] FT = ft_arr
    cdef double* w = <double*>malloc(2 * D * sizeof(double))
    cdef Py_ssize_t i, k, replaced = 0
    cdef double v
    if w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(M):
                for k in range(D):
                    if r[i, k] > crossover or k == s[i]:
                        T[i, k] = P[i, k]
                    else:
                        v = P[a[i], k] + weight * (P[b[i], k] - P[c[i], k])
                        if v < 0.0:
                            v = 0.0
                        elif v > 1.0:
                            v = 1.0
                        T[i, k] = v
            for i in range(M):
                FT[i] = _row_fidelity(&T[i, 0], w, &bound.c)
            for i in range(M):
                if FT[i] > F[i]:
                    for k in range(D):
                        P[i, k] = T[i, k]
                    F[i] = FT[i]
                    replaced += 1
    finally:
        free(w)
    return replaced
