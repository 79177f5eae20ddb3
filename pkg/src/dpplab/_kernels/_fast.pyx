# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the reference sampling loops in _ref.py.

Uniform doubles are pulled straight from the generator's C interface, one
per random decision, in the same order as the reference code, so outputs
agree bit for bit across backends for a given seed.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport sqrt
from numpy.random cimport bitgen_t

cnp.import_array()


cdef bitgen_t *_bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


def raw_doubles(object rng, Py_ssize_t k):
    """k raw next_double values; used by tests to pin the stream contract."""
    cdef bitgen_t *bg = _bitgen(rng)
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with rng.bit_generator.lock:
        for i in range(k):
            o[i] = bg.next_double(bg.state)
    return out


def wilson_parents(Py_ssize_t n, object rng):
    """Parent array of a uniform spanning tree of K_n rooted at vertex 0."""
    cdef bitgen_t *bg = _bitgen(rng)
    parent = np.zeros(n, dtype=np.int64)
    intree = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] par = parent
    cdef cnp.uint8_t[::1] it = intree
    cdef Py_ssize_t i, u, j
    cdef double x
    par[0] = -1
    it[0] = 1
    with rng.bit_generator.lock:
        for i in range(1, n):
            u = i
            while it[u] == 0:
                x = bg.next_double(bg.state)
                j = <Py_ssize_t> (x * (n - 1))
                if j >= u:
                    j += 1
                par[u] = j
                u = j
            u = i
            while it[u] == 0:
                it[u] = 1
                u = par[u]
    return parent


def project_sample(object scaled, object rng):
    """Chain-rule projection-DPP sample; see _ref.project_sample."""
    from ..errors import ResampleError

    cdef bitgen_t *bg = _bitgen(rng)
    work = np.array(scaled, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] rows = work
    cdef Py_ssize_t r = rows.shape[0]
    cdef Py_ssize_t npts = rows.shape[1]
    p_arr = np.zeros(npts, dtype=np.float64)
    v_arr = np.zeros(r, dtype=np.float64)
    chosen_arr = np.zeros(r, dtype=np.int64)
    cdef double[::1] p = p_arr
    cdef double[::1] v = v_arr
    cdef cnp.int64_t[::1] chosen = chosen_arr
    cdef Py_ssize_t step, live, i, j, k, pick, last, attempt
    cdef double s, rij, total, u, target, acc, normc, sgn, vnorm2, beta, dot, f
    cdef bint failed = 0
    cdef Py_ssize_t fail_step = 0
    with rng.bit_generator.lock:
        for step in range(r):
            live = r - step
            for j in range(npts):
                s = 0.0
                for i in range(live):
                    rij = rows[i, j]
                    s += rij * rij
                if s < 0.0:
                    s = 0.0
                p[j] = s
            total = 0.0
            for j in range(npts):
                total += p[j]
            pick = -1
            for attempt in range(100):
                u = bg.next_double(bg.state)
                target = u * total
                acc = 0.0
                k = npts - 1
                for j in range(npts):
                    acc += p[j]
                    if target < acc:
                        k = j
                        break
                if p[k] >= 1e-24:
                    pick = k
                    break
            if pick < 0:
                failed = 1
                fail_step = step
                break
            chosen[step] = pick
            if live > 1:
                normc = sqrt(p[pick])
                last = live - 1
                for i in range(live):
                    v[i] = rows[i, pick]
                sgn = 1.0 if v[last] >= 0.0 else -1.0
                v[last] += sgn * normc
                vnorm2 = 0.0
                for i in range(live):
                    vnorm2 += v[i] * v[i]
                if vnorm2 > 0.0:
                    beta = 2.0 / vnorm2
                    for j in range(npts):
                        dot = 0.0
                        for i in range(live):
                            dot += v[i] * rows[i, j]
                        f = beta * dot
                        for i in range(live):
                            rows[i, j] -= f * v[i]
    if failed:
        raise ResampleError(
            f"projection step {fail_step} degenerate after 100 retries"
        )
    chosen_arr.sort()
    return chosen_arr
