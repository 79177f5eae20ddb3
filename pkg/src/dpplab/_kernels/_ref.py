"""Pure-Python reference implementations of the two hot sampling loops.

The compiled module _fast.pyx mirrors this file operation for operation.
Both consume exactly one uniform double from the generator per random
decision, in the same order, so a given seed produces the same output on
either backend. Keep the arithmetic sequential and scalar here; numpy
reductions use pairwise summation and would break that equivalence.
"""

import math

import numpy as np

from ..errors import ResampleError

# Squared-norm floor below which a projection step counts as degenerate.
DEGENERATE_SQ = 1e-24
MAX_RETRIES = 100


def wilson_parents(n, rng):
    """Parent array of a uniform spanning tree of K_n rooted at vertex 0.

    Cycle-popping form of the loop-erased random walk: walks start from
    vertices 1..n-1 in order, each step overwrites the parent pointer, and
    the surviving pointers after absorption are the loop-erased path.
    """
    random = rng.random
    parent = [0] * n
    intree = [False] * n
    parent[0] = -1
    intree[0] = True
    for i in range(1, n):
        u = i
        while not intree[u]:
            x = random()
            j = int(x * (n - 1))
            if j >= u:
                j += 1
            parent[u] = j
            u = j
        u = i
        while not intree[u]:
            intree[u] = True
            u = parent[u]
    return np.array(parent, dtype=np.int64)


def project_sample(scaled, rng):
    """Chain-rule sample from the projection DPP with the given scaled frame.

    scaled is a (rank, npoints) float64 array whose rows are orthonormal in
    the plain Euclidean sense (measure weights already folded in as sqrt).
    Returns the chosen point indices, ascending.
    """
    rows = [[float(x) for x in row] for row in np.asarray(scaled)]
    r = len(rows)
    npts = len(rows[0])
    chosen = []
    for step in range(r):
        live = r - step
        p = [0.0] * npts
        for j in range(npts):
            s = 0.0
            for i in range(live):
                rij = rows[i][j]
                s += rij * rij
            if s < 0.0:
                s = 0.0
            p[j] = s
        total = 0.0
        for j in range(npts):
            total += p[j]
        pick = -1
        for _ in range(MAX_RETRIES):
            u = rng.random()
            target = u * total
            acc = 0.0
            k = npts - 1
            for j in range(npts):
                acc += p[j]
                if target < acc:
                    k = j
                    break
            if p[k] >= DEGENERATE_SQ:
                pick = k
                break
        if pick < 0:
            raise ResampleError(
                f"projection step {step} degenerate after {MAX_RETRIES} retries"
            )
        chosen.append(pick)
        if live > 1:
            # Householder reflection sending the evaluation column of the
            # picked point onto the last row, which is then dropped; the
            # remaining rows are an orthonormal basis of the orthocomplement.
            c = [rows[i][pick] for i in range(live)]
            normc = math.sqrt(p[pick])
            last = live - 1
            s = 1.0 if c[last] >= 0.0 else -1.0
            v = c[:]
            v[last] += s * normc
            vnorm2 = 0.0
            for i in range(live):
                vnorm2 += v[i] * v[i]
            if vnorm2 > 0.0:
                beta = 2.0 / vnorm2
                for j in range(npts):
                    dot = 0.0
                    for i in range(live):
                        dot += v[i] * rows[i][j]
                    f = beta * dot
                    for i in range(live):
                        rows[i][j] -= f * v[i]
            rows.pop()
    chosen.sort()
    return np.array(chosen, dtype=np.int64)


def project_sample_complex(scaled, rng):
    """Complex-frame variant of project_sample (no compiled twin)."""
    rows = [[complex(x) for x in row] for row in np.asarray(scaled)]
    r = len(rows)
    npts = len(rows[0])
    chosen = []
    for step in range(r):
        live = r - step
        p = [0.0] * npts
        for j in range(npts):
            s = 0.0
            for i in range(live):
                rij = rows[i][j]
                s += rij.real * rij.real + rij.imag * rij.imag
            p[j] = s
        total = 0.0
        for j in range(npts):
            total += p[j]
        pick = -1
        for _ in range(MAX_RETRIES):
            u = rng.random()
            target = u * total
            acc = 0.0
            k = npts - 1
            for j in range(npts):
                acc += p[j]
                if target < acc:
                    k = j
                    break
            if p[k] >= DEGENERATE_SQ:
                pick = k
                break
        if pick < 0:
            raise ResampleError(
                f"projection step {step} degenerate after {MAX_RETRIES} retries"
            )
        chosen.append(pick)
        if live > 1:
            c = [rows[i][pick] for i in range(live)]
            normc = math.sqrt(p[pick])
            last = live - 1
            cl = c[last]
            mag = abs(cl)
            phase = cl / mag if mag > 0.0 else 1.0 + 0.0j
            v = c[:]
            v[last] += phase * normc
            vnorm2 = 0.0
            for i in range(live):
                vi = v[i]
                vnorm2 += vi.real * vi.real + vi.imag * vi.imag
            if vnorm2 > 0.0:
                beta = 2.0 / vnorm2
                for j in range(npts):
                    dot = 0.0 + 0.0j
                    for i in range(live):
                        dot += v[i].conjugate() * rows[i][j]
                    f = beta * dot
                    for i in range(live):
                        rows[i][j] -= f * v[i]
            rows.pop()
    chosen.sort()
    return np.array(chosen, dtype=np.int64)
