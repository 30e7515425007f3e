# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner kernels. Same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt

from .errors import EmptyVenueError

cnp.import_array()


cdef void _best_responses(const double[:, ::1] cpow, const double[:, ::1] costs,
                          const double[:, ::1] spot, const double[::1] impacts,
                          double alpha, double beta, double budget,
                          double[::1] w, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = costs.shape[0], k = costs.shape[1], i, j
    cdef double denom, e = beta / (1.0 - alpha)
    for j in range(k):
        w[j] = pow(impacts[j], e)
    for i in range(n):
        denom = 0.0
        for j in range(k):
            out[i, j] = cpow[i, j] * w[j]
            denom += costs[i, j] * out[i, j] * (1.0 + spot[i, j])
        for j in range(k):
            out[i, j] = budget * out[i, j] / denom


cdef int _update(const double[:, ::1] actions, const double[::1] thetas,
                 const double[::1] masses, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = actions.shape[0], k = actions.shape[1], i, j
    cdef double num, den, m
    for j in range(k):
        num = 0.0
        den = 0.0
        for i in range(n):
            m = actions[i, j] * masses[i]
            num += m * thetas[i]
            den += m
        if not den > 0.0:
            return <int>j + 1
        out[j] = num / den
    return 0


def _cost_power(costs, double alpha):
    return np.ascontiguousarray(np.asarray(costs, dtype=float) ** (1.0 / (alpha - 1.0)))


def best_responses(costs, impacts, spot, double alpha, double beta, double budget):
    cdef const double[:, ::1] c = np.ascontiguousarray(costs, dtype=float)
    cdef const double[:, ::1] s = np.ascontiguousarray(spot, dtype=float)
    cdef const double[::1] v = np.ascontiguousarray(impacts, dtype=float)
    cdef double[:, ::1] cp = _cost_power(c, alpha)
    out = np.empty((c.shape[0], c.shape[1]))
    cdef double[:, ::1] o = out
    cdef double[::1] w = np.empty(c.shape[1])
    with nogil:
        _best_responses(cp, c, s, v, alpha, beta, budget, w, o)
    return out


def update_impacts(actions, thetas, masses):
    cdef const double[:, ::1] a = np.ascontiguousarray(actions, dtype=float)
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=float)
    cdef const double[::1] mu = np.ascontiguousarray(masses, dtype=float)
    out = np.empty(a.shape[1])
    cdef double[::1] o = out
    cdef int bad
    with nogil:
        bad = _update(a, th, mu, o)
    if bad:
        raise EmptyVenueError(f"empty venue(s) [{bad - 1}]: no weighted publications")
    return out


def step(thetas, masses, costs, spot, impacts, double alpha, double beta, double budget):
    a = best_responses(costs, impacts, spot, alpha, beta, budget)
    return update_impacts(a, thetas, masses)


def iterate(thetas, masses, costs, spot, impacts, double alpha, double beta,
            double budget, double eps, long max_rounds):
    cdef const double[:, ::1] c = np.ascontiguousarray(costs, dtype=float)
    cdef const double[:, ::1] s = np.ascontiguousarray(spot, dtype=float)
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=float)
    cdef const double[::1] mu = np.ascontiguousarray(masses, dtype=float)
    cdef double[:, ::1] cp = _cost_power(c, alpha)
    cdef Py_ssize_t n = c.shape[0], k = c.shape[1], j
    v_arr = np.array(impacts, dtype=float)
    nv_arr = np.empty(k)
    cdef double[::1] v = v_arr
    cdef double[::1] nv = nv_arr
    cdef double[::1] w = np.empty(k)
    cdef double[:, ::1] a = np.empty((n, k))
    cdef long t = 0
    cdef int bad = 0, met = 0
    cdef double gap = 0.0, d
    with nogil:
        while True:
            _best_responses(cp, c, s, v, alpha, beta, budget, w, a)
            bad = _update(a, th, mu, nv)
            if bad:
                break
            gap = 0.0
            for j in range(k):
                d = nv[j] - v[j]
                gap += d * d
            gap = sqrt(gap)
            if gap < eps:
                met = 1
                break
            if t >= max_rounds:
                break
            for j in range(k):
                v[j] = nv[j]
            t += 1
    if bad:
        raise EmptyVenueError(f"empty venue(s) [{bad - 1}]: no weighted publications")
    return v_arr, nv_arr, int(t), float(gap), bool(met)
