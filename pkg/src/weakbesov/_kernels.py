"""Compiled loops for Blaschke products.

Both kernels walk the zeros once per point, accumulating the product and
(for the derivative) the product rule D_k = D_{k-1} b_k + P_{k-1} b_k'.
Each point is independent, so results do not depend on chunking.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def product_values(z, a, abar, u):
    out = np.empty(z.size, dtype=np.complex128)
    for i in range(z.size):
        zi = z[i]
        P = 1.0 + 0.0j
        for k in range(a.size):
            P *= u[k] * (a[k] - zi) / (1.0 - abar[k] * zi)
        out[i] = P
    return out


@njit(cache=True)
def product_derivatives(z, a, abar, u, d):
    out = np.empty(z.size, dtype=np.complex128)
    for i in range(z.size):
        zi = z[i]
        P = 1.0 + 0.0j
        D = 0.0 + 0.0j
        for k in range(a.size):
            den = 1.0 - abar[k] * zi
            # 1/den through one real division
            inv = den.conjugate() * (1.0 / (den.real * den.real + den.imag * den.imag))
            b = u[k] * (a[k] - zi) * inv
            D = D * b + P * (u[k] * d[k]) * inv * inv
            P *= b
        out[i] = D
    return out
