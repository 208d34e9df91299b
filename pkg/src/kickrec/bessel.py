"""Bessel functions of the first kind, J_l(z), for integer order and real argument."""
from __future__ import annotations

import math

import numpy as np

SERIES_LIMIT = 4.0
MAX_ARG = 50.0


def _series(l: int, z: float) -> float:
    # J_l(z) = sum_k (-1)^k (z/2)^(2k+l) / (k! (k+l)!),  l >= 0
    half = 0.5 * z
    term = half ** l / math.factorial(l)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + l))
        total += term
        if k > half and abs(term) <= 1e-17 * abs(total) or k > 400:
            return total


def _downward(z: float, l_top: int) -> np.ndarray:
    """J_0..J_{l_top}(z) by Miller's backward recurrence, z > 0."""
    start = 2 * ((max(l_top, int(z)) + int(math.sqrt(40.0 * max(l_top, z))) + 20) // 2)
    vals = np.zeros(start + 2)
    vals[start + 1] = 0.0
    vals[start] = 1e-250
    for n in range(start, 0, -1):
        vals[n - 1] = 2.0 * n / z * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > 1e200:
            vals[n - 1:] *= 1e-200
    # J_0 + 2 sum J_{2k} = 1 fixes both scale and sign
    norm = vals[0] + 2.0 * vals[2:start + 1:2].sum()
    return vals[:l_top + 1] / norm


def bessel_j(l: int, z: float) -> float:
    """J_l(z) for integer ``l`` and real ``|z| <= 50``."""
    l = int(l)
    z = float(z)
    if abs(z) > MAX_ARG:
        raise ValueError(f"|z| = {abs(z)} outside supported range {MAX_ARG}")
    if abs(l) > 200:
        raise ValueError(f"order {l} outside supported range")
    sign = 1.0
    if l < 0:
        l = -l
        sign = -1.0 if l % 2 else 1.0
    if z < 0:
        z = -z
        sign *= -1.0 if l % 2 else 1.0
    if z == 0.0:
        return sign * (1.0 if l == 0 else 0.0)
    if z <= SERIES_LIMIT:
        return sign * _series(l, z)
    return sign * float(_downward(z, l)[l])


def bessel_orders(z: float, l_max: int) -> np.ndarray:
    """Array of J_l(z) for l = -l_max..l_max."""
    return np.array([bessel_j(l, z) for l in range(-l_max, l_max + 1)])


def truncation_order(z: float, tol: float = 1e-14, cap: int = 60) -> int:
    """Smallest l with |J_l(z)| < tol beyond the turning point l ~ |z|."""
    l = int(abs(z))
    while l < cap:
        if abs(bessel_j(l, z)) < tol and abs(bessel_j(l + 1, z)) < tol:
            return l
        l += 1
    return cap
