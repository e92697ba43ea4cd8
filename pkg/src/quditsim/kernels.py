"""Exact integer kernels: modular Gaussian elimination and Pauli row products.

Each kernel ships in two interchangeable implementations: a numba-compiled one
and a pure-numpy one. The environment variable QSIM_NUMBA picks the path at
import time (QSIM_NUMBA=0 forces numpy; numpy is also the automatic fallback
when numba is missing). Both paths use exact int64 arithmetic and must return
bit-identical results; benchmarks/kernel_bench.py compares their speed.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_requested() -> bool:
    flag = os.environ.get("QSIM_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


# ---------------------------------------------------------------------------
# pure numpy implementations


def _inv_mod_py(v: int, p: int) -> int:
    # Fermat inverse; p is prime by construction upstream
    return pow(int(v) % p, p - 2, p)


def _solve_mod_py(a, b, p):
    """Gauss-Jordan solve of a @ x = b over Z_p.

    Returns (x, ok); ok is False when a is singular mod p.
    """
    m = a.shape[0]
    aug = np.empty((m, m + 1), dtype=np.int64)
    aug[:, :m] = np.asarray(a, dtype=np.int64) % p
    aug[:, m] = np.asarray(b, dtype=np.int64) % p
    for col in range(m):
        piv = -1
        for r in range(col, m):
            if aug[r, col] != 0:
                piv = r
                break
        if piv < 0:
            return np.zeros(m, dtype=np.int64), False
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        inv = _inv_mod_py(int(aug[col, col]), p)
        aug[col] = (aug[col] * inv) % p
        for r in range(m):
            if r != col and aug[r, col] != 0:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % p
    return aug[:, m].copy(), True


def _rowprod_py(xs, zs, phases, xpow, zpow, d):
    """Ordered product of tableau rows with full phase tracking.

    Computes prod_i row[n+i]**xpow[i] (ascending i), then
    prod_i row[i]**zpow[i] (ascending i). Rows are given by their exponent
    blocks xs, zs of shape (2n, n) and tau exponents phases of shape (2n,).
    Returns (x, z, phase) of the product; phase is mod 2d.
    """
    n = xs.shape[1]
    two_d = 2 * d
    acc_x = np.zeros(n, dtype=np.int64)
    acc_z = np.zeros(n, dtype=np.int64)
    ph = 0
    for i in range(n):
        r = n + i
        for _ in range(int(xpow[i])):
            ph = (ph + int(phases[r]) + 2 * int(acc_z @ xs[r])) % two_d
            acc_x = (acc_x + xs[r]) % d
            acc_z = (acc_z + zs[r]) % d
    for i in range(n):
        for _ in range(int(zpow[i])):
            ph = (ph + int(phases[i]) + 2 * int(acc_z @ xs[i])) % two_d
            acc_x = (acc_x + xs[i]) % d
            acc_z = (acc_z + zs[i]) % d
    return acc_x, acc_z, ph


# ---------------------------------------------------------------------------
# numba implementations (same algorithms, explicit loops)

_HAVE_NUMBA = False
_solve_mod_nb = None
_rowprod_nb = None

if _numba_requested():
    try:
        from numba import njit

        @njit(cache=True)
        def _inv_mod_jit(v, p):
            r = 1
            base = v % p
            e = p - 2
            while e > 0:
                if e & 1:
                    r = (r * base) % p
                base = (base * base) % p
                e >>= 1
            return r

        @njit(cache=True)
        def _solve_mod_jit(a, b, p):
            m = a.shape[0]
            aug = np.empty((m, m + 1), dtype=np.int64)
            for i in range(m):
                for j in range(m):
                    aug[i, j] = a[i, j] % p
                aug[i, m] = b[i] % p
            x = np.zeros(m, dtype=np.int64)
            for col in range(m):
                piv = -1
                for r in range(col, m):
                    if aug[r, col] != 0:
                        piv = r
                        break
                if piv < 0:
                    return x, False
                if piv != col:
                    for j in range(m + 1):
                        tmp = aug[col, j]
                        aug[col, j] = aug[piv, j]
                        aug[piv, j] = tmp
                inv = _inv_mod_jit(aug[col, col], p)
                for j in range(m + 1):
                    aug[col, j] = (aug[col, j] * inv) % p
                for r in range(m):
                    f = aug[r, col]
                    if r != col and f != 0:
                        for j in range(m + 1):
                            aug[r, j] = (aug[r, j] - f * aug[col, j]) % p
            for i in range(m):
                x[i] = aug[i, m]
            return x, True

        @njit(cache=True)
        def _rowprod_jit(xs, zs, phases, xpow, zpow, d):
            n = xs.shape[1]
            two_d = 2 * d
            acc_x = np.zeros(n, dtype=np.int64)
            acc_z = np.zeros(n, dtype=np.int64)
            ph = 0
            for i in range(n):
                r = n + i
                for _ in range(xpow[i]):
                    cross = 0
                    for j in range(n):
                        cross += acc_z[j] * xs[r, j]
                    ph = (ph + phases[r] + 2 * cross) % two_d
                    for j in range(n):
                        acc_x[j] = (acc_x[j] + xs[r, j]) % d
                        acc_z[j] = (acc_z[j] + zs[r, j]) % d
            for i in range(n):
                for _ in range(zpow[i]):
                    cross = 0
                    for j in range(n):
                        cross += acc_z[j] * xs[i, j]
                    ph = (ph + phases[i] + 2 * cross) % two_d
                    for j in range(n):
                        acc_x[j] = (acc_x[j] + xs[i, j]) % d
                        acc_z[j] = (acc_z[j] + zs[i, j]) % d
            return acc_x, acc_z, ph

        _solve_mod_nb = _solve_mod_jit
        _rowprod_nb = _rowprod_jit
        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        _HAVE_NUMBA = False

_USE_NUMBA = _HAVE_NUMBA and _numba_requested()


def backend() -> str:
    """Name of the active kernel path: 'numba' or 'numpy'."""
    return "numba" if _USE_NUMBA else "numpy"


def _as_i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def solve_mod(a, b, p: int):
    """Solve a @ x = b over Z_p for prime p; raises on a singular system."""
    a = _as_i64(a)
    b = _as_i64(b)
    if _USE_NUMBA:
        x, ok = _solve_mod_nb(a, b, p)
    else:
        x, ok = _solve_mod_py(a, b, p)
    if not ok:
        raise np.linalg.LinAlgError(f"matrix is singular mod {p}")
    return x


def rowprod(xs, zs, phases, xpow, zpow, d: int):
    """Dispatching wrapper over the row-product kernels (see _rowprod_py)."""
    args = (_as_i64(xs), _as_i64(zs), _as_i64(phases),
            _as_i64(xpow), _as_i64(zpow), d)
    if _USE_NUMBA:
        return _rowprod_nb(*args)
    return _rowprod_py(*args)
