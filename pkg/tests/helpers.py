"""Independent dense oracles shared by the test modules.

Everything here is built from first principles (np.roll / np.diag / kron)
without calling the package's own realization code, so package bugs cannot
cancel out in comparisons.
"""

import numpy as np


def dense_shift(d):
    """X|j> = |j+1 mod d> as a permutation matrix."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def dense_clock(d):
    """Z = diag(omega**j)."""
    w = np.exp(2j * np.pi / d)
    return np.diag(w ** np.arange(d))


def dense_pauli(d, x, z, phase=0):
    """tau**phase * kron_i X**x[i] Z**z[i], site 0 on the left factor."""
    m = np.eye(1, dtype=complex)
    for xi, zi in zip(x, z):
        sx = np.linalg.matrix_power(dense_shift(d), int(xi) % d)
        sz = np.linalg.matrix_power(dense_clock(d), int(zi) % d)
        m = np.kron(m, sx @ sz)
    tau = np.exp(1j * np.pi / d)
    return tau ** (phase % (2 * d)) * m


def random_pauli_exponents(rng, d, n):
    x = rng.integers(0, d, size=n)
    z = rng.integers(0, d, size=n)
    phase = int(rng.integers(0, 2 * d))
    return x, z, phase


def random_unitary(rng, dim):
    """Haar-ish unitary via QR of a complex Gaussian matrix."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed_single(u, site, n, d):
    """I x ... x u x ... x I with u at the given site."""
    mats = [np.eye(d, dtype=complex)] * n
    mats[site] = u
    return kron_all(mats)


def embed_gate(u, sites, n, d):
    """Embed a 1- or 2-site operator into an n-site register.

    The operator's tensor legs follow the order of `sites`, so a controlled
    gate with the control on its first leg lands control-first regardless of
    whether the site indices ascend.
    """
    sites = list(sites)
    k = len(sites)
    g = np.asarray(u, dtype=complex).reshape([d] * (2 * k))
    t = np.eye(d ** n, dtype=complex).reshape([d] * (2 * n))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), sites))
    rest = [ax for ax in range(n) if ax not in sites]
    src = [0] * n
    for j, s in enumerate(sites):
        src[s] = j
    for r, s in enumerate(rest):
        src[s] = k + r
    t = np.transpose(t, src + list(range(n, 2 * n)))
    return t.reshape(d ** n, d ** n)


def sum_permutation(n, d, c, t):
    """SUM(c, t) on n sites as an explicit basis permutation."""
    dim = d ** n
    m = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        digits = [(idx // d ** (n - 1 - s)) % d for s in range(n)]
        digits[t] = (digits[t] + digits[c]) % d
        out = sum(v * d ** (n - 1 - s) for s, v in enumerate(digits))
        m[out, idx] = 1.0
    return m


def dense_word_unitary(word, n, d):
    """Dense unitary of a Clifford word applied circuit-style."""
    from quditsim.gates import gate_unitary

    u = np.eye(d ** n, dtype=complex)
    for g in word:
        u = embed_gate(gate_unitary(g, d), g.sites, n, d) @ u
    return u


def random_clifford_gates(rng, n, d, length):
    """Plain generator-word sampler for oracle tests (package-independent)."""
    from quditsim.gates import gate

    pool = [("H", 1), ("S", 1), ("SUM", 2)] if n > 1 else [("H", 1), ("S", 1)]
    out = []
    for _ in range(length):
        kind, arity = pool[rng.integers(0, len(pool))]
        if arity == 1:
            out.append(gate(kind, int(rng.integers(0, n))))
        else:
            a = int(rng.integers(0, n))
            b = int(rng.integers(0, n - 1))
            b = b + 1 if b >= a else b
            out.append(gate("SUM", a, b))
    return out
