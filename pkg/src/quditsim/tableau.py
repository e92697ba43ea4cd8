"""Qudit stabilizer tableau: a Clifford C held as conjugation images.

Row i (0 <= i < n) stores C Z_i C^dagger, row n+i stores C X_i C^dagger,
each as a full PauliString with its own tau-exponent phase. Gate updates
substitute generator images per site; every phase is produced by explicit
string multiplication, never by a precomputed phase polynomial, so the
even/odd-d case split cannot creep in as a bug source.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from . import kernels
from .gates import ONE_SITE_KINDS, CliffordGate
from .pauli import PauliString, QuditDim

# (kind, d) -> exponent/phase lookup arrays, built lazily
_IMAGE_CACHE: dict = {}


def _base_images(kind: str, d: int):
    """Conjugation images g P g^dagger of the generator Paulis.

    One-site kinds return (image of X, image of Z) on a one-site register;
    SUM kinds return images of (X_c, Z_c, X_t, Z_t) on a two-site register
    with site 0 as the control. The even-d phase gate picks up the odd tau
    exponent that makes Y = tau X Z unitary of order 2d.
    """
    P = PauliString
    eps = 1 if d % 2 == 0 else 0
    if kind == "H":
        return P(d, [0], [1]), P(d, [d - 1], [0])
    if kind == "H_inv":
        return P(d, [0], [d - 1]), P(d, [1], [0])
    if kind == "S":
        return P(d, [1], [1], eps), P(d, [0], [1])
    if kind == "S_inv":
        return P(d, [1], [d - 1], -eps), P(d, [0], [1])
    if kind == "X":
        return P(d, [1], [0]), P(d, [0], [1], 2 * d - 2)
    if kind == "Z":
        return P(d, [1], [0], 2), P(d, [0], [1])
    if kind == "SUM":
        return (P(d, [1, 1], [0, 0]), P(d, [0, 0], [1, 0]),
                P(d, [0, 1], [0, 0]), P(d, [0, 0], [d - 1, 1]))
    if kind == "SUM_inv":
        return (P(d, [1, d - 1], [0, 0]), P(d, [0, 0], [1, 0]),
                P(d, [0, 1], [0, 0]), P(d, [0, 0], [1, 1]))
    raise ValueError(f"unknown gate kind {kind!r}")


def _image_tables(kind: str, d: int):
    """Lookup tables mapping per-site exponents to their conjugated images.

    Built once per (kind, d) by multiplying out powers of the generator
    images, so the phase column is exact by construction.
    """
    key = (kind, d)
    hit = _IMAGE_CACHE.get(key)
    if hit is not None:
        return hit
    if kind in ONE_SITE_KINDS:
        gx, gz = _base_images(kind, d)
        xo = np.empty((d, d), dtype=np.int64)
        zo = np.empty((d, d), dtype=np.int64)
        po = np.empty((d, d), dtype=np.int64)
        for x in range(d):
            px = gx.power(x)
            for z in range(d):
                q = px * gz.power(z)
                xo[x, z] = q.x[0]
                zo[x, z] = q.z[0]
                po[x, z] = q.phase
        out = (xo, zo, po)
    else:
        gxc, gzc, gxt, gzt = _base_images(kind, d)
        shape = (d, d, d, d)
        xoc = np.empty(shape, dtype=np.int64)
        zoc = np.empty(shape, dtype=np.int64)
        xot = np.empty(shape, dtype=np.int64)
        zot = np.empty(shape, dtype=np.int64)
        po = np.empty(shape, dtype=np.int64)
        for xc, zc, xt, zt in product(range(d), repeat=4):
            q = gxc.power(xc) * gzc.power(zc) * gxt.power(xt) * gzt.power(zt)
            xoc[xc, zc, xt, zt] = q.x[0]
            zoc[xc, zc, xt, zt] = q.z[0]
            xot[xc, zc, xt, zt] = q.x[1]
            zot[xc, zc, xt, zt] = q.z[1]
            po[xc, zc, xt, zt] = q.phase
        out = (xoc, zoc, xot, zot, po)
    _IMAGE_CACHE[key] = out
    return out


class Tableau:
    """2n rows of exponents plus phases; see module docstring for layout."""

    __slots__ = ("d", "n", "xs", "zs", "phases")

    def __init__(self, d: int, n: int, xs, zs, phases):
        self.d = int(QuditDim(d))
        self.n = int(n)
        self.xs = np.asarray(xs, dtype=np.int64)
        self.zs = np.asarray(zs, dtype=np.int64)
        self.phases = np.asarray(phases, dtype=np.int64)
        if self.xs.shape != (2 * self.n, self.n) or self.zs.shape != self.xs.shape:
            raise ValueError("exponent blocks must have shape (2n, n)")
        if self.phases.shape != (2 * self.n,):
            raise ValueError("phase column must have shape (2n,)")

    def copy(self) -> "Tableau":
        return Tableau(self.d, self.n, self.xs.copy(), self.zs.copy(),
                       self.phases.copy())

    def row(self, r: int) -> PauliString:
        return PauliString(self.d, self.xs[r].copy(), self.zs[r].copy(),
                           int(self.phases[r]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Tableau) and self.d == other.d
                and self.n == other.n
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.zs, other.zs)
                and np.array_equal(self.phases, other.phases))

    # -- gate updates --------------------------------------------------------

    def apply_gate(self, g: CliffordGate) -> "Tableau":
        """Replace every row P by g P g^dagger (stored Clifford becomes gC)."""
        d = self.d
        if any(s >= self.n for s in g.sites):
            raise ValueError(f"gate sites {g.sites} exceed n={self.n}")
        if len(g.sites) == 1:
            s = g.sites[0]
            xo, zo, po = _image_tables(g.kind, d)
            x = self.xs[:, s].copy()
            z = self.zs[:, s].copy()
            self.xs[:, s] = xo[x, z]
            self.zs[:, s] = zo[x, z]
            self.phases = (self.phases + po[x, z]) % (2 * d)
        else:
            c, t = g.sites
            xoc, zoc, xot, zot, po = _image_tables(g.kind, d)
            xc = self.xs[:, c].copy()
            zc = self.zs[:, c].copy()
            xt = self.xs[:, t].copy()
            zt = self.zs[:, t].copy()
            self.xs[:, c] = xoc[xc, zc, xt, zt]
            self.zs[:, c] = zoc[xc, zc, xt, zt]
            self.xs[:, t] = xot[xc, zc, xt, zt]
            self.zs[:, t] = zot[xc, zc, xt, zt]
            self.phases = (self.phases + po[xc, zc, xt, zt]) % (2 * d)
        return self

    def apply_word(self, word) -> "Tableau":
        for g in word:
            self.apply_gate(g)
        return self

    # -- conjugation ---------------------------------------------------------

    def _check_shape(self, p: PauliString) -> None:
        if p.d != self.d or p.n_sites != self.n:
            raise ValueError("Pauli string shape does not match tableau")

    def conjugate_forward(self, p: PauliString) -> PauliString:
        """C p C^dagger via the ordered row product.

        Destabilizer rows realize the X exponents, stabilizer rows the Z
        exponents; p's own phase rides along as a scalar.
        """
        self._check_shape(p)
        x, z, ph = kernels.rowprod(self.xs, self.zs, self.phases,
                                   p.x, p.z, self.d)
        return PauliString(self.d, x, z, (ph + p.phase) % (2 * self.d))

    def conjugate_inverse(self, p: PauliString) -> PauliString:
        """C^dagger p C by solving the exponent system over Z_d.

        Gaussian elimination finds which row product reconstructs p's
        exponents; the product is then multiplied out explicitly and its
        phase compared with p's to fix the result's phase.
        """
        self._check_shape(p)
        vec = np.concatenate([p.x, p.z])
        sol = kernels.solve_mod(self.exponent_matrix(), vec, self.d)
        xpow, zpow = sol[:self.n], sol[self.n:]
        rx, rz, rph = kernels.rowprod(self.xs, self.zs, self.phases,
                                      xpow, zpow, self.d)
        if not (np.array_equal(rx, p.x) and np.array_equal(rz, p.z)):
            # solve_mod succeeded but the rows do not span: corrupted tableau
            raise np.linalg.LinAlgError("tableau rows do not span the Pauli group")
        return PauliString(self.d, xpow, zpow,
                           (p.phase - rph) % (2 * self.d))

    def right_multiply(self, word) -> "Tableau":
        """Compose on the right: stored C becomes C W for the word's unitary.

        Each basis image W B W^dagger is read off a fresh tableau for W and
        pushed through conjugate_forward. Rows W leaves untouched map to the
        current rows unchanged, which keeps short two-site words cheap.
        """
        w = identity_tableau(self.n, self.d)
        w.apply_word(word)
        n = self.n
        new_xs = self.xs.copy()
        new_zs = self.zs.copy()
        new_ph = self.phases.copy()
        eye = np.eye(n, dtype=np.int64)
        for r in range(2 * n):
            bx = eye[r - n] if r >= n else np.zeros(n, dtype=np.int64)
            bz = eye[r] if r < n else np.zeros(n, dtype=np.int64)
            if (w.phases[r] == 0 and np.array_equal(w.xs[r], bx)
                    and np.array_equal(w.zs[r], bz)):
                continue
            q = self.conjugate_forward(w.row(r))
            new_xs[r] = q.x
            new_zs[r] = q.z
            new_ph[r] = q.phase
        self.xs, self.zs, self.phases = new_xs, new_zs, new_ph
        return self

    # -- structure -----------------------------------------------------------

    def exponent_matrix(self) -> np.ndarray:
        """2n x 2n matrix over Z_d whose columns are the row exponent
        vectors (x over z), destabilizers first then stabilizers."""
        n = self.n
        m = np.empty((2 * n, 2 * n), dtype=np.int64)
        m[:n, :n] = self.xs[n:].T
        m[n:, :n] = self.zs[n:].T
        m[:n, n:] = self.xs[:n].T
        m[n:, n:] = self.zs[:n].T
        return m

    def commutation_matrix(self) -> np.ndarray:
        """Pairwise commutation exponents c(row_i, row_j) over Z_d."""
        return (self.zs @ self.xs.T - self.xs @ self.zs.T) % self.d

    def symplectic_ok(self) -> bool:
        """Rows commute except each stabilizer with its own destabilizer,
        where c(stab_i, destab_i) = 1 by the defining relation Z X = w X Z."""
        n, d = self.n, self.d
        want = np.zeros((2 * n, 2 * n), dtype=np.int64)
        want[:n, n:] = np.eye(n, dtype=np.int64)
        want[n:, :n] = (d - 1) * np.eye(n, dtype=np.int64)
        return np.array_equal(self.commutation_matrix(), want % d)

    def dump(self) -> str:
        """Debug dump: one `x-vector | z-vector | phase` line per row,
        stabilizers first, exact integers."""
        lines = []
        for r in range(2 * self.n):
            xs = " ".join(str(int(v)) for v in self.xs[r])
            zs = " ".join(str(int(v)) for v in self.zs[r])
            lines.append(f"{xs} | {zs} | {int(self.phases[r])}")
        return "\n".join(lines)


def identity_tableau(n: int, d: int) -> Tableau:
    """Tableau of the identity Clifford: row i = Z_i, row n+i = X_i."""
    d = int(QuditDim(d))
    if n < 1:
        raise ValueError("need at least one site")
    xs = np.zeros((2 * n, n), dtype=np.int64)
    zs = np.zeros((2 * n, n), dtype=np.int64)
    zs[:n] = np.eye(n, dtype=np.int64)
    xs[n:] = np.eye(n, dtype=np.int64)
    return Tableau(d, n, xs, zs, np.zeros(2 * n, dtype=np.int64))
