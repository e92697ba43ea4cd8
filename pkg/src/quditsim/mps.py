"""Matrix-product-state simulator for chains of prime-dimensional qudits.

The state is stored as a list of rank-3 tensors with legs (left bond,
physical, right bond) and a single orthogonality center: every tensor left
of the center is left-orthonormal, every tensor right of it is
right-orthonormal.  Two-site updates split the pair tensor with an SVD and
truncate under a :class:`TruncationPolicy`; the discarded weight is returned
to the caller.  The state is renormalized after every public operation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .pauli import DENSE_DIM_GUARD, PauliSum, QuditDim, site_matrix

__all__ = [
    "TruncationPolicy",
    "Mps",
    "PauliMpo",
    "mps_model_bytes",
    "robust_svd",
]

_UNITARY_TOL = 1e-10
_NORM_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond-truncation rule: keep at most chi_max singular values and drop
    any with sigma/sigma_max below the relative cutoff."""

    chi_max: int | None = None
    cutoff: float = 1e-12

    def __post_init__(self):
        if self.chi_max is not None and int(self.chi_max) < 1:
            raise ValueError("chi_max must be at least 1")
        if not 0.0 <= self.cutoff < 1.0:
            raise ValueError("cutoff must lie in [0, 1)")


def robust_svd(mat, compute_uv=True):
    """SVD that survives gesdd non-convergence.

    LAPACK's fast divide-and-conquer driver can fail on the flat, highly
    degenerate spectra stabilizer states produce; the slower gesvd driver
    handles them, so it serves as the fallback.
    """
    try:
        if compute_uv:
            return np.linalg.svd(mat, full_matrices=False)
        return np.linalg.svd(mat, compute_uv=False)
    except np.linalg.LinAlgError:
        from scipy.linalg import svd as _scipy_svd

        if compute_uv:
            return _scipy_svd(mat, full_matrices=False, lapack_driver="gesvd")
        return _scipy_svd(mat, compute_uv=False, lapack_driver="gesvd")


def _swap_matrix(d):
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            m[j * d + i, i * d + j] = 1.0
    return m


def _transpose_pair_legs(u, d):
    # reorder a two-site operator so its legs follow (second, first)
    return (
        np.asarray(u)
        .reshape(d, d, d, d)
        .transpose(1, 0, 3, 2)
        .reshape(d * d, d * d)
    )


def _warn_if_not_unitary(u, label):
    dev = np.abs(u @ u.conj().T - np.eye(u.shape[0])).max()
    if dev > _UNITARY_TOL:
        warnings.warn(
            f"{label} deviates from unitarity by {dev:.3g}", stacklevel=3
        )


class Mps:
    """Qudit chain in mixed-canonical form."""

    __slots__ = ("d", "n", "tensors", "center", "policy")

    def __init__(self, d, tensors, center=0, policy=None):
        self.d = QuditDim(d)
        self.n = len(tensors)
        if self.n < 1:
            raise ValueError("chain needs at least one site")
        for i, t in enumerate(tensors):
            if t.ndim != 3 or t.shape[1] != self.d:
                raise ValueError(f"tensor {i} is not (chi, d, chi)")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for i in range(self.n - 1):
            if tensors[i].shape[2] != tensors[i + 1].shape[0]:
                raise ValueError(f"bond mismatch between sites {i} and {i+1}")
        if not 0 <= center < self.n:
            raise ValueError("center out of range")
        self.tensors = [np.ascontiguousarray(t, dtype=np.complex128) for t in tensors]
        self.center = int(center)
        self.policy = policy if policy is not None else TruncationPolicy()

    @classmethod
    def product_state(cls, n, d, digits=None, policy=None):
        d = QuditDim(d)
        if digits is None:
            digits = [0] * n
        digits = [int(x) for x in digits]
        if len(digits) != n:
            raise ValueError("digit string length must equal the site count")
        tensors = []
        for x in digits:
            if not 0 <= x < d:
                raise ValueError(f"digit {x} out of range for dimension {d}")
            t = np.zeros((1, d, 1), dtype=np.complex128)
            t[0, x, 0] = 1.0
            tensors.append(t)
        return cls(d, tensors, center=0, policy=policy)

    def copy(self):
        out = Mps.__new__(Mps)
        out.d = self.d
        out.n = self.n
        out.tensors = [t.copy() for t in self.tensors]
        out.center = self.center
        out.policy = self.policy
        return out

    # ------------------------------------------------------------------
    # observers

    def bond_dims(self):
        return [self.tensors[i].shape[2] for i in range(self.n - 1)]

    def norm(self):
        e = np.ones((1, 1), dtype=np.complex128)
        for t in self.tensors:
            e = np.einsum("xy,xsp,ysq->pq", e, t.conj(), t)
        return float(np.sqrt(abs(e[0, 0].real)))

    def amplitude(self, digits):
        digits = [int(x) for x in digits]
        if len(digits) != self.n:
            raise ValueError("digit string length must equal the site count")
        v = np.ones(1, dtype=np.complex128)
        for i, x in enumerate(digits):
            if not 0 <= x < self.d:
                raise ValueError(f"digit {x} out of range for dimension {self.d}")
            v = v @ self.tensors[i][:, x, :]
        return complex(v[0])

    def to_dense(self, max_dim=DENSE_DIM_GUARD):
        dim = self.d**self.n
        if dim > max_dim:
            raise ValueError(f"dense vector of size {dim} exceeds the guard {max_dim}")
        acc = np.ones((1, 1), dtype=np.complex128)
        for t in self.tensors:
            acc = np.tensordot(acc, t, axes=([1], [0])).reshape(-1, t.shape[2])
        return acc.reshape(-1)

    def schmidt_spectrum(self, bond):
        """Singular values across the cut with `bond` sites on the left."""
        if not 1 <= bond <= self.n - 1:
            raise ValueError("bond must lie strictly inside the chain")
        self.move_center(bond - 1)
        t = self.tensors[bond - 1]
        l, d_, r = t.shape
        return robust_svd(t.reshape(l * d_, r), compute_uv=False)

    def entanglement_entropy(self, bond):
        s = self.schmidt_spectrum(bond)
        p = s * s
        p = p[p > 1e-300]
        return float(-(p * np.log(p)).sum())

    def canonical_ok(self, tol=1e-10):
        for i in range(self.center):
            t = self.tensors[i]
            g = np.einsum("lsr,lsq->rq", t.conj(), t)
            if np.abs(g - np.eye(t.shape[2])).max() > tol:
                return False
        for i in range(self.center + 1, self.n):
            t = self.tensors[i]
            g = np.einsum("lsr,qsr->lq", t, t.conj())
            if np.abs(g - np.eye(t.shape[0])).max() > tol:
                return False
        return True

    # ------------------------------------------------------------------
    # canonical-form plumbing

    def _push_right(self, i):
        t = self.tensors[i]
        l, d_, r = t.shape
        q, rr = np.linalg.qr(t.reshape(l * d_, r))
        self.tensors[i] = q.reshape(l, d_, q.shape[1])
        self.tensors[i + 1] = np.tensordot(rr, self.tensors[i + 1], axes=([1], [0]))
        self.center = i + 1

    def _push_left(self, i):
        t = self.tensors[i]
        l, d_, r = t.shape
        q, rr = np.linalg.qr(t.reshape(l, d_ * r).conj().T)
        self.tensors[i] = q.conj().T.reshape(q.shape[1], d_, r)
        self.tensors[i - 1] = np.tensordot(
            self.tensors[i - 1], rr.conj().T, axes=([2], [0])
        )
        self.center = i - 1

    def move_center(self, site):
        if not 0 <= site < self.n:
            raise ValueError("center target out of range")
        while self.center < site:
            self._push_right(self.center)
        while self.center > site:
            self._push_left(self.center)

    def _select_rank(self, s):
        total = float(s @ s)
        if s.size == 0:
            raise np.linalg.LinAlgError("empty singular spectrum")
        keep = s > (self.policy.cutoff * s[0])
        k = max(int(np.count_nonzero(keep)), 1)
        if self.policy.chi_max is not None:
            k = min(k, self.policy.chi_max)
        kept = float(s[:k] @ s[:k])
        return max(total - kept, 0.0), k

    def _split_pair(self, i, theta):
        l, d1, d2, r = theta.shape
        u, s, vh = robust_svd(theta.reshape(l * d1, d2 * r))
        err, k = self._select_rank(s)
        bond = i + 1
        cap = self.d ** min(bond, self.n - bond)
        assert k <= cap, "bond grew past the structural ceiling"
        su = s[:k] / np.linalg.norm(s[:k])
        self.tensors[i] = u[:, :k].reshape(l, d1, k)
        self.tensors[i + 1] = (su[:, None] * vh[:k]).reshape(k, d2, r)
        self.center = i + 1
        return err

    # ------------------------------------------------------------------
    # gates

    def apply_single_site(self, site, u):
        if not 0 <= site < self.n:
            raise ValueError("site out of range")
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (self.d, self.d):
            raise ValueError("operator must be d x d")
        _warn_if_not_unitary(u, "single-site operator")
        self.tensors[site] = np.einsum("ab,lbr->lar", u, self.tensors[site])
        return 0.0

    def apply_two_site(self, left_site, u):
        """Apply a two-site operator to (left_site, left_site + 1).

        Operator legs follow (left site, right site) in row-major order.
        Returns the discarded Schmidt weight, i.e. 1 - |psi|^2 before the
        kept spectrum is renormalized.
        """
        i = int(left_site)
        if not 0 <= i < self.n - 1:
            raise ValueError("left_site out of range")
        d = self.d
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (d * d, d * d):
            raise ValueError("operator must be d^2 x d^2")
        _warn_if_not_unitary(u, "two-site operator")
        self.move_center(i)
        theta = np.tensordot(self.tensors[i], self.tensors[i + 1], axes=([2], [0]))
        theta = np.tensordot(
            u.reshape(d, d, d, d), theta, axes=([2, 3], [1, 2])
        ).transpose(2, 0, 1, 3)
        return self._split_pair(i, theta)

    def apply_unitary(self, u, sites):
        """Route an operator onto arbitrary sites.

        Non-adjacent pairs are handled with a swap network: the right site is
        moved next to the left one with adjacent swaps, the gate is applied,
        and the swaps are undone.  Returns accumulated truncation error.
        """
        sites = [int(s) for s in sites]
        if len(sites) == 1:
            return self.apply_single_site(sites[0], u)
        if len(sites) != 2:
            raise ValueError("only one- and two-site operators are supported")
        a, b = sites
        if a == b:
            raise ValueError("sites must be distinct")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise ValueError("site out of range")
        if a > b:
            u = _transpose_pair_legs(u, self.d)
            a, b = b, a
        if b == a + 1:
            return self.apply_two_site(a, u)
        sw = _swap_matrix(self.d)
        err = 0.0
        for k in range(b - 1, a, -1):
            err += self.apply_two_site(k, sw)
        err += self.apply_two_site(a, u)
        for k in range(a + 1, b):
            err += self.apply_two_site(k, sw)
        return err

    # ------------------------------------------------------------------
    # operator sums

    def apply_pauli_sum(self, ps):
        """Apply a Pauli operator sum, which must be unitary as a whole.

        A single term is routed through plain single-site gates.  A k-term
        sum is contracted as an MPO of bond dimension k and then compressed;
        a norm drift beyond 1e-8 reports a non-unitary sum.
        """
        if not isinstance(ps, PauliSum):
            raise TypeError("expected a PauliSum")
        if ps.d != self.d or ps.n_sites != self.n:
            raise ValueError("operator does not match the chain")
        if len(ps) == 0:
            raise ValueError("empty operator sum")
        if len(ps) == 1:
            c, p = ps.terms[0]
            if abs(abs(c) - 1.0) > _NORM_DRIFT_TOL:
                raise ValueError("single-term sum is not unitary")
            for i in range(self.n):
                xi, zi = int(p.x[i]), int(p.z[i])
                if xi or zi:
                    self.apply_single_site(i, site_matrix(self.d, xi, zi))
            self.tensors[self.center] = self.tensors[self.center] * c
            return 0.0
        return self._apply_mpo(PauliMpo(ps))

    def _apply_mpo(self, mpo):
        for i in range(self.n):
            w = mpo.tensors[i]
            t = self.tensors[i]
            x = np.tensordot(w, t, axes=([2], [1])).transpose(0, 3, 1, 2, 4)
            a_, l_, s_, b_, r_ = x.shape
            self.tensors[i] = np.ascontiguousarray(x).reshape(a_ * l_, s_, b_ * r_)
        self.center = 0
        return self._compress_full()

    def _compress_full(self):
        n = self.n
        self.center = 0
        for i in range(n - 1):
            self._push_right(i)
        nrm = float(np.linalg.norm(self.tensors[n - 1]))
        if abs(nrm - 1.0) > _NORM_DRIFT_TOL:
            raise ValueError(f"operator sum is not unitary: norm drifted to {nrm:.6g}")
        self.tensors[n - 1] = self.tensors[n - 1] / nrm
        err = 0.0
        for i in range(n - 1, 0, -1):
            err += self._truncate_left(i)
        return err

    def _truncate_left(self, i):
        t = self.tensors[i]
        l, d_, r = t.shape
        u, s, vh = robust_svd(t.reshape(l, d_ * r))
        err, k = self._select_rank(s)
        cap = self.d ** min(i, self.n - i)
        assert k <= cap, "bond grew past the structural ceiling"
        su = s[:k] / np.linalg.norm(s[:k])
        self.tensors[i] = vh[:k].reshape(k, d_, r)
        carry = u[:, :k] * su[None, :]
        self.tensors[i - 1] = np.tensordot(self.tensors[i - 1], carry, axes=([2], [0]))
        self.center = i - 1
        return err

    def expectation_mpo(self, mpo):
        if mpo.d != self.d or mpo.n != self.n:
            raise ValueError("operator does not match the chain")
        e = np.ones((1, 1, 1), dtype=np.complex128)
        for i in range(self.n):
            e = np.einsum(
                "xay,xtp,atsb,ysq->pbq",
                e,
                self.tensors[i].conj(),
                mpo.tensors[i],
                self.tensors[i],
                optimize=True,
            )
        return complex(e[0, 0, 0])


class PauliMpo:
    """MPO form of a Pauli operator sum.

    Bond dimension equals the term count; the bond index selects the term at
    every site (diagonal structure) and the scalar coefficients sit in the
    site-0 tensor.  Tensor legs are (bond, out, in, bond).
    """

    __slots__ = ("d", "n", "bond", "tensors")

    def __init__(self, ps):
        if not isinstance(ps, PauliSum):
            raise TypeError("expected a PauliSum")
        k = len(ps)
        if k == 0:
            raise ValueError("empty operator sum")
        self.d = ps.d
        self.n = ps.n_sites
        self.bond = k
        d, n = self.d, self.n
        mats = [
            [site_matrix(d, int(p.x[i]), int(p.z[i])) for i in range(n)]
            for _, p in ps.terms
        ]
        coeffs = [c for c, _ in ps.terms]
        if n == 1:
            w = np.zeros((1, d, d, 1), dtype=np.complex128)
            for c, row in zip(coeffs, mats):
                w[0, :, :, 0] += c * row[0]
            self.tensors = [w]
            return
        tensors = []
        first = np.zeros((1, d, d, k), dtype=np.complex128)
        for m in range(k):
            first[0, :, :, m] = coeffs[m] * mats[m][0]
        tensors.append(first)
        for i in range(1, n - 1):
            w = np.zeros((k, d, d, k), dtype=np.complex128)
            for m in range(k):
                w[m, :, :, m] = mats[m][i]
            tensors.append(w)
        last = np.zeros((k, d, d, 1), dtype=np.complex128)
        for m in range(k):
            last[m, :, :, 0] = mats[m][n - 1]
        tensors.append(last)
        self.tensors = tensors

    def to_matrix(self, max_dim=DENSE_DIM_GUARD):
        dim = self.d**self.n
        if dim > max_dim:
            raise ValueError(f"dense operator of size {dim} exceeds the guard {max_dim}")
        acc = self.tensors[0][0]  # (out, in, bond)
        for w in self.tensors[1:]:
            x = np.tensordot(acc, w, axes=([2], [0]))  # (O, I, s, t, b)
            o, i_, s, t, b = x.shape
            acc = x.transpose(0, 2, 1, 3, 4).reshape(o * s, i_ * t, b)
        return acc[:, :, 0]


def mps_model_bytes(chi, d):
    """Memory model at 16 bytes per stored amplitude for a bond profile."""
    dims = [1] + [int(c) for c in chi] + [1]
    return sum(16 * int(d) * dims[i] * dims[i + 1] for i in range(len(dims) - 1))
