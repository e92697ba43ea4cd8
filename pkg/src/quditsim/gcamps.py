"""Hybrid simulator holding a Clifford frame C and an MPS: state = C|mps>.

Clifford gates touch only the tableau (zero tensor work). A non-Clifford
single-site unitary u runs the four-stage pipeline: expand u in the Pauli
basis, commute each term through C as u~ = C^dag u C (valid because
u C = C (C^dag u C)), apply the resulting operator sum to the MPS, then try
to push the created entanglement back into C by scanning the two-site
catalog at every affected bond. An accepted catalog gate Q moves the MPS to
Q|mps> while C absorbs the inverse, C <- C Q^dag, so the physical state
never changes.

The bond objective is lexicographic: first the number of singular values
above the policy cutoff (the truncated bond dimension), then the Renyi-2
entropy -ln(sum sigma^4) as a continuous tie-break. Only strictly better
candidates are accepted, so the objective never increases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import GateOp, as_clifford_word, gate_matrix
from .disentanglers import DisentanglerCatalog
from .gates import CliffordGate, gate_unitary, invert_word
from .mps import Mps, PauliMpo, TruncationPolicy, mps_model_bytes, robust_svd
from .pauli import DENSE_DIM_GUARD, PauliString, PauliSum, decompose_unitary
from .statevector import DenseState
from .tableau import identity_tableau

__all__ = [
    "GcampsState",
    "DisentangleReport",
    "GateLog",
    "new_state",
    "tableau_bytes",
]

_UNITARY_TOL = 1e-10
_TIE_EPS = 1e-12
_DEFAULT_PASS_LIMIT = 4


def tableau_bytes(n: int) -> int:
    """2n(2n+1) stored machine integers at 8 bytes each."""
    return 8 * 2 * n * (2 * n + 1)


@dataclass
class GateLog:
    """Chronological record of everything folded into C.

    C factors as L * R: circuit Cliffords compose on the left of C, absorbed
    disentangler inverses append on the right, and the two accumulations
    never interleave algebraically. Replay onto a vector therefore applies
    the absorbed words in reverse order first, then the circuit gates in
    order.
    """

    cliffords: list = field(default_factory=list)
    absorbed: list = field(default_factory=list)

    def copy(self):
        return GateLog(list(self.cliffords), list(self.absorbed))


@dataclass
class DisentangleReport:
    """Outcome of one disentangle run."""

    bonds_visited: list = field(default_factory=list)
    gates_applied: list = field(default_factory=list)  # (entry index, left site)
    objective_before: dict = field(default_factory=dict)
    objective_after: dict = field(default_factory=dict)
    early_termination: bool = False
    passes: int = 0


def _objective(s, cutoff):
    s2 = s * s
    total = float(s2.sum())
    if total <= 0.0:
        return (0, 0.0)
    rank = int(np.count_nonzero(s > cutoff * s[0]))
    p2 = float((s2 * s2).sum()) / (total * total)
    return (rank, float(-np.log(p2)))


def _better(a, b):
    return a[0] < b[0] or (a[0] == b[0] and a[1] < b[1] - _TIE_EPS)


class GcampsState:
    """Mutable C|mps> pair with a shared disentangler catalog."""

    __slots__ = ("tableau", "mps", "catalog", "gate_log")

    def __init__(self, tableau, mps, catalog, gate_log=None):
        if tableau.n != mps.n or tableau.d != mps.d:
            raise ValueError("tableau and MPS shapes disagree")
        if not isinstance(catalog, DisentanglerCatalog):
            raise TypeError("expected a DisentanglerCatalog")
        if catalog.d != mps.d:
            raise ValueError(
                f"catalog is for d={catalog.d}, state has d={mps.d}"
            )
        self.tableau = tableau
        self.mps = mps
        self.catalog = catalog
        self.gate_log = gate_log

    @property
    def d(self):
        return self.mps.d

    @property
    def n(self):
        return self.mps.n

    def copy(self):
        log = self.gate_log.copy() if self.gate_log is not None else None
        return GcampsState(
            self.tableau.copy(), self.mps.copy(), self.catalog, log
        )

    # ------------------------------------------------------------------
    # Clifford path: tableau only

    def apply_clifford(self, g: CliffordGate):
        self.tableau.apply_gate(g)
        if self.gate_log is not None:
            self.gate_log.cliffords.append(g)
        return self

    def apply_clifford_word(self, word):
        for g in word:
            self.apply_clifford(g)
        return self

    # ------------------------------------------------------------------
    # non-Clifford pipeline

    def apply_non_clifford(self, site, u) -> DisentangleReport:
        n, d = self.n, self.d
        site = int(site)
        if not 0 <= site < n:
            raise ValueError("site out of range")
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (d, d):
            raise ValueError("operator must be d x d")
        if np.abs(u @ u.conj().T - np.eye(d)).max() > _UNITARY_TOL:
            raise ValueError("operator is not unitary")
        local = decompose_unitary(u, d)
        terms = []
        for c, p1 in local.terms:
            embedded = PauliString.single(
                d, n, site, int(p1.x[0]), int(p1.z[0])
            )
            terms.append((c, self.tableau.conjugate_inverse(embedded)))
        commuted = PauliSum(d, n, terms)
        before = self.mps.bond_dims()
        self.mps.apply_pauli_sum(commuted)
        after = self.mps.bond_dims()
        changed = [b for b in range(n - 1) if before[b] != after[b]]
        if not changed:
            return DisentangleReport()
        return self.disentangle(
            window=(min(changed), max(changed) + 2), anchor=site
        )

    # ------------------------------------------------------------------
    # disentangling

    def disentangle(self, window=None, anchor=None,
                    pass_limit=_DEFAULT_PASS_LIMIT) -> DisentangleReport:
        n = self.n
        if window is None:
            window = (0, n)
        lo, hi = int(window[0]), int(window[1])
        if not (0 <= lo and hi <= n):
            raise ValueError("window out of range")
        report = DisentangleReport()
        bonds = list(range(max(lo, 0), hi - 1))
        if not bonds:
            return report
        mid = anchor if anchor is not None else (lo + hi - 1) / 2
        bonds.sort(key=lambda i: (abs(i + 0.5 - mid), i))
        accepted = 0
        while report.passes < pass_limit:
            report.passes += 1
            accepted = 0
            for i in bonds:
                accepted += self._optimize_bond(i, report)
            if accepted == 0:
                break
        report.early_termination = bool(
            report.passes == pass_limit and accepted > 0
        )
        return report

    def _optimize_bond(self, i, report) -> int:
        mps = self.mps
        d = self.d
        mps.move_center(i)
        theta = np.tensordot(mps.tensors[i], mps.tensors[i + 1], axes=([2], [0]))
        l, _, _, r = theta.shape
        cutoff = mps.policy.cutoff
        s0 = robust_svd(theta.reshape(l * d, d * r), compute_uv=False)
        current = _objective(s0, cutoff)
        report.bonds_visited.append(i)
        report.objective_before.setdefault(i, current)
        report.objective_after[i] = current
        if current[0] <= 1 and current[1] <= _TIE_EPS:
            return 0  # already product across this cut; nothing can beat it
        paired = theta.transpose(1, 2, 0, 3).reshape(d * d, l * r)
        best, best_idx = current, -1
        unitaries = self.catalog.unitaries()
        for idx, entry in enumerate(self.catalog.entries):
            if not entry.entangling:
                continue  # a local factor cannot change the spectrum
            y = (unitaries[idx] @ paired).reshape(d, d, l, r)
            y = y.transpose(2, 0, 1, 3).reshape(l * d, d * r)
            s = robust_svd(y, compute_uv=False)
            obj = _objective(s, cutoff)
            if _better(obj, best):
                best, best_idx = obj, idx
        if best_idx < 0:
            return 0
        entry = self.catalog.entries[best_idx]
        mps.apply_two_site(i, unitaries[best_idx])
        mapped = tuple(
            CliffordGate(g.kind, tuple(i + s_ for s_ in g.sites))
            for g in entry.word
        )
        inverse = tuple(invert_word(mapped, d))
        self.tableau.right_multiply(inverse)
        if self.gate_log is not None:
            self.gate_log.absorbed.append(inverse)
        report.gates_applied.append((best_idx, i))
        report.objective_after[i] = best
        return 1

    # ------------------------------------------------------------------
    # observables

    def expectation(self, sigma: PauliString) -> complex:
        if sigma.d != self.d or sigma.n_sites != self.n:
            raise ValueError("operator does not match the state")
        q = self.tableau.conjugate_inverse(sigma)
        mpo = PauliMpo(PauliSum(self.d, self.n, [(1.0, q)]))
        return self.mps.expectation_mpo(mpo)

    def hermitian_expectation(self, sigma: PauliString) -> float:
        # <(sigma + sigma^dag)/2> is the real part of <sigma>
        return float(self.expectation(sigma).real)

    # ------------------------------------------------------------------
    # accounting and verification

    def memory_estimate(self, worst_case: bool = False) -> int:
        chi = self.mps.bond_dims()
        if worst_case:
            n, d = self.n, self.d
            chi = [
                min(c * d, d ** min(b, n - b))
                for b, c in zip(range(1, n), chi)
            ]
        return mps_model_bytes(chi, self.d) + tableau_bytes(self.n)

    def dense_vector(self, max_dim: int = DENSE_DIM_GUARD) -> np.ndarray:
        """Contract the MPS and replay C onto it. Needs the gate log."""
        if self.gate_log is None:
            raise RuntimeError("dense replay requires verification mode")
        ref = DenseState(
            self.d, self.n, self.mps.to_dense(max_dim=max_dim), max_dim=max_dim
        )
        for word in reversed(self.gate_log.absorbed):
            for g in word:
                ref.apply_unitary(gate_unitary(g, self.d), g.sites)
        for g in self.gate_log.cliffords:
            ref.apply_unitary(gate_unitary(g, self.d), g.sites)
        return ref.amps.reshape(-1)

    # ------------------------------------------------------------------
    # circuit driver

    def apply_op(self, op: GateOp):
        """Route one circuit operation; returns a report for non-Cliffords."""
        if op.is_clifford:
            self.apply_clifford_word(as_clifford_word(op))
            return None
        return self.apply_non_clifford(op.sites[0], gate_matrix(op, self.d))


def new_state(n, d, catalog, policy=None, verify=False) -> GcampsState:
    """Fresh C|mps>: identity tableau over |0...0>."""
    if policy is None:
        policy = TruncationPolicy()
    mps = Mps.product_state(n, d, policy=policy)
    log = GateLog() if verify else None
    return GcampsState(identity_tableau(n, d), mps, catalog, log)
