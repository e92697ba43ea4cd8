"""Benchmark harness: run circuits on any backend and record per-layer rows.

A layer boundary is every non-Clifford op; the trailing ops of a circuit
(or a circuit with no non-Clifford at all) close one final layer so every
run yields at least one row. Each row snapshots the bond profile right
after its boundary, the memory model recomputed from that profile, and the
wall time spent since the previous boundary.

Shot-level parallelism only: QSIM_THREADS caps the worker count, each
worker owns its shot end to end, and rows are emitted in deterministic
(backend, shot, layer) order regardless of completion order.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .circuits import Circuit, gate_matrix, t_doped_circuit
from .disentanglers import generate_catalog
from .gcamps import new_state
from .mps import Mps, TruncationPolicy, mps_model_bytes
from .statevector import DenseState

__all__ = [
    "BenchRecord",
    "CSV_HEADER",
    "bench_tdoped",
    "parse_csv_row",
    "run_on_backend",
    "worst_case_chi",
    "write_csv",
    "write_json",
    "BACKENDS",
]

CSV_HEADER = ("backend,d,n,shot,seed,layer,chi_max,chi_vector,"
              "mem_bytes,mem_worst_bytes,dt_seconds")
BACKENDS = ("gcamps", "mps", "statevector")

_RANK_TOL = 1e-12  # relative threshold for dense Schmidt ranks


@dataclass(frozen=True)
class BenchRecord:
    backend: str
    d: int
    n: int
    shot: int
    seed: int
    layer: int
    chi_max: int
    chi_vector: tuple
    mem_bytes: int
    mem_worst_bytes: int
    dt_seconds: float

    def csv_row(self) -> str:
        chi = "|".join(str(c) for c in self.chi_vector)
        return (f"{self.backend},{self.d},{self.n},{self.shot},{self.seed},"
                f"{self.layer},{self.chi_max},{chi},{self.mem_bytes},"
                f"{self.mem_worst_bytes},{self.dt_seconds:.6f}")


def parse_csv_row(line: str) -> BenchRecord:
    parts = line.strip().split(",")
    if len(parts) != 11:
        raise ValueError(f"expected 11 CSV fields, got {len(parts)}")
    chi = tuple(int(c) for c in parts[7].split("|")) if parts[7] else ()
    return BenchRecord(
        backend=parts[0], d=int(parts[1]), n=int(parts[2]),
        shot=int(parts[3]), seed=int(parts[4]), layer=int(parts[5]),
        chi_max=int(parts[6]), chi_vector=chi, mem_bytes=int(parts[8]),
        mem_worst_bytes=int(parts[9]), dt_seconds=float(parts[10]),
    )


def worst_case_chi(chi, d, n):
    """Pre-optimisation peak model: every bond grows by a factor d, capped
    by the structural ceiling d^min(b, n-b)."""
    return [min(c * d, d ** min(b, n - b))
            for b, c in zip(range(1, n), chi)]


def _record(backend, circ, shot, seed, layer, chi, dt) -> BenchRecord:
    chi = [int(c) for c in chi]
    worst = worst_case_chi(chi, circ.d, circ.n)
    return BenchRecord(
        backend=backend, d=circ.d, n=circ.n, shot=shot, seed=seed,
        layer=layer, chi_max=max(chi, default=1),
        chi_vector=tuple(chi),
        mem_bytes=mps_model_bytes(chi, circ.d),
        mem_worst_bytes=mps_model_bytes(worst, circ.d),
        dt_seconds=float(dt),
    )


def _boundary_flags(ops):
    """True at every index that closes a layer."""
    flags = [not op.is_clifford for op in ops]
    if ops and not flags[-1]:
        flags[-1] = True  # trailing Clifford block closes the last layer
    return flags


def _dense_ranks(state: DenseState):
    out = []
    for cut in range(1, state.n):
        s = state.schmidt_values(cut)
        out.append(int(np.count_nonzero(s > _RANK_TOL * s[0])))
    return out


def run_on_backend(backend, circ: Circuit, *, shot=0, seed=0, policy=None,
                   catalog=None, verify=False, max_dim=None):
    """Run one circuit on one backend; returns (records, final_state)."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if policy is None:
        policy = TruncationPolicy()
    records = []
    flags = _boundary_flags(circ.ops)
    layer = 0
    t0 = time.perf_counter()

    if backend == "gcamps":
        if catalog is None:
            catalog = _cached_catalog(circ.d)
        st = new_state(circ.n, circ.d, catalog, policy=policy, verify=verify)
        for op, boundary in zip(circ.ops, flags):
            st.apply_op(op)
            if boundary:
                layer += 1
                now = time.perf_counter()
                records.append(_record("gcamps", circ, shot, seed, layer,
                                       st.mps.bond_dims(), now - t0))
                t0 = now
        if not circ.ops:
            records.append(_record("gcamps", circ, shot, seed, 1,
                                   st.mps.bond_dims(),
                                   time.perf_counter() - t0))
        return records, st

    if backend == "mps":
        m = Mps.product_state(circ.n, circ.d, policy=policy)
        for op, boundary in zip(circ.ops, flags):
            m.apply_unitary(gate_matrix(op, circ.d), op.sites)
            if boundary:
                layer += 1
                now = time.perf_counter()
                records.append(_record("mps", circ, shot, seed, layer,
                                       m.bond_dims(), now - t0))
                t0 = now
        if not circ.ops:
            records.append(_record("mps", circ, shot, seed, 1, m.bond_dims(),
                                   time.perf_counter() - t0))
        return records, m

    kwargs = {} if max_dim is None else {"max_dim": max_dim}
    s = DenseState(circ.d, circ.n, **kwargs)
    for op, boundary in zip(circ.ops, flags):
        s.apply_unitary(gate_matrix(op, circ.d), op.sites)
        if boundary:
            layer += 1
            now = time.perf_counter()
            records.append(_record("statevector", circ, shot, seed, layer,
                                   _dense_ranks(s), now - t0))
            t0 = now
    if not circ.ops:
        records.append(_record("statevector", circ, shot, seed, 1,
                               _dense_ranks(s), time.perf_counter() - t0))
    return records, s


@lru_cache(maxsize=None)
def _cached_catalog(d):
    return generate_catalog(d)


def shot_seed(seed: int, shot: int) -> int:
    return seed * 1_000_003 + shot


def worker_count() -> int:
    raw = os.environ.get("QSIM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def bench_tdoped(d, sites, layers, shots, seed, backends=("gcamps", "mps"),
                 block_len=None, policy=None, catalog=None):
    """T-doped benchmark sweep; returns rows in (backend, shot, layer) order.

    block_len defaults to 2n here (not the circuit generator's 5n^2): the
    raw-MPS comparison backend pays per-gate tensor work at saturated bond
    dimension, and 2n keeps the sweep affordable while staying scrambling
    enough for the regime comparison. Pass a preloaded `catalog` to skip
    the cached in-process generation.
    """
    backends = tuple(backends)
    for b in backends:
        if b not in BACKENDS:
            raise ValueError(f"unknown backend {b!r}")
    if block_len is None:
        block_len = 2 * sites

    def one_shot(shot):
        circ = t_doped_circuit(sites, d, layers, rng_seed=shot_seed(seed, shot),
                               block_len=block_len)
        rows = {}
        for b in backends:
            recs, _ = run_on_backend(b, circ, shot=shot, seed=seed,
                                     policy=policy, catalog=catalog)
            rows[b] = recs
        return rows

    workers = min(worker_count(), int(shots))
    if workers > 1:
        if "gcamps" in backends and catalog is None:
            _cached_catalog(d)  # build once before the pool forks work
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_shot = list(pool.map(one_shot, range(shots)))
    else:
        per_shot = [one_shot(s) for s in range(shots)]

    out = []
    for b in backends:
        for rows in per_shot:
            out.extend(rows[b])
    return out


def write_csv(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def write_json(path, records):
    payload = [asdict(rec) | {"chi_vector": list(rec.chi_vector)}
               for rec in records]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
