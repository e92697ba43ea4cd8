"""Circuit IR: the universal gate set, a line-oriented text format, and the
random T-doped Clifford circuits the benchmark runs on.

Text format (bit-exact, LF endings):

    # qsim v1 d=<d> n=<n>
    # meta <key>=<value>        (optional, round-tripped)
    <NAME> <site> [<site2>] [<param>...]

Params are decimal floats printed with 17 significant digits so emit/parse
round-trips are exact. `#` starts a comment line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import CliffordGate, kind_unitary, swap_word
from .pauli import QuditDim

ONE_SITE_NAMES = ("H", "Hdg", "S", "Sdg", "X", "Z", "T", "Tdg", "RZ", "U1")
TWO_SITE_NAMES = ("SUM", "SUMdg", "SWAP")
GATE_NAMES = ONE_SITE_NAMES + TWO_SITE_NAMES
NON_CLIFFORD_NAMES = frozenset({"T", "Tdg", "RZ", "U1"})

_CLIFFORD_KIND = {"H": "H", "Hdg": "H_inv", "S": "S", "Sdg": "S_inv",
                  "X": "X", "Z": "Z", "SUM": "SUM", "SUMdg": "SUM_inv"}

_HEADER_PREFIX = "# qsim v1 "


class CircuitParseError(ValueError):
    """Raised with the offending line number in the message."""


@dataclass(frozen=True)
class GateOp:
    name: str
    sites: tuple
    params: tuple = ()

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate name {self.name!r}")
        sites = tuple(int(s) for s in self.sites)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "params", params)
        want = 2 if self.name in TWO_SITE_NAMES else 1
        if len(sites) != want:
            raise ValueError(f"{self.name} takes {want} site(s), got {len(sites)}")
        if any(s < 0 for s in sites):
            raise ValueError("site indices must be nonnegative")
        if want == 2 and sites[0] == sites[1]:
            raise ValueError(f"{self.name} sites must differ")
        if self.name == "RZ":
            if len(params) != 1:
                raise ValueError("RZ takes exactly one angle parameter")
        elif self.name == "U1":
            if not params:
                raise ValueError("U1 needs d diagonal phase parameters")
        elif params:
            raise ValueError(f"{self.name} takes no parameters")

    @property
    def is_clifford(self) -> bool:
        return self.name not in NON_CLIFFORD_NAMES


class Circuit:
    """Ordered gate list over n qudits of prime dimension d."""

    def __init__(self, n: int, d: int, ops=(), metadata=None):
        self.n = int(n)
        self.d = int(QuditDim(d))
        if self.n < 1:
            raise ValueError("need at least one site")
        self.ops = list(ops)
        self.metadata = dict(metadata or {})
        for op in self.ops:
            self._check_op(op)

    def _check_op(self, op: GateOp) -> None:
        if any(s >= self.n for s in op.sites):
            raise ValueError(f"{op.name} sites {op.sites} exceed n={self.n}")
        if op.name == "U1" and len(op.params) != self.d:
            raise ValueError(f"U1 needs {self.d} params, got {len(op.params)}")
        if op.name == "RZ" and self.d != 2:
            raise ValueError("RZ is defined for d=2 only")
        if op.name in ("T", "Tdg") and self.d not in (2, 3):
            raise ValueError("T gate matrices are defined for d in {2, 3}")

    def __eq__(self, other) -> bool:
        return (isinstance(other, Circuit) and self.n == other.n
                and self.d == other.d and self.ops == other.ops
                and self.metadata == other.metadata)

    def __repr__(self) -> str:
        return f"Circuit(n={self.n}, d={self.d}, ops={len(self.ops)})"


def _t_matrix(d: int) -> np.ndarray:
    if d == 2:
        return np.diag([1.0, np.exp(1j * np.pi / 4)])
    if d == 3:
        return np.diag([1.0, np.exp(1j * np.pi / 9), np.exp(8j * np.pi / 9)])
    raise ValueError("T gate matrices are defined for d in {2, 3}")


def gate_matrix(op: GateOp, d: int) -> np.ndarray:
    """Dense unitary of one op; two-site gates put the first listed site on
    the first tensor leg."""
    d = int(QuditDim(d))
    if op.name in _CLIFFORD_KIND:
        return kind_unitary(_CLIFFORD_KIND[op.name], d)
    if op.name == "SWAP":
        m = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                m[j * d + i, i * d + j] = 1.0
        return m
    if op.name == "T":
        return _t_matrix(d)
    if op.name == "Tdg":
        return _t_matrix(d).conj().T
    if op.name == "RZ":
        if d != 2:
            raise ValueError("RZ is defined for d=2 only")
        th = op.params[0]
        return np.diag([np.exp(-0.5j * th), np.exp(0.5j * th)])
    if op.name == "U1":
        if len(op.params) != d:
            raise ValueError(f"U1 needs {d} params, got {len(op.params)}")
        return np.diag(np.exp(1j * np.asarray(op.params)))
    raise ValueError(f"unknown gate name {op.name!r}")


def as_clifford_word(op: GateOp) -> list:
    """Clifford ops as generator-gate words; SWAP expands to its identity."""
    if op.name in _CLIFFORD_KIND:
        return [CliffordGate(_CLIFFORD_KIND[op.name], op.sites)]
    if op.name == "SWAP":
        return swap_word(*op.sites)
    raise ValueError(f"{op.name} is not a Clifford op")


# -- text format ---------------------------------------------------------------


def emit(circuit: Circuit) -> str:
    lines = [f"# qsim v1 d={circuit.d} n={circuit.n}"]
    for k in sorted(circuit.metadata):
        lines.append(f"# meta {k}={circuit.metadata[k]}")
    for op in circuit.ops:
        parts = [op.name] + [str(s) for s in op.sites]
        parts += [f"{p:.17g}" for p in op.params]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse(text: str) -> Circuit:
    lines = text.splitlines()
    header_seen = False
    n = d = 0
    ops = []
    metadata = {}
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if not header_seen:
            if not line.startswith(_HEADER_PREFIX):
                raise CircuitParseError(
                    f"line {ln}: expected header '# qsim v1 d=<d> n=<n>'")
            try:
                fields = dict(tok.split("=", 1) for tok in
                              line[len(_HEADER_PREFIX):].split())
                d = int(fields["d"])
                n = int(fields["n"])
            except (KeyError, ValueError):
                raise CircuitParseError(f"line {ln}: malformed header {line!r}")
            try:
                QuditDim(d)
            except ValueError as e:
                raise CircuitParseError(f"line {ln}: {e}")
            header_seen = True
            continue
        if line.startswith("# meta "):
            body = line[len("# meta "):]
            if "=" not in body:
                raise CircuitParseError(f"line {ln}: malformed metadata {line!r}")
            k, v = body.split("=", 1)
            metadata[k] = v
            continue
        if line.startswith("#"):
            continue
        toks = line.split()
        name = toks[0]
        if name not in GATE_NAMES:
            raise CircuitParseError(f"line {ln}: unknown gate name {name!r}")
        n_sites = 2 if name in TWO_SITE_NAMES else 1
        site_toks = toks[1:1 + n_sites]
        param_toks = toks[1 + n_sites:]
        try:
            sites = tuple(int(t) for t in site_toks)
        except ValueError:
            raise CircuitParseError(f"line {ln}: bad site token in {line!r}")
        if len(sites) != n_sites:
            raise CircuitParseError(f"line {ln}: {name} needs {n_sites} site(s)")
        try:
            params = tuple(float(t) for t in param_toks)
        except ValueError:
            raise CircuitParseError(f"line {ln}: bad parameter token in {line!r}")
        try:
            op = GateOp(name, sites, params)
        except ValueError as e:
            raise CircuitParseError(f"line {ln}: {e}")
        if any(s >= n for s in sites):
            raise CircuitParseError(f"line {ln}: site out of range for n={n}")
        ops.append(op)
    if not header_seen:
        raise CircuitParseError("line 1: empty input, header missing")
    try:
        return Circuit(n, d, ops, metadata)
    except ValueError as e:
        raise CircuitParseError(str(e))


# -- random circuits --------------------------------------------------------------


def _word_pool(n: int) -> list:
    pool = [("H", (i,)) for i in range(n)] + [("S", (i,)) for i in range(n)]
    pool += [("SUM", (a, b)) for a in range(n) for b in range(n) if a != b]
    return pool


def _sample_word(rng, n: int, length: int) -> list:
    pool = _word_pool(n)
    picks = rng.integers(0, len(pool), size=int(length))
    return [CliffordGate(kind, sites) for kind, sites in (pool[int(i)] for i in picks)]


def random_clifford_word(n: int, d: int, length=None, rng_seed=0) -> list:
    """Uniform i.i.d. generator word over {H_i, S_i} U {SUM_ab, a != b}.

    Not a uniform draw over the Clifford group; long words mix well enough
    for benchmarking, and the length knob is exposed. Default 5n^2.
    """
    int(QuditDim(d))
    if length is None:
        length = 5 * n * n
    if length < 1:
        raise ValueError("word length must be >= 1")
    return _sample_word(np.random.default_rng(rng_seed), n, length)


def t_doped_circuit(n: int, d: int, layers: int, rng_seed=0,
                    block_len=None) -> Circuit:
    """layers x (random Clifford block, then T on site 0).

    The number of T gates equals `layers`. block_len defaults to the
    random_clifford_word default.
    """
    d = int(QuditDim(d))
    if layers < 1:
        raise ValueError("need at least one layer")
    if block_len is None:
        block_len = 5 * n * n
    rng = np.random.default_rng(rng_seed)
    ops = []
    for _ in range(int(layers)):
        for g in _sample_word(rng, n, block_len):
            ops.append(GateOp(g.kind, g.sites))
        ops.append(GateOp("T", (0,)))
    meta = {"kind": "t-doped", "seed": str(rng_seed),
            "layers": str(layers), "block": str(block_len)}
    return Circuit(n, d, ops, meta)
