"""quditsim: classical simulation of prime-dimensional qudit circuits.

Backends: generalized stabilizer tableau, qudit matrix product states, and
the hybrid engine that keeps a Clifford tableau in front of an MPS and
absorbs entanglement through cataloged two-site disentanglers.
"""

__version__ = "0.1.0"

from .pauli import (  # noqa: F401
    PauliString,
    PauliSum,
    QuditDim,
    decompose_unitary,
)
