"""Heisenberg-picture descriptor simulation with a state-vector oracle."""

from .algebra import SystemLayout, conjugate, haar_unitary, tensor_embed
from .circuit import Circuit, CircuitFile, load_circuit_file, parse_circuit_file
from .config import TOL
from .descriptors import (
    DescriptorFrame,
    evolve_global,
    evolve_step,
    expectation,
    init_frame,
    locality_audit,
    make_event,
    reconstruct_density,
    recover_unitary,
    run_circuit,
)
from .gates import gate
from .pauli import PauliSum, PauliWord, pauli_decompose, pauli_eval
from .pictures import (
    NoumenalClassQuery,
    SchrodingerState,
    born_expectation,
    instrumental_equivalence_check,
    noninjectivity_witness,
    projective_equal,
    same_noumenal_class,
    schrodinger_run,
)
from .protocols import chsh_game, local_branching_demo, superdense_coding, teleportation

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "SystemLayout",
    "conjugate",
    "haar_unitary",
    "tensor_embed",
    "Circuit",
    "CircuitFile",
    "load_circuit_file",
    "parse_circuit_file",
    "DescriptorFrame",
    "evolve_global",
    "evolve_step",
    "expectation",
    "init_frame",
    "locality_audit",
    "make_event",
    "reconstruct_density",
    "recover_unitary",
    "run_circuit",
    "gate",
    "PauliSum",
    "PauliWord",
    "pauli_decompose",
    "pauli_eval",
    "NoumenalClassQuery",
    "SchrodingerState",
    "born_expectation",
    "instrumental_equivalence_check",
    "noninjectivity_witness",
    "projective_equal",
    "same_noumenal_class",
    "schrodinger_run",
    "chsh_game",
    "local_branching_demo",
    "superdense_coding",
    "teleportation",
]
