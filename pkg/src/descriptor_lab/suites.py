"""Seeded property suites comparing the two pictures.

Each suite returns a report ``{check, seeds, metrics, pass, cases}``; the same
seed always gives the same report.
"""

from __future__ import annotations

import numpy as np

from .algebra import SystemLayout, haar_unitary, max_abs, tensor_embed
from .circuit import Circuit, random_circuit
from .config import TOL
from .descriptors import (
    evolve_global,
    evolve_step,
    frame_delta,
    init_frame,
    locality_audit,
    make_event,
    reconstruct_density,
    recover_unitary,
    run_circuit,
)
from .gates import GATE_NAMES, gate, gate_arity, gate_width
from .pauli import LETTERS, PauliSum, PauliWord, pauli_decompose
from .pictures import (
    NoumenalClassQuery,
    instrumental_equivalence_check,
    noninjectivity_witness,
    noumenal_class_report,
    projective_equal,
    schrodinger_run,
)

__all__ = [
    "SUITES",
    "run_suite",
    "random_observable",
    "phase_aligned_distance",
    "equivalence_suite",
    "step_global_suite",
    "locality_suite",
    "reconstruction_suite",
    "theorem1_suite",
    "recovery_suite",
    "noniso_suite",
    "QUBIT_GATES",
]

QUBIT_GATES = tuple(g for g in GATE_NAMES if g not in ("SHIFT", "CLOCK", "DFT"))

# gate, inverse-parameter rule; used to build pairs with identical dynamics
_INVERSE = {"H": "H", "X": "X", "Y": "Y", "Z": "Z", "S": "SDG", "SDG": "S", "T": "TDG",
            "TDG": "T", "CNOT": "CNOT", "CZ": "CZ", "SWAP": "SWAP"}


def _report(check: str, seed: int, cases: int, metrics: dict, passed: bool, rows: list) -> dict:
    return {"check": check, "seeds": {"seed": seed, "cases": cases}, "metrics": metrics,
            "pass": bool(passed), "cases": rows}


def random_observable(n: int, rng: np.random.Generator, max_terms: int = 3) -> PauliSum:
    """Hermitian Pauli sum with 1..max_terms random words and real coefficients."""
    k = int(rng.integers(1, max_terms + 1))
    terms = []
    for _ in range(k):
        letters = "".join(LETTERS[i] for i in rng.integers(0, 4, size=n))
        coeff = 1.0 if k == 1 else float(rng.uniform(-1, 1))
        terms.append((coeff, PauliWord(letters)))
    f = PauliSum(terms)
    return f if len(f) else PauliSum([(1.0, PauliWord("I" * n))])


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi max|a - e^{i phi} b|`` evaluated at the Frobenius-optimal phase."""
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return max_abs(a - phase * b)


def _random_gate(rng, n):
    names = [g for g in QUBIT_GATES if gate_width(g) <= n]
    name = names[rng.integers(len(names))]
    targets = [int(t) for t in rng.choice(n, size=gate_width(name), replace=False)]
    params = [float(p) for p in rng.uniform(-np.pi, np.pi, size=gate_arity(name))]
    return name, targets, params


def equivalence_suite(seed: int = 0, cases: int = 100, max_qubits: int = 5, max_gates: int = 20,
                      observables: int = 5) -> dict:
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for c in range(cases):
        n = int(rng.integers(1, max_qubits + 1))
        circuit = random_circuit(n, int(rng.integers(0, max_gates + 1)), rng)
        for _ in range(observables):
            obs = random_observable(n, rng)
            rep = instrumental_equivalence_check(circuit, obs)
            worst = max(worst, rep.max_difference)
            rows.append({"case": c, "qubits": n, "gates": len(circuit), "observable": obs.to_text(),
                         **rep.to_dict()})
    passed = all(r["pass"] for r in rows)
    return _report("equivalence", seed, cases, {"max_difference": worst, "checks": len(rows),
                                                 "tolerance": TOL.equivalence}, passed, rows)


def _random_frame(rng, n):
    return evolve_global(init_frame(SystemLayout.qubits(n)), haar_unitary(2 ** n, rng))


def step_global_suite(seed: int = 0, frames_per_gate: int = 3) -> dict:
    """Every library gate, stepped onto random frames, against global conjugation.

    The oracle conjugates the *initial* components by ``G V``, where ``V`` is
    the frame's history. Qudit gates have no step form; for them the row
    checks that a second global conjugation composes into one, on a layout
    with a qutrit and a ququart next to a qubit.
    """
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for name in GATE_NAMES:
        for _ in range(frames_per_gate):
            if name in QUBIT_GATES:
                n = int(rng.integers(max(2, gate_width(name)), 5))
                layout = SystemLayout.qubits(n)
                targets = [int(t) for t in rng.choice(n, size=gate_width(name), replace=False)]
            else:
                layout = SystemLayout([3, 2, 4])
                targets = [int(rng.choice([0, 2]))]
            frame = evolve_global(init_frame(layout), haar_unitary(layout.total_dim, rng))
            params = [float(p) for p in rng.uniform(-np.pi, np.pi, size=gate_arity(name))]
            local = gate(name, params, dim=layout.dims[targets[0]])
            g = tensor_embed(local, targets, layout)
            oracle = evolve_global(init_frame(layout), g @ frame.cumulative)
            if name in QUBIT_GATES:
                mode = "step"
                evolved = evolve_step(frame, make_event(name, targets, params, layout=layout))
            else:
                mode = "global"
                oracle = evolve_global(init_frame(layout), frame.cumulative @ g)
                evolved = evolve_global(frame, g)
            delta = frame_delta(evolved, oracle)
            worst = max(worst, delta)
            rows.append({"gate": name, "mode": mode, "dims": list(layout.dims), "targets": targets,
                         "params": params, "delta": delta, "pass": delta <= TOL.step_global})
    return _report("step_global", seed, len(rows), {"max_delta": worst, "gates": len(GATE_NAMES),
                                                     "tolerance": TOL.step_global},
                   all(r["pass"] for r in rows), rows)


def locality_suite(seed: int = 0, cases: int = 100, max_qubits: int = 5) -> dict:
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for c in range(cases):
        n = int(rng.integers(2, max_qubits + 1))
        frame = _random_frame(rng, n)
        name, targets, params = _random_gate(rng, n)
        after = evolve_step(frame, make_event(name, targets, params, layout=frame.layout))
        audit = locality_audit(frame, after, targets)
        worst = max(worst, audit.max_off_target)
        rows.append({"case": c, "qubits": n, "gate": name, **audit.to_dict()})
    return _report("locality", seed, cases, {"max_off_target_delta": worst, "tolerance": TOL.locality},
                   all(r["pass"] for r in rows), rows)


def reconstruction_suite(seed: int = 0, cases: int = 50, max_qubits: int = 5,
                         max_gates: int = 20) -> dict:
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for c in range(cases):
        n = int(rng.integers(1, max_qubits + 1))
        circuit = random_circuit(n, int(rng.integers(0, max_gates + 1)), rng)
        frame = run_circuit(circuit)
        state = schrodinger_run(circuit)
        size = int(rng.integers(1, n + 1))
        subset = [int(s) for s in rng.permutation(n)[:size]]
        rho = reconstruct_density(frame, subset)
        sub_err = max_abs(rho - state.reduced_density(subset))
        glob_err = max_abs(reconstruct_density(frame, list(range(n))) - state.density())
        eig_min = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)))
        row = {"case": c, "qubits": n, "subset": subset, "subset_error": sub_err,
               "global_error": glob_err, "trace_error": abs(np.trace(rho) - 1),
               "hermitian_error": max_abs(rho - rho.conj().T), "min_eigenvalue": eig_min}
        row["pass"] = (sub_err <= TOL.reconstruction and glob_err <= TOL.reconstruction
                       and row["trace_error"] <= TOL.norm and eig_min >= -TOL.reconstruction)
        worst = max(worst, sub_err, glob_err)
        rows.append(row)
    return _report("reconstruction", seed, cases, {"max_error": worst, "tolerance": TOL.reconstruction},
                   all(r["pass"] for r in rows), rows)


def _nontrivial_margin(v: np.ndarray, system: int) -> float:
    """Largest Pauli coefficient of ``v`` on a word acting non-trivially on ``system``."""
    f = pauli_decompose(v)
    return max((abs(c) for c, w in f.terms if w.letters[system] != "I"), default=0.0)


def theorem1_suite(seed: int = 0, cases: int = 200, min_qubits: int = 2, max_qubits: int = 4,
                   margin: float = 1e-3) -> dict:
    """Forward: ``(1 (x) W) U`` shares the class of ``U``. Converse: ``V U`` does not."""
    rng = np.random.default_rng(seed)
    rows = []
    forward_worst, converse_min = 0.0, np.inf
    for c in range(cases):
        n = int(rng.integers(min_qubits, max_qubits + 1))
        layout = SystemLayout.qubits(n)
        system = int(rng.integers(n))
        u = haar_unitary(layout.total_dim, rng)
        rest = [k for k in range(n) if k != system]
        w = tensor_embed(haar_unitary(layout.sub_dim(rest), rng), rest, layout)
        fwd = noumenal_class_report(NoumenalClassQuery(u, w @ u, system, layout))
        fwd_ok = fwd["same_class"] and fwd["descriptor_delta"] <= TOL.locality and fwd["agree"]
        forward_worst = max(forward_worst, fwd["descriptor_delta"])
        rows.append({"case": c, "direction": "forward", "qubits": n, **fwd, "pass": fwd_ok})

        while True:
            size = int(rng.integers(1, n + 1))
            others = [int(k) for k in rng.permutation(rest)[: size - 1]]
            support = [system] + others
            v = tensor_embed(haar_unitary(layout.sub_dim(support), rng), support, layout)
            m = _nontrivial_margin(v, system)
            if m >= margin:
                break
        conv = noumenal_class_report(NoumenalClassQuery(u, v @ u, system, layout))
        conv_ok = (not conv["same_class"]) and conv["agree"]
        converse_min = min(converse_min, conv["descriptor_delta"])
        rows.append({"case": c, "direction": "converse", "qubits": n, "margin": m, **conv,
                     "pass": conv_ok})
    fwd_pass = sum(r["pass"] for r in rows if r["direction"] == "forward")
    conv_pass = sum(r["pass"] for r in rows if r["direction"] == "converse")
    metrics = {"forward_pass": fwd_pass, "converse_pass": conv_pass,
               "forward_max_delta": forward_worst, "converse_min_delta": float(converse_min),
               "tolerance": TOL.equivalence}
    return _report("theorem1", seed, cases, metrics, fwd_pass == cases and conv_pass == cases, rows)


def _zero_corner(u: np.ndarray) -> np.ndarray:
    """Rotate rows 0 and 1 of ``u`` so that ``u[0, 0] == 0`` (forces the pivot search)."""
    a, b = u[1, 0], u[0, 0]
    r = np.hypot(abs(a), abs(b))
    g = np.eye(u.shape[0], dtype=complex)
    g[:2, :2] = np.array([[a, -b], [np.conj(b), np.conj(a)]]) / r
    out = g @ u
    out[0, 0] = 0
    return out


def recovery_suite(seed: int = 0, cases: int = 100, min_qubits: int = 2, max_qubits: int = 3) -> dict:
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for c in range(cases):
        n = int(rng.integers(min_qubits, max_qubits + 1))
        layout = SystemLayout.qubits(n)
        u = haar_unitary(layout.total_dim, rng)
        pivoted = c % 4 == 3
        if pivoted:
            u = _zero_corner(u)
        frame = evolve_global(init_frame(layout), u)
        dist = phase_aligned_distance(recover_unitary(frame), frame.cumulative)
        worst = max(worst, dist)
        rows.append({"case": c, "qubits": n, "zero_corner": pivoted, "distance": dist,
                     "pass": dist <= TOL.recovery})
    return _report("recovery", seed, cases, {"max_distance": worst, "tolerance": TOL.recovery},
                   all(r["pass"] for r in rows), rows)


def _variant(base: Circuit, kind: str, rng) -> Circuit:
    n = base.layout.n
    if kind == "extra_gate":
        name, targets, params = _random_gate(rng, n)
        return base.then(name, *targets, params=params)
    if kind == "gate_and_inverse":
        names = [g for g in _INVERSE if gate_width(g) <= n]
        name = names[rng.integers(len(names))]
        targets = [int(t) for t in rng.choice(n, size=gate_width(name), replace=False)]
        return base.then(name, *targets).then(_INVERSE[name], *targets)
    if kind == "global_phase":
        return base.then("GPHASE", int(rng.integers(n)), params=[float(rng.uniform(-np.pi, np.pi))])
    if kind == "stabilizing_prefix":
        # CZ leaves |0...0> alone, so the final states agree
        return Circuit(base.layout).then("CZ", 0, 1).extend(base)
    raise ValueError(kind)


def noniso_suite(seed: int = 0, cases: int = 40, max_qubits: int = 4, max_gates: int = 12) -> dict:
    """CZ witness plus a random search for equal descriptors with unequal states."""
    rng = np.random.default_rng(seed)
    _, _, witness = noninjectivity_witness(SystemLayout.qubits(2))
    rows = []
    kinds = ("extra_gate", "gate_and_inverse", "global_phase", "stabilizing_prefix")
    found_witnesses = counterexamples = 0
    for c in range(cases):
        n = int(rng.integers(2, max_qubits + 1))
        base = random_circuit(n, int(rng.integers(0, max_gates + 1)), rng)
        kind = kinds[c % len(kinds)]
        other = _variant(base, kind, rng)
        _, _, rep = noninjectivity_witness(base.layout, base, other)
        counterexamples += int(rep["injectivity_violation"])
        found_witnesses += int(rep["witness"])
        rows.append({"case": c, "qubits": n, "kind": kind, **rep,
                     "pass": not rep["injectivity_violation"]})
    metrics = {
        "cz_state_distance": witness["state_distance"],
        "cz_descriptor_delta": witness["descriptor_delta"],
        "cz_largest_gap_at": witness["largest_gap_at"],
        "random_witnesses": found_witnesses,
        "injectivity_counterexamples": counterexamples,
    }
    passed = witness["witness"] and abs(witness["descriptor_delta"] - 2) <= TOL.locality \
        and counterexamples == 0
    return _report("noniso", seed, cases, metrics, passed, rows)


SUITES = {
    "equivalence": equivalence_suite,
    "locality": locality_suite,
    "theorem1": theorem1_suite,
    "noniso": noniso_suite,
    "recovery": recovery_suite,
    "stepglobal": lambda seed=0, cases=3: step_global_suite(seed, frames_per_gate=cases),
    "reconstruction": reconstruction_suite,
}


def run_suite(name: str, seed: int = 0, cases: int | None = None) -> dict:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(seed=seed) if cases is None else fn(seed=seed, cases=cases)
