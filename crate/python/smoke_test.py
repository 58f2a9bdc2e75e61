"""Smoke test for the pygatevm extension module."""

import json

import pygatevm

BELL = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0],q[1];
measure q -> c;
"""


def main():
    bell = pygatevm.Circuit.from_qasm(BELL)
    assert bell.num_qubits == 2
    ideal = bell.simulate()
    assert abs(ideal["00"] - 0.5) < 1e-12 and abs(ideal["11"] - 0.5) < 1e-12

    ghz = pygatevm.generate_benchmark("ghz", 8)
    program = ghz.compile(max_fragment_size=4, budget=1)
    assert program.num_virtual_gates == 1
    assert max(program.fragment_widths) <= 4
    knitted = program.run()
    fidelity = pygatevm.hellinger_fidelity(knitted, ghz.simulate())
    assert fidelity > 1 - 1e-9, fidelity

    again = pygatevm.Program.from_json(program.to_json())
    assert again.instance_counts == program.instance_counts
    sampled = again.run(shots=20000, seed=1)
    assert pygatevm.hellinger_fidelity(sampled, ghz.simulate()) > 0.95

    print(json.dumps({"fragments": program.fragment_widths, "fidelity": fidelity}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
