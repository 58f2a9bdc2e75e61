use std::fmt::Write;

use super::VirtualCircuit;

impl VirtualCircuit {
    /// Graphviz text of the operation graph.
    pub fn op_graph_dot(&self) -> String {
        let mut s = String::from("digraph op_graph {\n");
        for g in self.op_graph().gates() {
            let [a, b] = self.op_graph().qubits_of(g).expect("live gate");
            let kind = self.gate(g).map(|i| i.kind.to_string()).unwrap_or_default();
            let _ = writeln!(s, "  {g} [label=\"{g} {kind}({a},{b})\"];");
        }
        for e in self.op_graph().edges() {
            let _ = writeln!(s, "  {} -> {} [label=\"q{}\"];", e.from, e.to, e.qubit);
        }
        s.push_str("}\n");
        s
    }

    /// Graphviz text of the weighted qubit graph, one cluster per fragment.
    pub fn qubit_graph_dot(&self) -> String {
        let mut s = String::from("graph qubit_graph {\n");
        for (f, frag) in self.fragments().iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_{f} {{\n    label=\"fragment {f}\";");
            for q in &frag.qubits {
                let _ = writeln!(s, "    q{q};");
            }
            s.push_str("  }\n");
        }
        for ((a, b), w) in self.qubit_graph().edges() {
            let _ = writeln!(s, "  q{a} -- q{b} [label=\"{w}\", weight={w}];");
        }
        for v in self.virtual_gates() {
            let [a, b] = v.qubits;
            let _ = writeln!(s, "  q{a} -- q{b} [style=dashed, label=\"{}\"];", v.id);
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use crate::circuit::{Circuit, Instruction};
    use crate::ir::{GateId, VirtualCircuit};

    #[test]
    fn dot_mentions_every_edge() {
        let mut c = Circuit::new(3);
        c.push(Instruction::cx(0, 1))
            .push(Instruction::cx(1, 2))
            .push(Instruction::cz(0, 2));
        let mut vc = VirtualCircuit::from_circuit(&c).unwrap();
        vc.virt_gate(GateId(2)).unwrap();
        let op = vc.op_graph_dot();
        assert!(op.contains("g0 -> g1"));
        let q = vc.qubit_graph_dot();
        assert!(q.contains("q0 -- q1"));
        assert!(q.contains("style=dashed"));
    }
}
