//! Minimal DPLL satisfiability over signed decisions, used by redundancy
//! pruning to decide entailment of small path formulas against the
//! implication knowledge base.

use std::collections::BTreeMap;

/// Signed decision: interned decision index and phase.
pub type Lit = (u32, bool);

/// Satisfiability of a CNF over decision atoms.
pub fn satisfiable(clauses: &[Vec<Lit>]) -> bool {
    let mut assign = BTreeMap::new();
    dpll(clauses, &mut assign)
}

fn dpll(clauses: &[Vec<Lit>], assign: &mut BTreeMap<u32, bool>) -> bool {
    // unit propagation
    loop {
        let mut unit = None;
        let mut progress = false;
        for clause in clauses {
            let mut satisfied = false;
            let mut last_free = None;
            let mut free = 0;
            for &(atom, phase) in clause {
                match assign.get(&atom) {
                    Some(&v) if v == phase => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        free += 1;
                        last_free = Some((atom, phase));
                    }
                }
            }
            if satisfied {
                continue;
            }
            match free {
                0 => return false,
                1 => {
                    unit = last_free;
                    break;
                }
                _ => {}
            }
        }
        if let Some((atom, phase)) = unit {
            assign.insert(atom, phase);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    // pick the first unassigned atom appearing in an unsatisfied clause
    let mut branch_atom = None;
    'outer: for clause in clauses {
        let satisfied = clause
            .iter()
            .any(|&(a, ph)| assign.get(&a) == Some(&ph));
        if satisfied {
            continue;
        }
        for &(a, _) in clause {
            if !assign.contains_key(&a) {
                branch_atom = Some(a);
                break 'outer;
            }
        }
    }
    let Some(atom) = branch_atom else {
        return true; // every clause satisfied
    };
    for phase in [true, false] {
        let mut trial = assign.clone();
        trial.insert(atom, phase);
        if dpll(clauses, &mut trial) {
            return true;
        }
    }
    false
}
