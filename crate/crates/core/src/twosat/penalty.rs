use super::{Clause, Literal, TwoSatFormula};
use crate::fixed::Milli;
use crate::qubo::{Qubo, QuboBuilder};

/// `c + k x` form of a literal's complement: `1 - x` for `x`, `x` for `!x`.
fn complement(l: Literal) -> (i64, i64) {
    if l.positive {
        (1, -1)
    } else {
        (0, 1)
    }
}

fn add_penalty(b: &mut QuboBuilder, clause: &Clause) {
    let unit = Milli::ONE.raw();
    match *clause {
        Clause::Unit(a) => {
            let (c, k) = complement(a);
            b.add_variable(a.var);
            b.add_offset(Milli(c * unit)).add_linear(a.var, Milli(k * unit));
        }
        Clause::Binary(a, z) => {
            let ((c1, k1), (c2, k2)) = (complement(a), complement(z));
            b.add_offset(Milli(c1 * c2 * unit));
            b.add_linear(a.var, Milli(c2 * k1 * unit));
            b.add_linear(z.var, Milli(c1 * k2 * unit));
            b.add_quadratic(a.var, z.var, Milli(k1 * k2 * unit)).expect("binary clause has two variables");
        }
    }
}

/// Product of the complements of the clause's literals: 1 on the single
/// violating assignment of its variables, 0 elsewhere.
pub fn clause_to_penalty(clause: &Clause) -> Qubo {
    let mut b = QuboBuilder::new();
    add_penalty(&mut b, clause);
    b.build()
}

/// Sum of clause penalties over the formula's variables; evaluates to the
/// number of violated clauses.
pub fn formula_to_posiform_qubo(f: &TwoSatFormula) -> Qubo {
    let mut b = QuboBuilder::new();
    b.add_variables(f.variables().iter().copied());
    for c in f.clauses() {
        add_penalty(&mut b, c);
    }
    b.build()
}
