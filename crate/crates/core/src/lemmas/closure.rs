use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field, Subfield};
use crate::setalg::FSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureOp {
    Add,
    Mul,
}

/// One line of a straight-line program. Operands index into the slot list,
/// which starts with the inputs and grows by one output per step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub op: ClosureOp,
    pub lhs: usize,
    pub rhs: usize,
    pub output: Elem,
}

/// The subfield generated by a set together with a straight-line program of
/// additions and multiplications that produces every element of it.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureWitness {
    pub generated: FSet,
    pub inputs: Vec<Elem>,
    pub program: Vec<Step>,
}

/// Closes `B` under addition and multiplication. Every pair of discovered
/// elements is combined exactly once, so the cost is quadratic in the size
/// of the result.
pub fn generated_subfield(b: &FSet) -> Result<ClosureWitness> {
    if b.iter().all(|e| e.is_zero()) {
        return Err(Error::NoNonzeroGenerator);
    }
    let f = b.field();
    let inputs = b.elems();
    let mut slots = inputs.clone();
    let mut generated = b.clone();
    let mut program = Vec::new();
    let mut i = 0;
    while i < slots.len() {
        for j in 0..=i {
            for op in [ClosureOp::Add, ClosureOp::Mul] {
                let out = apply(f, op, slots[i], slots[j]);
                if !generated.contains(out) {
                    generated.insert(out);
                    program.push(Step { op, lhs: i, rhs: j, output: out });
                    slots.push(out);
                }
            }
        }
        i += 1;
    }
    Ok(ClosureWitness { generated, inputs, program })
}

fn apply(f: &Field, op: ClosureOp, a: Elem, b: Elem) -> Elem {
    match op {
        ClosureOp::Add => f.add(a, b),
        ClosureOp::Mul => f.mul(a, b),
    }
}

impl ClosureWitness {
    /// Runs the program from `inputs` and returns every value it produces,
    /// inputs included. Fails if an operand refers to a slot not yet
    /// computed or a recorded output disagrees with the recomputed one.
    pub fn replay(&self, field: &Field) -> Result<FSet> {
        let mut slots = self.inputs.clone();
        for (k, step) in self.program.iter().enumerate() {
            let (Some(&a), Some(&b)) = (slots.get(step.lhs), slots.get(step.rhs)) else {
                return Err(Error::InvalidArgument(format!("step {k} reads an undefined slot")));
            };
            let out = apply(field, step.op, a, b);
            if out != step.output {
                return Err(Error::InvalidArgument(format!("step {k} produced {} not {}", out, step.output)));
            }
            slots.push(out);
        }
        Ok(FSet::from_elems(field, slots))
    }

    /// The smallest subfield of `field` containing the inputs.
    pub fn minimal_subfield(&self, field: &Field) -> Subfield {
        let inputs = FSet::from_elems(field, self.inputs.iter().copied());
        field
            .subfields()
            .into_iter()
            .find(|s| inputs.is_subset(&s.elements))
            .expect("the whole field contains the inputs")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_of_f4() {
        let f4 = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let x = f4.generator_x();
        let w = generated_subfield(&FSet::from_elems(&f4, [x])).unwrap();
        assert_eq!(w.generated, FSet::full(&f4));
        assert_eq!(w.program.len(), 3);
        assert_eq!(w.replay(&f4).unwrap(), w.generated);
    }

    #[test]
    fn one_generates_prime_field() {
        let f8 = Field::new(2, 3, None).unwrap();
        let w = generated_subfield(&FSet::from_elems(&f8, [Elem::ONE])).unwrap();
        assert_eq!(w.generated.indices(), vec![0, 1]);
        assert_eq!(w.minimal_subfield(&f8).elements, w.generated);
    }

    #[test]
    fn f9_from_one_and_x() {
        let f9 = Field::new(3, 2, Some(&[1, 0, 1])).unwrap();
        let b = FSet::from_elems(&f9, [Elem::ONE, f9.generator_x()]);
        let w = generated_subfield(&b).unwrap();
        assert_eq!(w.generated.len(), 9);
        assert_eq!(w.replay(&f9).unwrap(), w.generated);
    }

    #[test]
    fn zero_only_is_rejected() {
        let f5 = Field::prime(5).unwrap();
        let z = FSet::from_elems(&f5, [Elem::ZERO]);
        assert!(matches!(generated_subfield(&z), Err(Error::NoNonzeroGenerator)));
        assert!(matches!(generated_subfield(&FSet::empty(&f5)), Err(Error::NoNonzeroGenerator)));
    }

    #[test]
    fn tampered_program_fails_replay() {
        let f5 = Field::prime(5).unwrap();
        let mut w = generated_subfield(&FSet::from_elems(&f5, [Elem(2)])).unwrap();
        w.program[0].output = Elem(0);
        assert!(w.replay(&f5).is_err());
    }
}
