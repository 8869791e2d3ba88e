use super::{GeneratorSet, GroupModel, Word};
use crate::error::{Error, Result};

/// `x y x^-1 y^-1`, freely reduced.
pub fn commutator(gens: &GeneratorSet, x: &Word, y: &Word) -> Word {
    let xi = gens.inverse_word(x);
    let yi = gens.inverse_word(y);
    gens.free_reduce(&Word::concat(&[x, y, &xi, &yi]))
}

/// The loops `[a, t^(2k+1) a t^-(2k+1)]` for `k = 1..=n` in the lamplighter
/// group, over its standard generators.  The `k`-th loop has length `8k + 8`.
pub fn dense_witness_loops(gens: &GeneratorSet, n: usize) -> Result<Vec<Word>> {
    if gens.model() != GroupModel::Lamplighter {
        return Err(Error::ModelMismatch("LL2".into()));
    }
    let t = gens.lookup("t")?;
    let t_inv = gens.inverse_of(t);
    let a = gens.lookup("a")?;
    let out = (1..=n)
        .map(|k| {
            let r = 2 * k + 1;
            let mut conj = vec![t; r];
            conj.push(a);
            conj.extend(std::iter::repeat_n(t_inv, r));
            commutator(gens, &Word(vec![a]), &Word(conj))
        })
        .collect();
    Ok(out)
}
