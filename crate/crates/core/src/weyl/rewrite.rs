//! The defining relations as an oriented rewrite system on words.
//!
//! Rules, applied at adjacent letter pairs:
//!
//! * `Θ*_iΘ^i → 1 + q_i Θ^iΘ*_i`
//! * `Θ*_iΘ^j → c_ji Θ^jΘ*_i` for `i ≠ j`
//! * `Θ^jΘ^i → c_ji Θ^iΘ^j` for `j > i`
//! * `Θ*_iΘ*_j → c_ij Θ*_jΘ*_i` for `i < j`
//! * `Θ^iΘ^i → 0`, `Θ*_iΘ*_i → 0` when `q_i = −1`
//!
//! Each swap carries the factor `c(|x|,|y|)` of the two letters it exchanges.
//! Every rule strictly lowers [`measure`], so rewriting terminates.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{Generator, WeylElement, WeylError, WeylMonomial, Word};
use crate::coefficients::PhaseScalar;
use crate::statistics::CommutationFactor;
use Generator::{Annihilate as A, Create as C};

/// Positions `p` where the pair `(w[p], w[p+1])` matches a rule.
pub fn redexes(c: &CommutationFactor, word: &[Generator]) -> Vec<usize> {
    (0..word.len().saturating_sub(1)).filter(|&p| is_redex(c, word[p], word[p + 1])).collect()
}

fn is_redex(c: &CommutationFactor, x: Generator, y: Generator) -> bool {
    match (x, y) {
        (A(_), C(_)) => true,
        (C(j), C(i)) => j > i || (i == j && c.is_nilpotent(i)),
        (A(i), A(j)) => i < j || (i == j && c.is_nilpotent(i)),
        (C(_), A(_)) => false,
    }
}

/// Applies the rule at position `p`, returning the resulting weighted words.
pub fn rewrite_at(c: &CommutationFactor, word: &[Generator], p: usize) -> Vec<(PhaseScalar, Word)> {
    let (x, y) = (word[p], word[p + 1]);
    let splice = |mid: &[Generator]| -> Word { word[..p].iter().chain(mid).chain(&word[p + 2..]).copied().collect() };
    match (x, y) {
        (A(i), C(j)) if i == j => {
            vec![(PhaseScalar::one(), splice(&[])), (PhaseScalar::from_integer(c.parity(i)), splice(&[C(i), A(i)]))]
        }
        (A(i), C(j)) => vec![(c.entry(j, i).clone(), splice(&[C(j), A(i)]))],
        (C(j), C(i)) if j > i => vec![(c.entry(j, i).clone(), splice(&[C(i), C(j)]))],
        (A(i), A(j)) if i < j => vec![(c.entry(i, j).clone(), splice(&[A(j), A(i)]))],
        (C(i), C(_)) | (A(i), A(_)) if c.is_nilpotent(i) => vec![],
        _ => panic!("no rule applies at position {p}"),
    }
}

/// `(mixed inversions, creator inversions, annihilator inversions)`.
pub fn measure(word: &[Generator]) -> (usize, usize, usize) {
    let mut m = (0, 0, 0);
    for a in 0..word.len() {
        for b in a + 1..word.len() {
            match (word[a], word[b]) {
                (A(_), C(_)) => m.0 += 1,
                (C(j), C(i)) if j > i => m.1 += 1,
                (A(i), A(j)) if i < j => m.2 += 1,
                _ => {}
            }
        }
    }
    m
}

fn canonical(c: &CommutationFactor, word: &[Generator]) -> WeylMonomial {
    WeylMonomial::from_canonical_word(c.dim(), word).expect("irreducible word is canonical")
}

/// Rewrites with the leftmost redex until no rule applies.
pub fn normalize_leftmost(c: &Arc<CommutationFactor>, word: &[Generator]) -> Result<WeylElement, WeylError> {
    super::check_word(c, word)?;
    let mut pending: BTreeMap<Word, PhaseScalar> = BTreeMap::new();
    pending.insert(word.to_vec(), PhaseScalar::one());
    let mut done = BTreeMap::new();
    while let Some((w, x)) = pending.pop_first() {
        match redexes(c, &w).first() {
            None => super::accumulate(&mut done, canonical(c, &w), x)?,
            Some(&p) => {
                for (s, v) in rewrite_at(c, &w, p) {
                    super::accumulate(&mut pending, v, x.checked_mul(&s)?)?;
                }
            }
        }
    }
    Ok(WeylElement { factor: Arc::clone(c), terms: done })
}

/// Two one-step rewrites of `word` whose normal forms disagree.
#[derive(Debug, Clone)]
pub struct ConfluenceFailure {
    pub word: Word,
    pub positions: (usize, usize),
    pub results: (WeylElement, WeylElement),
}

/// Exhaustive confluence check over every rewriting strategy.
///
/// A word's normal form is unique iff all of its one-step rewrites have
/// unique normal forms and those agree; memoized over subwords.
pub struct ConfluenceChecker {
    factor: Arc<CommutationFactor>,
    memo: HashMap<Word, WeylElement>,
}

impl ConfluenceChecker {
    pub fn new(factor: &Arc<CommutationFactor>) -> Self {
        ConfluenceChecker { factor: Arc::clone(factor), memo: HashMap::new() }
    }

    pub fn check(&mut self, word: &[Generator]) -> Result<Result<WeylElement, ConfluenceFailure>, WeylError> {
        super::check_word(&self.factor, word)?;
        Ok(self.unique_nf(word))
    }

    fn unique_nf(&mut self, word: &[Generator]) -> Result<WeylElement, ConfluenceFailure> {
        if let Some(x) = self.memo.get(word) {
            return Ok(x.clone());
        }
        let c = Arc::clone(&self.factor);
        let spots = redexes(&c, word);
        let result = if spots.is_empty() {
            WeylElement::monomial(&c, canonical(&c, word), PhaseScalar::one())
        } else {
            let mut first: Option<(usize, WeylElement)> = None;
            for p in spots {
                let mut acc = WeylElement::zero(&c);
                for (s, v) in rewrite_at(&c, word, p) {
                    let sub = self.unique_nf(&v)?;
                    acc = &acc + &sub.scale(&s).expect("order limit");
                }
                match &first {
                    None => first = Some((p, acc)),
                    Some((q, x)) if *x != acc => {
                        return Err(ConfluenceFailure {
                            word: word.to_vec(),
                            positions: (*q, p),
                            results: (x.clone(), acc),
                        })
                    }
                    Some(_) => {}
                }
            }
            first.expect("at least one redex").1
        };
        self.memo.insert(word.to_vec(), result.clone());
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::{make_factor, FactorPreset, PresetKind, RootSpec};
    use crate::weyl::normal_form;
    use proptest::prelude::*;

    fn factor(kind: PresetKind, n: usize) -> Arc<CommutationFactor> {
        Arc::new(make_factor(&FactorPreset::new(kind, n)).unwrap())
    }

    fn complex_factor() -> Arc<CommutationFactor> {
        let om = vec![vec![0, 1, 3], vec![0, 0, 2], vec![0, 0, 0]];
        Arc::new(make_factor(&FactorPreset::omega_general(vec![1, 0, 0], om, RootSpec { order: 8, exp: 1 })).unwrap())
    }

    #[test]
    fn every_rule_lowers_the_measure() {
        let c = complex_factor();
        let gens = crate::weyl::Generator::all(3);
        for &x in &gens {
            for &y in &gens {
                for &z in &gens {
                    let w = vec![z, x, y, z];
                    for p in redexes(&c, &w) {
                        for (_, v) in rewrite_at(&c, &w, p) {
                            assert!(measure(&v) < measure(&w) || v.len() < w.len());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn irreducible_words_are_canonical() {
        let c = factor(PresetKind::Example3Cf, 2);
        assert!(redexes(&c, &[C(0), C(1), A(1), A(0)]).is_empty());
        assert_eq!(redexes(&c, &[A(0), C(0)]), vec![0]);
        let f = factor(PresetKind::Example4Cb, 2);
        assert_eq!(redexes(&f, &[C(0), C(0)]), vec![0]);
        assert!(redexes(&c, &[C(0), C(0)]).is_empty());
    }

    #[test]
    fn nilpotent_overlap_is_confluent() {
        // Θ*Θ Θ overlaps the exchange rule with the vanishing square
        let c = factor(PresetKind::Example4Cb, 1);
        let mut checker = ConfluenceChecker::new(&c);
        let nf = checker.check(&[A(0), C(0), C(0)]).unwrap().unwrap();
        assert_eq!(nf, normal_form(&c, &[A(0), C(0), C(0)]).unwrap());
    }

    fn arb_word() -> impl Strategy<Value = (Arc<CommutationFactor>, Word)> {
        let kinds = prop::sample::select(vec![0usize, 1, 2, 3, 4]);
        (kinds, 1usize..=3).prop_flat_map(|(k, n)| {
            let c = match k {
                4 => complex_factor(),
                _ => {
                    let sizes = PresetKind::CORE[k].sizes_up_to(3);
                    factor(PresetKind::CORE[k], sizes[n % sizes.len()])
                }
            };
            let dim = c.dim();
            let g = (0..dim, any::<bool>()).prop_map(|(i, cr)| if cr { C(i) } else { A(i) });
            (Just(c), prop::collection::vec(g, 0..=6))
        })
    }

    proptest! {
        #[test]
        fn all_strategies_agree((c, w) in arb_word()) {
            let mut checker = ConfluenceChecker::new(&c);
            let unique = checker.check(&w).unwrap();
            prop_assert!(unique.is_ok(), "{:?}", unique.err());
            let unique = unique.unwrap();
            prop_assert_eq!(&unique, &normalize_leftmost(&c, &w).unwrap());
            prop_assert_eq!(&unique, &normal_form(&c, &w).unwrap());
        }
    }
}
