use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Matrix, Result};

/// Starting dictionary for the joint solver.
///
/// When the atoms were copied from training samples, `source_columns[k]`
/// is the sample index atom `k` came from; the solver uses it to select the
/// matching rows of the locality weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryInit {
    pub atoms: Matrix,
    pub source_columns: Option<Vec<usize>>,
    /// Class index of each atom, when known.
    pub atom_classes: Option<Vec<usize>>,
}

impl DictionaryInit {
    /// Uses `atoms` verbatim with no link back to the samples.
    pub fn from_atoms(atoms: Matrix) -> Self {
        DictionaryInit { atoms, source_columns: None, atom_classes: None }
    }

    /// Copies the given sample columns of `x` (unit-normalized) as atoms.
    pub fn from_samples(x: &Matrix, columns: &[usize]) -> Result<Self> {
        let mut atoms = Matrix::zeros(x.nrows(), columns.len());
        for (k, &c) in columns.iter().enumerate() {
            if c >= x.ncols() {
                return Err(Error::invalid(format!(
                    "sample index {c} out of range for {} samples",
                    x.ncols()
                )));
            }
            let col = x.column(c);
            let n = col.norm();
            if n > 0.0 {
                atoms.set_column(k, &(col / n));
            }
        }
        Ok(DictionaryInit { atoms, source_columns: Some(columns.to_vec()), atom_classes: None })
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.ncols()
    }
}

/// Class-blocked initialization: for each class (in increasing label
/// order) draw `per_class` distinct samples uniformly at random, normalize
/// them and concatenate.
///
/// This is the only place where labels reach the joint solver.
pub fn init_dictionary(x: &Matrix, labels: &[usize], per_class: usize, seed: u64) -> Result<DictionaryInit> {
    if labels.len() != x.ncols() {
        return Err(Error::invalid(format!("{} labels for {} samples", labels.len(), x.ncols())));
    }
    if per_class == 0 {
        return Err(Error::invalid("need at least one atom per class"));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = Vec::with_capacity(classes.len() * per_class);
    let mut atom_classes = Vec::with_capacity(classes.len() * per_class);
    for &c in &classes {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        if members.len() < per_class {
            return Err(Error::invalid(format!(
                "class {c} has {} samples, fewer than {per_class} atoms requested",
                members.len()
            )));
        }
        let mut picked: Vec<usize> =
            sample(&mut rng, members.len(), per_class).into_iter().map(|k| members[k]).collect();
        picked.sort_unstable();
        columns.extend_from_slice(&picked);
        atom_classes.extend(std::iter::repeat_n(c, per_class));
    }
    let mut init = DictionaryInit::from_samples(x, &columns)?;
    init.atom_classes = Some(atom_classes);
    Ok(init)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_follow_class_order() {
        let x = Matrix::from_fn(3, 8, |i, j| (i + j) as f64 + 1.0);
        let labels = [1, 0, 1, 0, 1, 0, 1, 0];
        let init = init_dictionary(&x, &labels, 2, 5).unwrap();
        assert_eq!(init.num_atoms(), 4);
        assert_eq!(init.atom_classes.as_deref(), Some(&[0, 0, 1, 1][..]));
        let src = init.source_columns.as_ref().unwrap();
        assert!(src[..2].iter().all(|&c| labels[c] == 0));
        assert!(src[2..].iter().all(|&c| labels[c] == 1));
        for col in init.atoms.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(init, init_dictionary(&x, &labels, 2, 5).unwrap());
    }

    #[test]
    fn small_class_is_rejected() {
        let x = Matrix::from_element(2, 3, 1.0);
        assert!(init_dictionary(&x, &[0, 0, 1], 2, 0).is_err());
        assert!(init_dictionary(&x, &[0, 1], 1, 0).is_err());
    }
}
