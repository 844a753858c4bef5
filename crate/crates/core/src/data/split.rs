use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::{Error, Result};

/// Per class, draws `per_class_train` samples uniformly at random for the
/// training set; the rest go to the test set. Both keep the original
/// column order.
pub fn split_train_test(ds: &Dataset, per_class_train: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if per_class_train == 0 {
        return Err(Error::invalid("per_class_train must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_train = vec![false; ds.len()];
    for (c, name) in ds.class_names.iter().enumerate() {
        let members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == c).collect();
        if members.len() <= per_class_train {
            return Err(Error::invalid(format!(
                "class '{name}' has {} samples; need more than {per_class_train} to leave a test sample",
                members.len()
            )));
        }
        for k in sample(&mut rng, members.len(), per_class_train) {
            is_train[members[k]] = true;
        }
    }
    let train: Vec<usize> = (0..ds.len()).filter(|&i| is_train[i]).collect();
    let test: Vec<usize> = (0..ds.len()).filter(|&i| !is_train[i]).collect();
    Ok((ds.select(&train), ds.select(&test)))
}
