//! Shared corpus generation for the file-format tests.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use odot_cli::io::{SeriesFile, TermRecord};

/// A 50-file corpus covering the degenerate cases (empty term lists,
/// scalar column degree, one variable) and randomized sparse files in
/// both fields.
pub fn corpus() -> Vec<SeriesFile> {
    let mut files = vec![
        // Empty term lists.
        SeriesFile {
            n: 1,
            n_prime: 1,
            q_prime: 0,
            field: "real".into(),
            terms: vec![],
        },
        SeriesFile {
            n: 2,
            n_prime: 2,
            q_prime: 1,
            field: "complex".into(),
            terms: vec![],
        },
        // One variable, constant term only.
        SeriesFile {
            n: 1,
            n_prime: 1,
            q_prime: 0,
            field: "real".into(),
            terms: vec![TermRecord {
                alpha: vec![0],
                alpha_prime: vec![0],
                re: 4.25,
                im: 0.0,
            }],
        },
        // Scalar column degree with several rows.
        SeriesFile {
            n: 2,
            n_prime: 1,
            q_prime: 0,
            field: "real".into(),
            terms: vec![
                TermRecord {
                    alpha: vec![0, 0],
                    alpha_prime: vec![0],
                    re: 1.0,
                    im: 0.0,
                },
                TermRecord {
                    alpha: vec![2, 1],
                    alpha_prime: vec![0],
                    re: -0.125,
                    im: 0.0,
                },
            ],
        },
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    while files.len() < 50 {
        let n = rng.random_range(1..=3usize);
        let n_prime = rng.random_range(1..=3usize);
        let q_prime = rng.random_range(0..=2usize);
        let complex = rng.random_bool(0.5);
        let mut seen = HashSet::new();
        let mut terms = Vec::new();
        let wanted = rng.random_range(0..=25usize);
        for _ in 0..wanted {
            let alpha: Vec<u32> = (0..n).map(|_| rng.random_range(0..=4u32)).collect();
            let mut alpha_prime = vec![0u32; n_prime];
            for _ in 0..q_prime {
                let k = rng.random_range(0..n_prime);
                alpha_prime[k] += 1;
            }
            if !seen.insert((alpha.clone(), alpha_prime.clone())) {
                continue;
            }
            terms.push(TermRecord {
                alpha,
                alpha_prime,
                re: rng.random_range(-5.0..5.0),
                im: if complex {
                    rng.random_range(-5.0..5.0)
                } else {
                    0.0
                },
            });
        }
        files.push(SeriesFile {
            n,
            n_prime,
            q_prime,
            field: if complex { "complex" } else { "real" }.into(),
            terms,
        });
    }
    files
}
