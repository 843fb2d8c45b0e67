#![allow(dead_code)]

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeonwalk::analysis::{AnalyzeOptions, Pipeline};
use zeonwalk::problem::{ProblemSpec, Validation};
use zeonwalk::{Rational, RationalMatrix, Transformation};

pub const CORPUS_SEED: u64 = 0x5eed_c010;
pub const CORPUS_SIZE: usize = 120;

pub fn t(s: &str) -> Transformation {
    s.parse().unwrap()
}

pub fn spec_of(colors: &[Transformation]) -> ProblemSpec {
    ProblemSpec {
        n: colors[0].n(),
        colors: colors.to_vec(),
        weights: None,
        adjacency: None,
        level_cap: None,
    }
}

pub fn pipeline(colors: &[Transformation], validation: Validation) -> Pipeline {
    let opts = AnalyzeOptions {
        validation,
        ..AnalyzeOptions::default()
    };
    Pipeline::build(&spec_of(colors), &opts).unwrap()
}

pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Transformation {
    Transformation::new((0..n).map(|_| rng.gen_range(0..n)).collect()).unwrap()
}

/// Two-color colorings whose graph is strongly connected and aperiodic.
pub fn random_colorings(seed: u64, count: usize) -> Vec<Vec<Transformation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(3..=7);
        let colors = vec![random_function(&mut rng, n), random_function(&mut rng, n)];
        if spec_of(&colors).validate(Validation::Strict).is_ok() {
            out.push(colors);
        }
    }
    out
}

pub struct Instance {
    pub colors: Vec<Transformation>,
    pub pipeline: Pipeline,
}

/// The fixed random corpus, built once per test binary.
pub fn corpus() -> &'static [Instance] {
    static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        random_colorings(CORPUS_SEED, CORPUS_SIZE)
            .into_iter()
            .map(|colors| Instance {
                pipeline: pipeline(&colors, Validation::Strict),
                colors,
            })
            .collect()
    })
}

pub fn six_point() -> Vec<Transformation> {
    vec![t("[451314]"), t("[245631]")]
}

pub fn four_point() -> Vec<Transformation> {
    vec![t("[4312]"), t("[3443]")]
}

pub fn max_abs_entry(m: &RationalMatrix) -> f64 {
    m.entries()
        .iter()
        .map(|x| zeonwalk::rational::to_f64(x).abs())
        .fold(0.0, f64::max)
}

pub fn frac(p: i64, q: i64) -> Rational {
    zeonwalk::rational::ratio(p, q)
}

/// Near-permutations: a random permutation with at most one point
/// redirected, so ranks stay high.
pub fn near_permutation(rng: &mut ChaCha8Rng, n: usize, collapse: bool) -> Transformation {
    use rand::seq::SliceRandom;
    let mut image: Vec<usize> = (0..n).collect();
    image.shuffle(rng);
    if collapse {
        let i = rng.gen_range(0..n);
        image[i] = rng.gen_range(0..n);
    }
    Transformation::new(image).unwrap()
}

/// Strongly connected aperiodic colorings with kernel rank strictly between
/// one and `n`.
pub fn high_rank_colorings(seed: u64, count: usize) -> Vec<Vec<Transformation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(4..=7);
        let second = rng.gen_bool(0.5);
        let colors = vec![
            near_permutation(&mut rng, n, true),
            near_permutation(&mut rng, n, second),
        ];
        if spec_of(&colors).validate(Validation::Strict).is_err() {
            continue;
        }
        let Ok(s) = zeonwalk::Semigroup::generate_bounded(&colors, 20_000) else {
            continue;
        };
        if (2..n).contains(&s.minimal_rank()) {
            out.push(colors);
        }
    }
    out
}

pub const HIGH_RANK_SEED: u64 = 0x5eed_c011;
pub const HIGH_RANK_SIZE: usize = 30;

pub fn high_rank_corpus() -> &'static [Instance] {
    static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        high_rank_colorings(HIGH_RANK_SEED, HIGH_RANK_SIZE)
            .into_iter()
            .map(|colors| Instance {
                pipeline: pipeline(&colors, Validation::Strict),
                colors,
            })
            .collect()
    })
}

/// Two colors whose average is doubly stochastic: the second color hits each
/// vertex exactly as often as the first one misses it.
pub fn doubly_stochastic_colorings(seed: u64, count: usize) -> Vec<Vec<Transformation>> {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(3..=6);
        let red = random_function(&mut rng, n);
        let mut indegree = vec![0usize; n];
        for &j in red.image() {
            indegree[j] += 1;
        }
        if indegree.iter().any(|&d| d > 2) {
            continue;
        }
        let mut image: Vec<usize> = (0..n)
            .flat_map(|v| std::iter::repeat_n(v, 2 - indegree[v]))
            .collect();
        image.shuffle(&mut rng);
        let colors = vec![red, Transformation::new(image).unwrap()];
        if colors[0].is_permutation() && colors[1].is_permutation() {
            continue;
        }
        if spec_of(&colors).validate(Validation::Strict).is_ok() {
            out.push(colors);
        }
    }
    out
}

/// Every instance the suite sweeps, with a label.
pub fn all_instances() -> Vec<(String, &'static Pipeline)> {
    static EXTRA: OnceLock<Vec<(String, Pipeline)>> = OnceLock::new();
    let extra = EXTRA.get_or_init(|| {
        let mut v = vec![
            ("six".to_string(), pipeline(&six_point(), Validation::Strict)),
            ("four".to_string(), pipeline(&four_point(), Validation::Strict)),
        ];
        for (i, colors) in doubly_stochastic_colorings(DOUBLY_SEED, 6)
            .into_iter()
            .enumerate()
        {
            v.push((format!("doubly-{i}"), pipeline(&colors, Validation::Strict)));
        }
        v.push((
            "doubly-periodic".to_string(),
            pipeline(&[t("[2341]"), t("[2143]")], Validation::Warn),
        ));
        v
    });
    let mut all: Vec<(String, &'static Pipeline)> = extra.iter().map(|(l, p)| (l.clone(), p)).collect();
    for (i, inst) in corpus().iter().enumerate() {
        all.push((format!("random-{i}"), &inst.pipeline));
    }
    for (i, inst) in high_rank_corpus().iter().enumerate() {
        all.push((format!("high-rank-{i}"), &inst.pipeline));
    }
    all
}

pub const DOUBLY_SEED: u64 = 0x5eed_c012;
