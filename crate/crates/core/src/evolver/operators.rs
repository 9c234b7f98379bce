//! Genetic operators. All randomness comes from the caller's RNG so a run
//! is a pure function of its seed.

use rand::Rng;

use super::config::{Alphabet, ClampMode, GaConfig};

pub type Genome = Vec<f64>;

/// `count` genomes of `genome_len` genes drawn uniformly from the alphabet.
pub fn random_population<R: Rng + ?Sized>(
    alphabet: &Alphabet,
    count: usize,
    genome_len: usize,
    rng: &mut R,
) -> Vec<Genome> {
    let k = alphabet.len() as i64;
    (0..count)
        .map(|_| {
            (0..genome_len)
                .map(|_| alphabet.value(rng.gen_range(0..k)))
                .collect()
        })
        .collect()
}

/// A uniformly chosen alphabet value different from `current` (any value if
/// `current` is off the alphabet).
fn resample<R: Rng + ?Sized>(alphabet: &Alphabet, current: f64, rng: &mut R) -> f64 {
    let k = alphabet.len() as i64;
    if !alphabet.contains(current) {
        return alphabet.value(rng.gen_range(0..k));
    }
    let cur = alphabet.index_of(current);
    let r = rng.gen_range(0..k - 1);
    alphabet.value(if r >= cur { r + 1 } else { r })
}

/// Per-gene mutation: each gene changes with probability `mutation_prob`.
///
/// In clamped mode a changing gene moves to one of the other `K − 1`
/// alphabet values with equal probability. In init-only mode it does that
/// or, with equal odds, drifts by `±step` (possibly leaving `[lo, hi]`).
pub fn mutate<R: Rng + ?Sized>(genome: &mut [f64], cfg: &GaConfig, rng: &mut R) {
    let alphabet = &cfg.alphabet;
    for gene in genome.iter_mut() {
        if !(rng.gen::<f64>() < cfg.mutation_prob) {
            continue;
        }
        *gene = match cfg.clamp_mode {
            ClampMode::Clamped => resample(alphabet, *gene, rng),
            ClampMode::InitOnly if rng.gen::<bool>() => resample(alphabet, *gene, rng),
            ClampMode::InitOnly => {
                let delta = if rng.gen::<bool>() { 1 } else { -1 };
                alphabet.value(alphabet.index_of(*gene) + delta)
            }
        };
    }
}

/// Swaps the tails `[cut..]` of two genomes.
pub fn crossover_at(a: &[f64], b: &[f64], cut: usize) -> (Genome, Genome) {
    assert_eq!(a.len(), b.len(), "crossover needs equal lengths");
    let mut child_a = a[..cut].to_vec();
    child_a.extend_from_slice(&b[cut..]);
    let mut child_b = b[..cut].to_vec();
    child_b.extend_from_slice(&a[cut..]);
    (child_a, child_b)
}

/// Single-point crossover applied with probability `crossover_prob`; the
/// cut is uniform in `1..l`. Genomes shorter than 2 are copied.
pub fn crossover<R: Rng + ?Sized>(
    a: &[f64],
    b: &[f64],
    cfg: &GaConfig,
    rng: &mut R,
) -> (Genome, Genome) {
    let l = a.len();
    if l >= 2 && rng.gen::<f64>() < cfg.crossover_prob {
        let cut = rng.gen_range(1..l);
        crossover_at(a, b, cut)
    } else {
        (a.to_vec(), b.to_vec())
    }
}

/// Indices forming the next generation: `elites` are copied unchanged,
/// `parents` (one per remaining slot) go through crossover and mutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub elites: Vec<usize>,
    pub parents: Vec<usize>,
}

/// Population indices sorted by ascending cost, ties by index.
pub fn ranking(costs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&i, &j| costs[i].total_cmp(&costs[j]).then(i.cmp(&j)));
    order
}

/// Binary tournament: the lower cost wins, the earlier index on ties.
pub fn tournament<R: Rng + ?Sized>(costs: &[f64], rng: &mut R) -> usize {
    let a = rng.gen_range(0..costs.len());
    let b = rng.gen_range(0..costs.len());
    match costs[a].total_cmp(&costs[b]) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => a.min(b),
    }
}

/// Elitism plus binary tournament for the remaining slots.
pub fn select<R: Rng + ?Sized>(costs: &[f64], cfg: &GaConfig, rng: &mut R) -> Selection {
    let n = costs.len();
    let elite = cfg.elite_count().min(n);
    let elites = ranking(costs).into_iter().take(elite).collect();
    let parents = (0..n - elite).map(|_| tournament(costs, rng)).collect();
    Selection { elites, parents }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> GaConfig {
        GaConfig::standard(0)
    }

    #[test]
    fn zero_mutation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = GaConfig {
            mutation_prob: 0.0,
            ..cfg()
        };
        let mut g = vec![1.0, -2.0, 0.0, 2.0];
        mutate(&mut g, &c, &mut rng);
        assert_eq!(g, vec![1.0, -2.0, 0.0, 2.0]);
    }

    #[test]
    fn full_mutation_flips_binary_genes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = GaConfig {
            mutation_prob: 1.0,
            alphabet: Alphabet::new(0.0, 1.0, 1.0).unwrap(),
            ..cfg()
        };
        let mut g = vec![0.0, 1.0, 1.0, 0.0, 0.0];
        mutate(&mut g, &c, &mut rng);
        assert_eq!(g, vec![1.0, 0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn mutation_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = cfg();
        let trials = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..trials {
            let mut g = [0.0];
            mutate(&mut g, &c, &mut rng);
            counts[(g[0] + 2.0) as usize] += 1;
        }
        let changed = trials - counts[2];
        let rate = changed as f64 / trials as f64;
        assert!((rate - 0.2).abs() < 0.005, "rate {rate}");
        for (i, &n) in counts.iter().enumerate().filter(|(i, _)| *i != 2) {
            let p = n as f64 / trials as f64;
            assert!((p - 0.05).abs() < 0.004, "value {i}: {p}");
        }
    }

    #[test]
    fn init_only_mutation_can_escape_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = GaConfig {
            mutation_prob: 1.0,
            clamp_mode: ClampMode::InitOnly,
            ..cfg()
        };
        let mut g = vec![2.0; 64];
        for _ in 0..20 {
            mutate(&mut g, &c, &mut rng);
        }
        assert!(g.iter().any(|v| *v > 2.0 || *v < -2.0));
        assert!(g.iter().all(|v| v.fract() == 0.0));
    }

    #[test]
    fn crossover_examples() {
        let a = vec![1.0; 4];
        let b = vec![2.0; 4];
        assert_eq!(
            crossover_at(&a, &b, 2),
            (vec![1.0, 1.0, 2.0, 2.0], vec![2.0, 2.0, 1.0, 1.0])
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = GaConfig {
            crossover_prob: 0.0,
            ..cfg()
        };
        assert_eq!(crossover(&a, &b, &c, &mut rng), (a.clone(), b.clone()));
    }

    #[test]
    fn crossover_preserves_positional_multisets() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = GaConfig {
            crossover_prob: 0.7,
            ..cfg()
        };
        let pop = random_population(&c.alphabet, 2 * 10_000, 9, &mut rng);
        for pair in pop.chunks(2) {
            let (x, y) = crossover(&pair[0], &pair[1], &c, &mut rng);
            for pos in 0..9 {
                let mut before = [pair[0][pos], pair[1][pos]];
                let mut after = [x[pos], y[pos]];
                before.sort_by(f64::total_cmp);
                after.sort_by(f64::total_cmp);
                assert_eq!(before, after);
            }
        }
    }

    #[test]
    fn elites_are_the_best() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = cfg();
        let mut costs: Vec<f64> = (0..1000).map(|i| 0.5 + (i % 37) as f64 / 100.0).collect();
        costs[613] = 0.0;
        let s = select(&costs, &c, &mut rng);
        assert_eq!(s.elites.len(), 10);
        assert_eq!(s.parents.len(), 990);
        assert_eq!(s.elites[0], 613);
        let worst_elite = s.elites.iter().map(|&i| costs[i]).fold(0.0, f64::max);
        let elite_set: std::collections::HashSet<_> = s.elites.iter().collect();
        assert!((0..1000)
            .filter(|i| !elite_set.contains(i))
            .all(|i| costs[i] >= worst_elite));
    }

    #[test]
    fn tournament_ties_follow_index_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 10;
        let draws = 10_000;
        let costs = vec![0.25; n];
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[tournament(&costs, &mut rng)] += 1;
        }
        // with all costs equal the winner is min(a, b) of two uniform draws:
        // P(i) = (2(n − i) − 1) / n²
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let expected = draws as f64 * (2 * (n - i) - 1) as f64 / (n * n) as f64;
                (c as f64 - expected).powi(2) / expected
            })
            .sum();
        // 9 degrees of freedom, 99.9% quantile
        assert!(chi2 < 27.88, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn tournament_prefers_lower_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let costs = [0.9, 0.1];
        let wins = (0..10_000)
            .filter(|_| tournament(&costs, &mut rng) == 1)
            .count();
        // P(win) = 1 − 1/4
        assert!((wins as f64 / 10_000.0 - 0.75).abs() < 0.02);
    }
}
