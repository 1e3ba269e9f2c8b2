//! Range soundness of random genes and of every mutation configuration.

use evoshapes::evolve::crossover;
use evoshapes::genome::{
    random_gene, random_genome, validate_genome, CanvasDims, Genome, GenomeComposition, ShapeKind,
};
use evoshapes::mutation::{chunk_count, mutate_genome, select_mutation_targets, MutationConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_valid(g: &Genome) {
    let v = validate_genome(g);
    assert!(v.is_empty(), "{v:?}");
}

#[test]
fn random_genes_are_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for kind in [ShapeKind::Polygon, ShapeKind::Circle, ShapeKind::Line] {
        for _ in 0..10_000 {
            let dims = CanvasDims::new(rng.gen_range(1..=300), rng.gen_range(1..=300)).unwrap();
            let comp = GenomeComposition::new(1, 0, 0, rng.gen_range(3..=20)).unwrap();
            let gene = random_gene(kind, &comp, dims, &mut rng);
            assert_eq!(gene.kind(), kind);
            assert_valid(&Genome::new(dims, vec![gene]));
        }
    }
}

fn random_config<R: Rng>(rng: &mut R) -> MutationConfig {
    MutationConfig {
        mutation_probability: rng.gen_range(0.0..=1.0),
        soft_mutation_rate: rng.gen_range(0.0..=1.0),
        hybrid_soft_generations: rng.gen_range(0..4),
        hybrid_medium_generations: rng.gen_range(0..4),
        chunk_mode: rng.gen(),
        genetic_restructure_rate: if rng.gen() {
            rng.gen_range(0.0..=1.0)
        } else {
            0.0
        },
        gene_swap_enabled: rng.gen(),
    }
}

#[test]
fn mutation_preserves_validity_and_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10_000 {
        let dims = CanvasDims::new(rng.gen_range(1..=64), rng.gen_range(1..=64)).unwrap();
        let comp = GenomeComposition::new(
            rng.gen_range(0..4),
            rng.gen_range(0..4),
            rng.gen_range(1..4),
            rng.gen_range(3..7),
        )
        .unwrap();
        let cfg = random_config(&mut rng);
        assert!(cfg.check().is_ok());
        let parent = random_genome(&comp, dims, &mut rng).unwrap();
        let before = parent.clone();
        let max = rng.gen_range(1..100);
        let child = mutate_genome(&parent, &cfg, rng.gen_range(0..max), max, &mut rng);
        assert_eq!(parent, before, "parent must not change");
        assert_valid(&child);
        assert_eq!(child.len(), parent.len());
        assert_eq!(child.kind_counts(), parent.kind_counts());
        let mixed = crossover(&child, &parent).unwrap();
        assert_valid(&mixed);
    }
}

#[test]
fn chunk_mode_event_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in 1..=200usize {
        for i in 0..=20 {
            let p = f64::from(i) / 20.0;
            // round(i * n / 20) with halves up, computed exactly
            let want = ((2 * i as usize * n + 20) / 40).max(1);
            assert_eq!(chunk_count(n, p), want);
            let picks = select_mutation_targets(n, p, true, &mut rng);
            assert_eq!(picks.len(), want);
            assert!(picks.iter().all(|&k| k < n));
        }
    }
}

#[test]
fn probability_mode_rate_is_close_to_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let (n, trials, p) = (50usize, 4000, 0.3);
    let total: usize = (0..trials)
        .map(|_| select_mutation_targets(n, p, false, &mut rng).len())
        .sum();
    let mean = total as f64 / trials as f64;
    // binomial sd of the mean is sqrt(50 * 0.21 / 4000) ~ 0.05
    assert!((mean - 15.0).abs() < 0.3, "mean {mean}");
}
