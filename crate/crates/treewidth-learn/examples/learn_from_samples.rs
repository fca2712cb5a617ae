//! Learn a decomposition from finite data instead of an exact table.
//!
//! The theoretical tolerance schedule is far too strict for desk-scale
//! sample counts (it divides by n^4), so this example does what a real
//! experiment would: measure the connectivity floor of the truth, set the
//! split threshold to half of it, and let the plug-in entropy estimator's
//! realized accuracy fill the noise term.

use treewidth_learn::modelgen::{draw_samples, generate, GeneratorSpec};
use treewidth_learn::{learn, projection_kl, LearnConfig, LearnSource, Result};

fn main() -> Result<()> {
    let spec = GeneratorSpec {
        n: 6,
        k: 1,
        seed: 11,
        card: 2,
        dependence_strength: 0.35,
    };
    let (_, p, alpha) = generate(&spec, 0.05, 200)?;
    println!("truth: n = {}, width 1, connectivity floor {alpha:.4} bits", spec.n);

    let m = 100_000;
    let samples = draw_samples(&p, m, 4242)?;
    println!("drew {m} samples");

    let cfg = LearnConfig {
        k: 1,
        eps: 0.1,
        delta: 0.2,
        alpha: Some(alpha),
        // Practical overrides: split anything cheaper than half the floor,
        // and budget the plug-in estimator's realized accuracy at this
        // sample size (about a millibit) per query. The resulting split
        // threshold must stay below the floor, or real structure is cut.
        eps1_override: Some(1e-3),
        eps2_override: Some(alpha / 2.0),
    };
    let t = cfg.derived(spec.n, spec.card, false)?;
    println!(
        "schedule: eps1 = {:.3e}, eps2 = {:.3e}, split threshold = {:.3e} bits",
        t.eps1, t.eps2, t.threshold
    );

    let learned = learn(&LearnSource::Samples(samples), &cfg)?;
    println!(
        "learned width {} with {} bags; empirical residual {:.4} bits",
        learned.td.width(),
        learned.td.bags.len(),
        learned.kl
    );

    // Score against the actual truth, which the learner never saw.
    let true_kl = projection_kl(&p, &learned.td)?;
    println!("true divergence of truth onto learned tree: {true_kl:.4} bits");
    Ok(())
}
