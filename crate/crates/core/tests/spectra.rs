use overlap_core::chebyshev::cheb_traces;
use overlap_core::ensembles::{normalize_wigner, sample_wigner_a, sample_wigner_pair};
use overlap_core::{DiagonalSpec, EntryDistribution, Normalization, Side, WignerOverlapSpec};

fn spec(a: usize, offdiag: EntryDistribution) -> WignerOverlapSpec {
    WignerOverlapSpec {
        a,
        b: a,
        delta: a / 2,
        offdiag,
        diag: DiagonalSpec::Scaled { dist: EntryDistribution::StandardGaussian, d2: 1.0 },
        normalization: Normalization::Standard,
    }
}

/// Mass of the density `(2/π)√(1-x²)` on `[lo, hi]`.
fn semicircle_mass(lo: f64, hi: f64) -> f64 {
    let cdf = |x: f64| {
        let x = x.clamp(-1.0, 1.0);
        0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / std::f64::consts::PI
    };
    cdf(hi) - cdf(lo)
}

#[test]
fn eigenvalue_histogram_follows_the_semicircle() {
    for dist in [EntryDistribution::StandardGaussian, EntryDistribution::UnitCircle] {
        let s = spec(1024, dist);
        let m = sample_wigner_a(&s, 3, 0).unwrap();
        let eig = normalize_wigner(&m, &s, Side::A).unwrap().eigenvalues().unwrap();
        let bins = 20;
        let width = 2.2 / bins as f64;
        for b in 0..bins {
            let lo = -1.1 + b as f64 * width;
            let hi = lo + width;
            let observed = eig.iter().filter(|&&x| x >= lo && x < hi).count() as f64 / eig.len() as f64;
            let expected = semicircle_mass(lo, hi);
            assert!((observed - expected).abs() < 0.012, "{dist:?} bin [{lo:.2},{hi:.2}): {observed} vs {expected}");
        }
        let outside = eig.iter().filter(|x| x.abs() > 1.05).count() as f64 / eig.len() as f64;
        assert!(outside < 0.005, "{dist:?}: {outside} of the spectrum outside [-1.05, 1.05]");
        let edge = eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((edge - 1.0).abs() < 0.05, "{dist:?} spectral edge {edge}");
    }
}

#[test]
fn consecutive_trials_are_uncorrelated() {
    let s = spec(24, EntryDistribution::Rademacher);
    let trials = 4000;
    let stats: Vec<f64> = (0..trials)
        .map(|t| {
            let (a, _) = sample_wigner_pair(&s, 11, t).unwrap().normalized().unwrap();
            cheb_traces(&a, 2)[2]
        })
        .collect();
    let n = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / n;
    let var = stats.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let lag1 = stats.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>() / (n - 1.0);
    let r = lag1 / var;
    assert!(r.abs() < 4.0 / n.sqrt(), "lag-one autocorrelation {r}");
}

#[test]
fn distinct_seeds_give_distinct_matrices() {
    let s = spec(16, EntryDistribution::StandardGaussian);
    let a = sample_wigner_a(&s, 1, 0).unwrap();
    let b = sample_wigner_a(&s, 2, 0).unwrap();
    let c = sample_wigner_a(&s, 1, 1).unwrap();
    let same = |x: &overlap_core::DenseMatrix, y: &overlap_core::DenseMatrix| {
        (0..16).all(|i| (0..16).all(|j| x.get(i, j) == y.get(i, j)))
    };
    assert!(!same(&a, &b) && !same(&a, &c));
    assert!(same(&a, &sample_wigner_a(&s, 1, 0).unwrap()));
}
