//! Fast consistency checks run by `euaf selftest`.

use euaf::kst::{clip_inner, compose_kst, count_intrinsic_neurons, full_width_count};
use euaf::univariate::{embed_in_template, fit_univariate, uniform_grid, SearchBudget};
use euaf::width_bound::{construct_witness, random_rational_matrix, two_point_gap};
use euaf::{clip01_fragment, euaf as sigma, AffineLayer, FeedforwardNetwork, Network};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{targets, CommonArgs};

type Check = (String, bool, String);

fn activation() -> Check {
    let cases: [(f64, f64); 5] = [(0.5, 0.5), (1.5, 0.5), (2.0, 0.0), (-1.0, -0.5), (3.25, 0.75)];
    let worst = cases.iter().map(|&(x, y)| (sigma(x) - y).abs()).fold(0.0, f64::max);
    ("activation values".into(), worst < 1e-15, format!("max deviation {worst:e}"))
}

fn clip() -> Check {
    let net: Network = clip01_fragment();
    let worst = uniform_grid(-1.0, 2.0, 10_001)
        .into_iter()
        .map(|t| (net.evaluate_scalar(t).unwrap_or(f64::NAN) - t.clamp(0.0, 1.0)).abs())
        .fold(0.0, f64::max);
    ("clip identity on [-1, 2]".into(), worst < 1e-12, format!("max deviation {worst:e}"))
}

fn neuron_count() -> Check {
    let result = (|| -> euaf::Result<(usize, String)> {
        let unit = FeedforwardNetwork::new(
            1,
            vec![
                AffineLayer::new(1, 1, vec![1.0], vec![0.0], true)?,
                AffineLayer::new(1, 1, vec![1.0], vec![0.0], false)?,
            ],
        )?;
        let template = embed_in_template(&unit, 0.0, 1.0)?;
        let inner = clip_inner(&template, &uniform_grid(0.0, 1.0, 11))?;
        let comp = compose_kst((0.0, 1.0), vec![0.5, 0.5], vec![inner; 5], template)?;
        let count = count_intrinsic_neurons(&comp);
        Ok((count.total, count.breakdown()))
    })();
    match result {
        Ok((total, breakdown)) => ("neuron count d = 2".into(), total == full_width_count(2), breakdown),
        Err(e) => ("neuron count d = 2".into(), false, e.to_string()),
    }
}

fn witnesses(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for d in [2, 3, 5] {
        for _ in 0..100 {
            let m = random_rational_matrix(d - 1, d, &mut rng);
            if !construct_witness(&m).is_ok_and(|w| w.verify(&m)) {
                bad += 1;
            }
        }
    }
    ("witness certificates".into(), bad == 0, format!("{bad} of 300 failed"))
}

fn zero_network_gap() -> Check {
    let result = (|| -> anyhow::Result<f64> {
        let family = targets::family("abs2", 3)?;
        let net = FeedforwardNetwork::new(
            3,
            vec![
                AffineLayer::new(2, 3, vec![0.0; 6], vec![0.0; 2], true)?,
                AffineLayer::new(1, 2, vec![0.0; 2], vec![0.0], false)?,
            ],
        )?;
        Ok(two_point_gap(&family, &net)?.gap)
    })();
    match result {
        Ok(gap) => ("zero network gap".into(), gap >= 1.0, format!("gap {gap}")),
        Err(e) => ("zero network gap".into(), false, e.to_string()),
    }
}

fn quick_fit(common: &CommonArgs) -> Check {
    let search = SearchBudget {
        max_evals: common.budget.min(50_000),
        seed: common.seed,
        ..SearchBudget::default()
    };
    match fit_univariate(|x| (x - 0.5).abs(), 0.0, 1.0, 0.1, &search) {
        Ok(r) => ("fit |x - 1/2| to 0.1".into(), true, format!("sup error {:e}", r.sup_error)),
        Err(e) => ("fit |x - 1/2| to 0.1".into(), false, e.to_string()),
    }
}

pub fn run(common: &CommonArgs) -> Vec<Check> {
    vec![
        activation(),
        clip(),
        neuron_count(),
        witnesses(common.seed),
        zero_network_gap(),
        quick_fit(common),
    ]
}
