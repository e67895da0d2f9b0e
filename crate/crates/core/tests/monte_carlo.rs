use dgc_core::gaussian::{orthant, EquicorrSpec, ExtReal, QuadratureConfig};
use dgc_core::intensity::{conditional_survival, Scope};
use dgc_core::model::{index_of, name_at, ModelConfig};
use dgc_core::simulate::{normal, run_indexed, simulate_batch, GridSpec, SeedSpec};
use dgc_core::stats::{mean_and_se, z_score};
use dgc_core::tva::{run_tva, tva_csv, TvaRunSpec};
use dgc_core::verify::{reports_csv, run_suite, SuiteRun};

const Z: f64 = 3.0;

fn assert_z(label: &str, samples: &[f64], target: f64) {
    let (m, se) = mean_and_se(samples);
    let z = z_score(m, target, se);
    assert!(z.abs() <= Z, "{label}: estimate {m} (se {se}) vs {target}, z = {z}");
}

#[test]
fn orthant_and_conditional_mean_match_direct_sampling() {
    let z = [-0.3, 0.4, 0.1];
    let (rho, sigma) = (0.5, 1.3);
    let spec = EquicorrSpec::new(3, rho, sigma).unwrap();
    let fin: Vec<ExtReal> = z.iter().map(|&x| ExtReal::Finite(x)).collect();
    let exact = orthant(&fin, &spec, &QuadratureConfig::default()).unwrap();
    let seed = SeedSpec::new(17);
    let draws = run_indexed(200_000, 0, |i| {
        let mut rng = seed.rng(i);
        let y = normal(&mut rng);
        let xi: Vec<f64> = (0..3)
            .map(|_| sigma * (rho.sqrt() * y + (1.0 - rho).sqrt() * normal(&mut rng)))
            .collect();
        let inside = xi.iter().zip(&z).all(|(x, z)| x > z);
        (if inside { 1.0 } else { 0.0 }, if inside { xi[1] } else { 0.0 })
    });
    let hits: Vec<f64> = draws.iter().map(|d| d.0).collect();
    assert_z("orthant probability", &hits, exact.survival());
    // E[ξ_1 1_A] = Φ_J E[ξ_1 | A]
    let moment: Vec<f64> = draws.iter().map(|d| d.1).collect();
    assert_z("truncated first moment", &moment, exact.truncated_first_moment(1, 0.0));
}

#[test]
fn conditional_survival_has_the_tower_property() {
    let config = ModelConfig::new(0.5, 0.25, vec![0.05, 0.05, 0.05, 0.05]).unwrap();
    let grid = GridSpec::new(3.0, 6).unwrap();
    let s = 6.0;
    let rows = simulate_batch(&config, &grid, &SeedSpec::new(5), 20_000, 0, |path| {
        let state = path.state_at(&grid, grid.steps);
        let mut out = Vec::new();
        for j in config.names() {
            let alive = !state.is_defaulted(j);
            let g = if alive {
                let p = conditional_survival(&config, &state, j, s, Scope::G).unwrap();
                (if path.tau_of(j) > s { 1.0 } else { 0.0 }) - p
            } else {
                0.0
            };
            out.push(g);
        }
        for j in config.reference_names() {
            let f = if !state.is_defaulted(j) {
                let p = conditional_survival(&config, &state, j, s, Scope::F).unwrap();
                (if path.tau_of(j) > s { 1.0 } else { 0.0 }) - p
            } else {
                0.0
            };
            out.push(f);
        }
        out
    });
    // the G columns must see defaulted names in the conditioning state
    let with_defaults = rows.iter().filter(|r| r[..config.name_count()].contains(&0.0)).count();
    assert!(with_defaults > 1_000, "{with_defaults}");
    let width = rows[0].len();
    for c in 0..width {
        let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        assert_z(&format!("tower column {c}"), &col, 0.0);
    }
}

#[test]
fn simulated_defaults_have_exponential_marginals_and_copula_correlation() {
    let config = ModelConfig::new(0.4, 0.25, vec![0.05, 0.08, 0.03]).unwrap();
    let grid = GridSpec::new(5.0, 10).unwrap();
    let paths = simulate_batch(&config, &grid, &SeedSpec::new(99), 40_000, 0, |p| p);
    for i in 0..config.name_count() {
        let j = name_at(i);
        let hits: Vec<f64> = paths.iter().map(|p| if p.tau_of(j) <= 5.0 { 1.0 } else { 0.0 }).collect();
        assert_z(&format!("P(tau_{j} <= 5)"), &hits, 1.0 - (-config.hazard(j) * 5.0).exp());
    }
    // Var(m_t) = 1 − α(t)², Cov(m^i_t, m^j_t) = ϱ(1 − α(t)²)
    let var = 1.0 - config.alpha(5.0).powi(2);
    let k = grid.steps;
    let sq: Vec<f64> = paths.iter().map(|p| p.m[k][index_of(1)].powi(2)).collect();
    assert_z("var m_T", &sq, var);
    let cross: Vec<f64> = paths.iter().map(|p| p.m[k][index_of(0)] * p.m[k][index_of(1)]).collect();
    assert_z("cov m_T", &cross, config.rho_copula * var);
}

#[test]
fn results_do_not_depend_on_parallelism() {
    let config = ModelConfig::three_name(0.6, 0.02);
    let grid = GridSpec::new(4.0, 8).unwrap();
    let seed = SeedSpec::new(3);
    let a = simulate_batch(&config, &grid, &seed, 500, 1, |p| p);
    let b = simulate_batch(&config, &grid, &seed, 500, 3, |p| p);
    assert_eq!(a, b);

    let run = |parallelism| SuiteRun {
        paths: Some(20_000),
        parallelism,
        ..SuiteRun::new(11)
    };
    let one = reports_csv(&run_suite("projection", &config, run(1)).unwrap());
    let many = reports_csv(&run_suite("projection", &config, run(4)).unwrap());
    assert_eq!(one, many);

    let spec = |parallelism| TvaRunSpec {
        rho_grid: vec![0.5],
        bank_hazards: vec![0.01],
        paths: 4_000,
        parallelism,
        ..TvaRunSpec::default()
    };
    let base = ModelConfig::three_name(0.3, 0.01);
    assert_eq!(
        tva_csv(&run_tva(&spec(1), &base).unwrap()),
        tva_csv(&run_tva(&spec(2), &base).unwrap())
    );
}
