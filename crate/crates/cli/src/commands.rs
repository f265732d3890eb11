//! The five subcommands. Each returns its output plus whether every
//! relation it evaluated holds.

use std::f64::consts::{E, PI};

use cg_uncert::bounds::{
    bound_L, check_binned_relations, feasibility_region, func_K, func_M, func_M_inv, GhfPair,
    RegionGrid, RelationReport,
};
use cg_uncert::coarse::{
    bin_density, discrete_renyi, discrete_variance, sample_counts, BinnedDistribution,
};
use cg_uncert::states::{
    check_continuous_relations, momentum_density, position_density, StateModel,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::descriptor::parse_state;
use crate::error::CliResult;
use crate::output::Table;

pub enum Output {
    Table(Table),
    Reports(Vec<RelationReport>),
    Sample(SampleReport),
}

pub struct Outcome {
    pub output: Output,
    pub all_hold: bool,
}

impl Outcome {
    fn table(t: Table) -> Self {
        Self {
            output: Output::Table(t),
            all_hold: true,
        }
    }
}

fn par_rows(xs: &[f64], f: impl Fn(f64) -> CliResult<Vec<f64>> + Sync) -> CliResult<Vec<Vec<f64>>> {
    xs.par_iter().map(|x| f(*x)).collect()
}

/// Bounds against `Δδ/ħ`, evaluated at `Δ = (Δδ/ħ)·ħ`, `δ = 1`.
pub fn cmd_bounds(cfg: &RunConfig) -> CliResult<Outcome> {
    let rows = par_rows(&cfg.sweep.values(), |dd| {
        let b = bound_L(dd * cfg.hbar, 1.0, cfg.hbar, cfg.alpha)?;
        Ok(vec![dd, b.b_half, b.b_alpha, b.b_one, b.r, b.l_alpha, b.g])
    })?;
    Ok(Outcome::table(Table::new(
        vec![
            "dd_over_hbar",
            "B_half",
            "B_alpha",
            "B_one",
            "R",
            "L_alpha",
            "g",
        ],
        rows,
    )))
}

/// `M` at `t = x` and `M⁻¹`, `K` at `u = x` for each sweep value `x`.
/// At `x = 0` both `M(t)` and `M⁻¹(u)` are infinite.
pub fn cmd_kfun(cfg: &RunConfig) -> CliResult<Outcome> {
    let rows = par_rows(&cfg.sweep.values(), |x| {
        let (m, m_inv) = if x == 0.0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            (func_M(x)?, func_M_inv(x)?)
        };
        Ok(vec![x, m, x, m_inv, func_K(x)?, 1.0 + 2.0 * PI * E * x])
    })?;
    Ok(Outcome::table(Table::new(
        vec!["t", "M_t", "u", "M_inv_u", "K_u", "linear_ref"],
        rows,
    )))
}

fn ghfs(cfg: &RunConfig) -> GhfPair {
    GhfPair {
        x: cfg.ghf_x,
        p: cfg.ghf_p,
    }
}

/// Continuous relations of the state followed by the coarse-grained ones.
pub fn cmd_check(cfg: &RunConfig) -> CliResult<Outcome> {
    let state = parse_state(&cfg.state, cfg.hbar)?;
    let mut reports = check_continuous_relations(&state, cfg.alpha)?;
    let (r, s) = bin_state(&state, cfg)?;
    reports.extend(check_binned_relations(
        &r,
        &s,
        cfg.hbar,
        cfg.alpha,
        ghfs(cfg),
    )?);
    let all_hold = reports.iter().all(RelationReport::holds);
    Ok(Outcome {
        output: Output::Reports(reports),
        all_hold,
    })
}

fn bin_state(
    state: &StateModel,
    cfg: &RunConfig,
) -> CliResult<(BinnedDistribution, BinnedDistribution)> {
    let (r, s) = rayon::join(
        || bin_density(&position_density(state), cfg.delta, cfg.offset_x),
        || bin_density(&momentum_density(state), cfg.delta_p, cfg.offset_p),
    );
    Ok((r?, s?))
}

/// Forbidden cells on `[0, u_max]²` of reduced discrete variances.
pub fn cmd_region(cfg: &RunConfig) -> CliResult<Outcome> {
    let grid = RegionGrid {
        u_x: (0.0, cfg.grid_u_max),
        u_p: (0.0, cfg.grid_u_max),
        n: cfg.grid_n,
    };
    let region = feasibility_region(cfg.delta, cfg.delta_p, cfg.hbar, &grid)?;
    let n = region.u_p.len();
    let rows = region
        .forbidden
        .iter()
        .enumerate()
        .map(|(k, f)| {
            vec![
                region.u_x[k / n],
                region.u_p[k % n],
                if *f { 1.0 } else { 0.0 },
            ]
        })
        .collect();
    let mut t = Table::new(vec!["u_x", "u_p", "forbidden"], rows);
    t.metadata = vec![
        ("dd_over_hbar", cfg.delta * cfg.delta_p / cfg.hbar),
        ("forbidden_fraction", region.forbidden_fraction()),
    ];
    Ok(Outcome::table(t))
}

/// One sampled statistic beside its exact value. `std_error` is the
/// delta-method standard error of the estimator for `samples` draws.
#[derive(Debug, Clone, Serialize)]
pub struct StatRow {
    pub axis: &'static str,
    pub quantity: String,
    pub exact: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub samples: u64,
    pub seed: u64,
    pub stats: Vec<StatRow>,
    pub chi2_x: f64,
    pub dof_x: usize,
    pub chi2_p: f64,
    pub dof_p: usize,
    pub relations_exact: Vec<RelationReport>,
    pub relations_empirical: Vec<RelationReport>,
    pub verdicts_match: bool,
}

/// Standard error of `Σ p g(p)`-type plug-in estimators from the gradient `g`.
fn delta_method(b: &BinnedDistribution, grad: impl Fn(f64) -> f64, n: u64) -> f64 {
    let total = b.total();
    let (m1, m2) = b
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .fold((0.0, 0.0), |(a, c), (_, p)| {
            let q = p / total;
            let g = grad(q);
            (a + q * g, c + q * g * g)
        });
    ((m2 - m1 * m1).max(0.0) / n as f64).sqrt()
}

fn variance_se(b: &BinnedDistribution, n: u64) -> f64 {
    let total = b.total();
    let mean = b.iter().map(|(j, p)| b.center(j) * p).sum::<f64>() / total;
    let (m2, m4) = b.iter().fold((0.0, 0.0), |(a, c), (j, p)| {
        let d = b.center(j) - mean;
        (a + d * d * p / total, c + d.powi(4) * p / total)
    });
    ((m4 - m2 * m2).max(0.0) / n as f64).sqrt()
}

fn entropy_se(b: &BinnedDistribution, order: f64, n: u64) -> f64 {
    let total = b.total();
    if order.is_infinite() {
        let p = b.max_prob() / total;
        return ((1.0 - p) / (p * n as f64)).sqrt();
    }
    if order == 1.0 {
        return delta_method(b, |q| -q.ln(), n);
    }
    let s: f64 = b.iter().map(|(_, p)| (p / total).powf(order)).sum();
    delta_method(b, |q| order * q.powf(order - 1.0) / ((1.0 - order) * s), n)
}

/// Pearson χ² of observed frequencies against exact bin probabilities.
/// Bins expecting fewer than five counts are pooled into one cell.
fn chi_square(exact: &BinnedDistribution, observed: &BinnedDistribution, n: u64) -> (f64, usize) {
    let nf = n as f64;
    let lo = exact
        .iter()
        .next()
        .map_or(0, |(j, _)| j)
        .min(observed.iter().next().map_or(0, |(j, _)| j));
    let hi = (exact.iter().last().map_or(0, |(j, _)| j))
        .max(observed.iter().last().map_or(0, |(j, _)| j));
    let (mut chi2, mut cells) = (0.0, 0usize);
    let (mut pool_e, mut pool_o) = (0.0, 0.0);
    for j in lo..=hi {
        let e = exact.prob(j) * nf;
        let o = observed.prob(j) * nf;
        if e >= 5.0 {
            chi2 += (o - e) * (o - e) / e;
            cells += 1;
        } else {
            pool_e += e;
            pool_o += o;
        }
    }
    pool_e += exact.tail_mass() * nf;
    if pool_e > 0.0 {
        chi2 += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
        cells += 1;
    }
    (chi2, cells.saturating_sub(1))
}

fn order_name(order: f64) -> String {
    if order.is_infinite() {
        "renyi_inf".into()
    } else if order == 1.0 {
        "shannon".into()
    } else {
        format!("renyi_{order}")
    }
}

/// Simulated detections compared with exact bin probabilities.
pub fn cmd_sample(cfg: &RunConfig) -> CliResult<Outcome> {
    let state = parse_state(&cfg.state, cfg.hbar)?;
    let (r, s) = bin_state(&state, cfg)?;
    let n = cfg.samples;
    // Independent streams for the two axes.
    let (rs, ss) = rayon::join(
        || {
            sample_counts(
                &position_density(&state),
                cfg.delta,
                cfg.offset_x,
                n,
                cfg.seed,
            )
        },
        || {
            sample_counts(
                &momentum_density(&state),
                cfg.delta_p,
                cfg.offset_p,
                n,
                cfg.seed ^ 0x9e37_79b9_7f4a_7c15,
            )
        },
    );
    let (rs, ss) = (rs?, ss?);
    let beta = if cfg.alpha == 0.5 {
        f64::INFINITY
    } else {
        cfg.alpha / (2.0 * cfg.alpha - 1.0)
    };
    let mut stats = Vec::new();
    for (axis, exact, emp, order) in [("x", &r, &rs, cfg.alpha), ("p", &s, &ss, beta)] {
        let mut push = |quantity: String, e: f64, m: f64, se: f64| {
            let z = if se > 0.0 { (m - e) / se } else { 0.0 };
            stats.push(StatRow {
                axis,
                quantity,
                exact: e,
                empirical: m,
                std_error: se,
                z_score: z,
            });
        };
        push(
            "variance".into(),
            discrete_variance(exact),
            discrete_variance(emp),
            variance_se(exact, n),
        );
        let mut orders = vec![1.0];
        if order != 1.0 {
            orders.push(order);
        }
        for o in orders {
            push(
                order_name(o),
                discrete_renyi(exact, o)?,
                discrete_renyi(emp, o)?,
                entropy_se(exact, o, n),
            );
        }
    }
    let (chi2_x, dof_x) = chi_square(&r, &rs, n);
    let (chi2_p, dof_p) = chi_square(&s, &ss, n);
    let relations_exact = check_binned_relations(&r, &s, cfg.hbar, cfg.alpha, ghfs(cfg))?;
    let relations_empirical = check_binned_relations(&rs, &ss, cfg.hbar, cfg.alpha, ghfs(cfg))?;
    let verdicts_match = relations_exact
        .iter()
        .zip(&relations_empirical)
        .all(|(a, b)| a.verdict == b.verdict);
    let all_hold = relations_exact.iter().all(RelationReport::holds);
    Ok(Outcome {
        output: Output::Sample(SampleReport {
            samples: n,
            seed: cfg.seed,
            stats,
            chi2_x,
            dof_x,
            chi2_p,
            dof_p,
            relations_exact,
            relations_empirical,
            verdicts_match,
        }),
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    fn cfg(f: ConfigFile) -> RunConfig {
        RunConfig::resolve(ConfigFile::default(), f).unwrap()
    }

    fn table(o: Outcome) -> Table {
        match o.output {
            Output::Table(t) => t,
            _ => panic!("expected a table"),
        }
    }

    #[test]
    fn bounds_columns_and_half_endpoint() {
        let mut f = ConfigFile::default();
        f.sweep.min = Some(2.0 * PI);
        f.sweep.points = Some(1);
        let t = table(cmd_bounds(&cfg(f)).unwrap());
        assert_eq!(
            t.columns,
            [
                "dd_over_hbar",
                "B_half",
                "B_alpha",
                "B_one",
                "R",
                "L_alpha",
                "g"
            ]
        );
        assert_eq!(t.rows.len(), 1);
        assert!(t.rows[0][1].abs() < 1e-15);
    }

    #[test]
    fn kfun_rows() {
        let f = ConfigFile {
            sweep: crate::config::SweepFile {
                min: Some(0.0),
                max: Some(2.0),
                points: Some(5),
                log: Some(false),
            },
            ..Default::default()
        };
        let t = table(cmd_kfun(&cfg(f)).unwrap());
        assert_eq!(t.rows[0][4], 1.0);
        for row in &t.rows[1..] {
            let back = func_M(row[3]).unwrap();
            assert!((back - row[2]).abs() <= 1e-10 * row[2]);
            assert!(row[4] <= 2.0 * PI * E * (row[2] + 1.0 / 12.0));
        }
    }

    #[test]
    fn region_origin_and_single_cell() {
        let mut f = ConfigFile::default();
        f.grid.n = Some(1);
        let t = table(cmd_region(&cfg(f)).unwrap());
        assert_eq!(t.rows, vec![vec![0.0, 0.0, 1.0]]);
        assert_eq!(t.metadata[1], ("forbidden_fraction", 1.0));
    }

    #[test]
    fn one_sample_is_degenerate() {
        let f = ConfigFile {
            samples: Some(1),
            seed: Some(3),
            ..Default::default()
        };
        let o = cmd_sample(&cfg(f)).unwrap();
        let Output::Sample(rep) = o.output else {
            panic!()
        };
        let h = rep
            .stats
            .iter()
            .find(|s| s.axis == "x" && s.quantity == "shannon")
            .unwrap();
        assert_eq!(h.empirical, 0.0);
        assert!(o.all_hold);
    }
}
