use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::config::ExperimentId;
use super::output::{Check, CountRow, ExperimentOutput, RecordRow};
use super::sim::{EntryBatch, TrialBatch};
use super::Runner;
use crate::error::{Error, Result};
use crate::laws::{
    compound_local_time_sampler, geometric_pmf, record_count_pmf, sample_line_process, sample_ppp, sample_record_limit,
    ChordTime, CosineAngle, HazardY, RefLaw, Scaled, Uniform,
};
use crate::process::{
    hazard_count, hazard_local_time, line_map, records_extract, Hazard, MarkedPointSet, RecordDirection, ScaledClock,
};
use crate::rng::{oracle_rng, synthetic_rng};
use crate::stats::{
    chi2_gof, chi2_homogeneity, chi2_independence, chi2_uniform, correlation, exp_interarrival_orbits, fold_tail,
    ks_one_sample, ks_statistic, poisson_dispersion, two_sample_ks, window_counts, window_independence,
};
use crate::targets::{crossing_flux_rate, total_weight, EntryEvent, Target, TargetKind};

type EntryClass = Box<dyn Fn(&EntryEvent) -> bool>;

const ANGLE_BINS: usize = 16;
const GEOMETRIC_CELLS: usize = 15;

pub(super) fn run(r: &Runner, id: ExperimentId) -> Result<ExperimentOutput> {
    match id {
        ExperimentId::E1 => e1_poissonity(r),
        ExperimentId::E2 => e2_mark_law(r),
        ExperimentId::E3 => e3_committor(r),
        ExperimentId::E4 => e4_local_time(r),
        ExperimentId::E5 => e5_closest_approach(r),
        ExperimentId::E6 => e6_line_process(r),
        ExperimentId::E7 => e7_records(r),
        ExperimentId::E8 => e8_hazard_local_time(r),
    }
}

fn tag(id: ExperimentId, eps: f64, target: Option<usize>, what: &str) -> String {
    match target {
        Some(j) => format!("{id}/eps={eps}/target={j}/{what}"),
        None => format!("{id}/eps={eps}/{what}"),
    }
}

/// Oracle stream index, unique per experiment, eps position and use.
fn oracle_index(id: ExperimentId, eps_pos: usize, slot: usize) -> u64 {
    (id as u64) << 32 | (eps_pos as u64) << 16 | slot as u64
}

fn clock(r: &Runner, eps: f64) -> Result<ScaledClock> {
    ScaledClock::new(r.validated().h_eps(eps), 1.0 / eps)
}

/// Radius of the obstacle carrying a boundary target.
fn carrier_radius(r: &Runner, t: &Target) -> Option<f64> {
    match t.kind() {
        TargetKind::Boundary { obstacle_id } => r.validated().table.obstacle(obstacle_id).map(|o| o.radius),
        TargetKind::Interior => None,
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn push_counts(out: &mut ExperimentOutput, eps: f64, label: usize, per_orbit: &[Vec<u64>]) -> Vec<u64> {
    let flat: Vec<u64> = per_orbit.iter().flatten().copied().collect();
    out.counts.extend(flat.iter().enumerate().map(|(w, &count)| CountRow {
        eps,
        window: w,
        label,
        count,
    }));
    flat
}

fn e1_poissonity(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E1;
    let v = r.validated();
    let c = &v.config;
    let mut out = ExperimentOutput::new(id);
    let d = total_weight(&v.targets);
    for &eps in &c.eps_schedule {
        let batch = if c.long_orbit { r.long_orbit(eps)? } else { r.batch(eps)? };
        out.add_batch_entries(&batch);
        let clock = clock(r, eps)?;
        let horizon = batch.t_max * clock.h_eps;
        let pos = |e: &EntryEvent| e.phi_in >= 0.0;
        let neg = |e: &EntryEvent| e.phi_in < 0.0;
        let all = |_: &EntryEvent| true;
        for t in &v.targets {
            let j = t.label();
            let pps = batch.processes(Some(j), &clock);
            let times: Vec<Vec<f64>> = pps.iter().map(|p| p.times()).collect();
            let ks = exp_interarrival_orbits(&times, c.alpha);
            if let Ok(rep) = &ks {
                out.metric(tag(id, eps, Some(j), "ks_statistic"), rep.statistic);
            }
            out.report(tag(id, eps, Some(j), "exp_interarrival"), ks);
            let counts = window_counts(&pps, horizon, c.window, &[&all]);
            let per_orbit: Vec<Vec<u64>> = counts.into_iter().map(|mut o| o.remove(0)).collect();
            let flat = push_counts(&mut out, eps, j, &per_orbit);
            out.report(tag(id, eps, Some(j), "poisson_dispersion"), poisson_dispersion(&flat, c.alpha));
            out.report(
                tag(id, eps, Some(j), "window_independence"),
                window_independence(&pps, horizon, c.window, &[&pos, &neg], c.alpha),
            );
            out.metric(tag(id, eps, Some(j), "entries"), batch.count(j) as f64);
            out.metric(
                tag(id, eps, Some(j), "scaled_intensity"),
                batch.count(j) as f64 / (horizon * batch.orbits.len() as f64),
            );
        }
        if v.targets.len() > 1 {
            let pps = batch.processes(None, &clock);
            let times: Vec<Vec<f64>> = pps.iter().map(|p| p.times()).collect();
            out.report(tag(id, eps, None, "pooled/exp_interarrival"), exp_interarrival_orbits(&times, c.alpha));
            let classes: Vec<EntryClass> = v
                .targets
                .iter()
                .map(|t| {
                    let j = t.label();
                    Box::new(move |e: &EntryEvent| e.label == j) as EntryClass
                })
                .collect();
            let class_refs: Vec<&dyn Fn(&EntryEvent) -> bool> = classes.iter().map(|b| b.as_ref()).collect();
            out.report(
                tag(id, eps, None, "pooled/window_independence"),
                window_independence(&pps, horizon, c.window, &class_refs, c.alpha),
            );
            let total: usize = v.targets.iter().map(|t| batch.count(t.label())).sum();
            let curvature_allowance: f64 = v
                .targets
                .iter()
                .filter_map(|t| carrier_radius(r, t).map(|rho| t.shape_radius() * eps / (PI * rho)))
                .sum();
            for t in &v.targets {
                let w = t.d() as f64 * t.shape_radius() / d;
                let frac = batch.count(t.label()) as f64 / total as f64;
                let sigma = (w * (1.0 - w) / total as f64).sqrt();
                out.check(Check::within(
                    tag(id, eps, Some(t.label()), "label_fraction"),
                    frac,
                    w,
                    3.0 * sigma + curvature_allowance,
                ));
            }
        }
        out.metric(tag(id, eps, None, "discarded_trajectories"), batch.discarded.len() as f64);
    }
    Ok(out)
}

fn e2_mark_law(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E2;
    let v = r.validated();
    let c = &v.config;
    let mut out = ExperimentOutput::new(id);
    for &eps in &c.eps_schedule {
        let batch = r.batch(eps)?;
        out.add_batch_entries(&batch);
        for t in &v.targets {
            let j = t.label();
            let entries: Vec<&EntryEvent> = batch.entries(j).collect();
            let phis: Vec<f64> = entries.iter().map(|e| e.phi_in).collect();
            out.report(
                tag(id, eps, Some(j), "phi_in_ks"),
                ks_one_sample(&phis, |x| CosineAngle.cdf(x), c.alpha),
            );
            let n = entries.len() as f64;
            out.metric(tag(id, eps, Some(j), "entries"), n);
            match carrier_radius(r, t) {
                None => {
                    let angles: Vec<f64> = entries.iter().map(|e| e.p_angle()).collect();
                    out.report(
                        tag(id, eps, Some(j), "p_angle_uniform"),
                        chi2_uniform(&angles, 0.0, TAU, ANGLE_BINS, c.alpha),
                    );
                }
                Some(rho) => {
                    let normal = t.inward_normal();
                    let comps: Vec<f64> = entries.iter().map(|e| e.p.as_vec().dot(normal)).collect();
                    let leak = comps.iter().filter(|&&s| s < 0.0).count() as f64 / n;
                    let bound = 2.0 * t.shape_radius() * eps / (PI * rho);
                    let sigma = (bound * (1.0 - bound) / n).sqrt();
                    out.check(Check::at_most(tag(id, eps, Some(j), "leakage_fraction"), leak, bound + 3.0 * sigma));
                    let min = comps.iter().copied().fold(f64::INFINITY, f64::min);
                    out.check(Check::at_least(
                        tag(id, eps, Some(j), "min_normal_component"),
                        min,
                        -t.shape_radius() * eps / rho,
                    ));
                    let rel: Vec<f64> = entries
                        .iter()
                        .map(|e| {
                            let a = e.p.as_vec();
                            normal.cross(a).atan2(normal.dot(a))
                        })
                        .collect();
                    out.metric(
                        tag(id, eps, Some(j), "half_circle_ks_statistic"),
                        ks_statistic(&rel, |x| Uniform::new(-FRAC_PI_2, FRAC_PI_2).cdf(x)),
                    );
                }
            }
        }
    }
    Ok(out)
}

struct HazardSample {
    p: f64,
    counts: Vec<Hazard<u64>>,
    swapped: Vec<Hazard<u64>>,
    local: Vec<Hazard<f64>>,
}

fn hazard_sample(r: &Runner, trials: &TrialBatch) -> Result<HazardSample> {
    let v = r.validated();
    let w: Vec<f64> = v.targets[..2].iter().map(|t| t.d() as f64 * t.shape_radius()).collect();
    let p = w[1] / (w[0] + w[1]);
    let clock = clock(r, trials.eps)?;
    let labels = trials.processes(&clock, |e, _| e.label);
    let swapped: Vec<MarkedPointSet<usize>> = trials.processes(&clock, |e, _| 1 - e.label);
    let local = trials.processes(&clock, |e, c| (e.label, e.duration * c.a_eps));
    Ok(HazardSample {
        p,
        counts: labels.iter().map(hazard_count).collect(),
        swapped: swapped.iter().map(hazard_count).collect(),
        local: local.iter().map(hazard_local_time).collect(),
    })
}

fn geometric_fit(out: &mut ExperimentOutput, name: String, values: &[u64], p: f64, alpha: f64) {
    let counts = fold_tail(values, GEOMETRIC_CELLS);
    let mut probs: Vec<f64> = (0..GEOMETRIC_CELLS as u64).map(|k| geometric_pmf(k, p)).collect();
    probs.push(p.powi(GEOMETRIC_CELLS as i32));
    out.report(name, chi2_gof(&counts, &probs, alpha));
}

fn e3_committor(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E3;
    let c = r.config();
    let mut out = ExperimentOutput::new(id);
    for &eps in &c.eps_schedule {
        let trials = r.trials(eps)?;
        out.add_trial_entries(eps, &trials.trials);
        let hs = hazard_sample(r, &trials)?;
        let n = hs.counts.len() as f64;
        let truncated = hs.counts.iter().filter(|h| h.truncated).count() as f64;
        out.check(Check::at_most(tag(id, eps, None, "truncated_fraction"), truncated / n, 0.01));
        let valid: Vec<u64> = hs.counts.iter().filter(|h| !h.truncated).map(|h| h.value).collect();
        let committor = valid.iter().filter(|&&k| k == 0).count() as f64 / valid.len() as f64;
        out.check(Check::within(tag(id, eps, None, "committor"), committor, 1.0 - hs.p, 0.02));
        out.metric(
            tag(id, eps, None, "committor_std_err"),
            (committor * (1.0 - committor) / valid.len() as f64).sqrt(),
        );
        out.metric(tag(id, eps, None, "valid_trials"), valid.len() as f64);
        geometric_fit(&mut out, tag(id, eps, None, "geometric_chi2"), &valid, hs.p, c.alpha);

        let valid_swapped: Vec<u64> = hs.swapped.iter().filter(|h| !h.truncated).map(|h| h.value).collect();
        geometric_fit(&mut out, tag(id, eps, None, "swapped/geometric_chi2"), &valid_swapped, 1.0 - hs.p, c.alpha);
        let both: Vec<(u64, u64)> = hs
            .counts
            .iter()
            .zip(&hs.swapped)
            .filter(|(a, b)| !a.truncated && !b.truncated)
            .map(|(a, b)| (a.value, b.value))
            .collect();
        let first0 = both.iter().filter(|(a, _)| *a == 0).count() as f64;
        let first1 = both.iter().filter(|(_, b)| *b == 0).count() as f64;
        out.check(Check::within(
            tag(id, eps, None, "swap_consistency"),
            (first0 + first1) / both.len() as f64,
            1.0,
            1e-12,
        ));
        out.metric(tag(id, eps, None, "discarded_trials"), trials.discarded.len() as f64);
    }
    Ok(out)
}

fn rate_exponent(eps: &[f64], rates: &[f64]) -> f64 {
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = rates.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn e4_local_time(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E4;
    let v = r.validated();
    let c = &v.config;
    let mut out = ExperimentOutput::new(id);
    let d = total_weight(&v.targets);
    let area = v.table.area_q();
    let mut rates: Vec<Vec<f64>> = vec![Vec::new(); v.targets.len()];
    for (k, &eps) in c.eps_schedule.iter().enumerate() {
        let batch = r.batch(eps)?;
        out.add_batch_entries(&batch);
        let clock = clock(r, eps)?;
        for t in &v.targets {
            let j = t.label();
            let rj = t.shape_radius();
            let entries: Vec<&EntryEvent> = batch.entries(j).collect();
            let xs: Vec<f64> = entries.iter().map(|e| e.duration / eps).collect();
            let chord = ChordTime { r: rj };
            match carrier_radius(r, t) {
                None => {
                    out.report(tag(id, eps, Some(j), "chord_time_ks"), ks_one_sample(&xs, |x| chord.cdf(x), c.alpha));
                    local_time_windows(r, &mut out, &batch, t, &clock, oracle_index(id, k, j))?;
                }
                Some(rho) => {
                    let (mean, se) = mean_and_se(&xs);
                    let bias = mean - PI * rj / 2.0;
                    out.metric(tag(id, eps, Some(j), "chord_mean_bias"), bias);
                    out.check(Check::at_most(
                        tag(id, eps, Some(j), "chord_mean_bias_bound"),
                        bias.abs(),
                        2.0 * rj * rj * eps / rho + 3.0 * se,
                    ));
                    let dev = entries
                        .iter()
                        .map(|e| (e.duration / eps - 2.0 * rj * e.phi_in.cos()).abs())
                        .fold(0.0, f64::max);
                    out.check(Check::at_most(
                        tag(id, eps, Some(j), "chord_deviation_bound"),
                        dev,
                        4.0 * rj * rj * eps / rho,
                    ));
                    out.metric(
                        tag(id, eps, Some(j), "chord_time_ks_statistic"),
                        ks_statistic(&xs, |x| chord.cdf(x)),
                    );
                }
            }

            let est = batch.rate(j)?;
            rates[j].push(est.rate);
            let dj = t.d() as f64;
            let theorem = PI * dj * rj * eps / area;
            let flux = crossing_flux_rate(&v.table, t, eps);
            out.check(Check::within(tag(id, eps, Some(j), "rate_vs_theorem_constant"), est.rate, theorem, 2.0 * est.std_err));
            out.check(Check::within(tag(id, eps, Some(j), "rate_vs_flux"), est.rate, flux, 3.0 * est.std_err));
            out.metric(tag(id, eps, Some(j), "rate"), est.rate);
            out.metric(tag(id, eps, Some(j), "rate_std_err"), est.std_err);
            out.metric(tag(id, eps, Some(j), "rate_flux_oracle"), flux);
            out.metric(tag(id, eps, Some(j), "rate_theorem_constant"), theorem);
            out.metric(tag(id, eps, Some(j), "rate_appendix_clock_constant"), dj * rj * eps / area);
            out.metric(tag(id, eps, Some(j), "rate_over_eps"), est.rate / eps);
            out.metric(tag(id, eps, Some(j), "local_time_rate_constant"), dj * area / (d * d * PI));
            out.metric(tag(id, eps, Some(j), "rate_per_theorem_clock"), est.rate / clock.h_eps);
        }
    }
    if c.eps_schedule.len() >= 2 {
        for t in &v.targets {
            let j = t.label();
            let slope = rate_exponent(&c.eps_schedule, &rates[j]);
            out.check(Check::within(tag(id, c.eps_schedule[0], Some(j), "rate_exponent"), slope, 1.0, 0.05));
        }
    }
    Ok(out)
}

/// Total normalized local time per window against a compound Poisson oracle
/// with the fitted window intensity.
fn local_time_windows(
    r: &Runner,
    out: &mut ExperimentOutput,
    batch: &EntryBatch,
    t: &Target,
    clock: &ScaledClock,
    stream: u64,
) -> Result<()> {
    let c = r.config();
    let j = t.label();
    let eps = batch.eps;
    let per_orbit = (batch.t_max * clock.h_eps / c.window).floor() as usize;
    let mut sums = Vec::new();
    let mut n_total = 0usize;
    for pp in batch.processes(Some(j), clock) {
        let mut s = vec![0.0; per_orbit];
        for p in pp.points() {
            let w = (p.t / c.window).floor() as usize;
            if w < per_orbit {
                s[w] += p.mark.duration * clock.a_eps;
                n_total += 1;
            }
        }
        sums.extend(s);
    }
    if sums.is_empty() {
        return Err(Error::TooFewSamples { needed: 30, got: 0 });
    }
    let lambda = n_total as f64 / sums.len() as f64;
    let mut rng = oracle_rng(c.master_seed, stream);
    let pois = Poisson::new(lambda.max(1e-12)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let law = ChordTime { r: t.shape_radius() };
    let oracle: Vec<f64> = (0..c.oracle_samples)
        .map(|_| {
            let n = pois.sample(&mut rng) as usize;
            (0..n).map(|_| law.sample(&mut rng)).sum()
        })
        .collect();
    out.metric(tag(ExperimentId::E4, eps, Some(j), "window_entry_mean"), lambda);
    out.report(
        tag(ExperimentId::E4, eps, Some(j), "window_local_time_ks"),
        two_sample_ks(&sums, &oracle, c.alpha),
    );
    Ok(())
}

fn e5_closest_approach(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E5;
    let v = r.validated();
    let c = &v.config;
    let mut out = ExperimentOutput::new(id);
    let area = v.table.area_q();
    for &eps in &c.eps_schedule {
        let batch = r.batch(eps)?;
        out.add_batch_entries(&batch);
        for t in &v.targets {
            let j = t.label();
            let rj = t.shape_radius();
            let entries: Vec<&EntryEvent> = batch.entries(j).collect();
            let ys: Vec<f64> = entries.iter().map(|e| e.closest / (rj * eps)).collect();
            if t.is_interior() {
                out.report(
                    tag(id, eps, Some(j), "closest_uniform_ks"),
                    ks_one_sample(&ys, |x| x.clamp(0.0, 1.0), c.alpha),
                );
                let dev = entries
                    .iter()
                    .zip(&ys)
                    .map(|(e, y)| (y - e.phi_in.sin().abs()).abs())
                    .fold(0.0, f64::max);
                out.check(Check::at_most(tag(id, eps, Some(j), "closest_vs_sin_phi"), dev, 1e-9));
                // thinning a Poisson process by the mark keeps it Poisson
                let thin = ScaledClock::new(v.h_eps(eps), 1.0)?;
                let times: Vec<Vec<f64>> = batch
                    .processes(Some(j), &thin)
                    .iter()
                    .map(|pp| pp.points().iter().filter(|p| p.mark.closest <= 0.5 * rj * eps).map(|p| p.t).collect())
                    .collect();
                out.report(tag(id, eps, Some(j), "thinned_exp_interarrival"), exp_interarrival_orbits(&times, c.alpha));
            } else {
                out.metric(
                    tag(id, eps, Some(j), "closest_uniform_ks_statistic"),
                    ks_statistic(&ys, |x| x.clamp(0.0, 1.0)),
                );
            }
            let est = batch.rate(j)?;
            let dj = t.d() as f64;
            out.metric(tag(id, eps, Some(j), "rate"), est.rate);
            out.metric(tag(id, eps, Some(j), "intensity_appendix_clock"), est.rate / (dj * rj * eps / area));
            out.metric(tag(id, eps, Some(j), "intensity_theorem_clock"), est.rate / (PI * dj * rj * eps / area));
        }
    }
    Ok(out)
}

fn e6_line_process(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E6;
    let v = r.validated();
    let c = &v.config;
    let mut out = ExperimentOutput::new(id);
    for (k, &eps) in c.eps_schedule.iter().enumerate() {
        let batch = r.batch(eps)?;
        out.add_batch_entries(&batch);
        for t in v.targets.iter().filter(|t| t.is_interior()) {
            let j = t.label();
            let lines: Vec<_> = batch.entries(j).map(line_map).collect();
            let rs: Vec<f64> = lines.iter().map(|l| l.r).collect();
            let thetas: Vec<f64> = lines.iter().map(|l| l.theta).collect();
            out.report(tag(id, eps, Some(j), "r_uniform_ks"), ks_one_sample(&rs, |x| Uniform::new(-1.0, 1.0).cdf(x), c.alpha));
            out.report(
                tag(id, eps, Some(j), "theta_uniform_ks"),
                ks_one_sample(&thetas, |x| Uniform::new(0.0, PI).cdf(x), c.alpha),
            );
            let mut table = vec![vec![0u64; 4]; 4];
            for l in &lines {
                let a = (((l.r + 1.0) / 2.0 * 4.0).floor() as usize).min(3);
                let b = ((l.theta / PI * 4.0).floor() as usize).min(3);
                table[a][b] += 1;
            }
            out.report(tag(id, eps, Some(j), "r_theta_independence"), chi2_independence(&table, c.alpha));
            let phis: Vec<f64> = batch.entries(j).map(|e| e.phi_in).collect();
            out.report(tag(id, eps, Some(j), "phi_cos_ks"), ks_one_sample(&phis, |x| CosineAngle.cdf(x), c.alpha));

            let flow_window = c.line_window / eps;
            let unit = ScaledClock::new(1.0, 1.0)?;
            let all = |_: &EntryEvent| true;
            let counts = window_counts(&batch.processes(Some(j), &unit), batch.t_max, flow_window, &[&all]);
            let per_orbit: Vec<Vec<u64>> = counts.into_iter().map(|mut o| o.remove(0)).collect();
            let flat = push_counts(&mut out, eps, j, &per_orbit);
            out.report(tag(id, eps, Some(j), "line_count_dispersion"), poisson_dispersion(&flat, c.alpha));
            if flat.is_empty() {
                continue;
            }
            let kappa = flat.iter().sum::<u64>() as f64 / flat.len() as f64 / 2.0;
            out.metric(tag(id, eps, Some(j), "kappa_hat"), kappa);
            if kappa > 0.0 {
                let mut rng = oracle_rng(c.master_seed, oracle_index(id, k, j));
                let reps = sample_line_process(kappa, c.oracle_samples, &mut rng)?;
                let max = flat.iter().copied().max().unwrap_or(0) as usize;
                let sim_max = reps.iter().map(Vec::len).max().unwrap_or(0);
                let mut h_emp = vec![0u64; max.max(sim_max) + 1];
                let mut h_sim = h_emp.clone();
                for &x in &flat {
                    h_emp[x as usize] += 1;
                }
                for rep in &reps {
                    h_sim[rep.len()] += 1;
                }
                out.report(tag(id, eps, Some(j), "line_count_vs_oracle"), chi2_homogeneity(&h_emp, &h_sim, c.alpha));
            }
        }
    }
    Ok(out)
}

fn e7_records(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E7;
    let c = r.config();
    let mut out = ExperimentOutput::new(id);
    let lam = c.record_intensity;
    let ranks = c.max_record_rank;
    let count_time = c.record_count_time;

    struct Replica {
        n: usize,
        is_record: Vec<bool>,
        records: Vec<f64>,
    }
    let replicas: Vec<Replica> = (0..c.record_replicas)
        .into_par_iter()
        .map(|i| -> Result<Replica> {
            let mut rng = synthetic_rng(c.master_seed, i as u64);
            let pp = sample_ppp(lam, &Uniform::new(0.0, 1.0), c.record_horizon, &mut rng)?;
            // time in units of the mean inter-arrival
            let scaled = MarkedPointSet::from_points(
                pp.points()
                    .iter()
                    .map(|p| crate::process::MarkedPoint { t: p.t * lam, mark: p.mark })
                    .collect(),
            );
            let records = records_extract(&scaled, RecordDirection::Min);
            let mut is_record = vec![false; pp.len()];
            let mut best = f64::INFINITY;
            for (l, p) in scaled.points().iter().enumerate() {
                if p.mark < best {
                    best = p.mark;
                    is_record[l] = true;
                }
            }
            Ok(Replica {
                n: pp.len(),
                is_record,
                records,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    for (i, rep) in replicas.iter().enumerate() {
        out.records.push(RecordRow {
            replica: i,
            n_points: rep.n,
            n_records: rep.records.len(),
            records_by_count_time: rep.records.iter().filter(|&&t| t <= count_time).count(),
        });
    }

    for l in 1..=ranks {
        let with_l: Vec<&Replica> = replicas.iter().filter(|rep| rep.n >= l).collect();
        let m = with_l.len() as f64;
        let hits = with_l.iter().filter(|rep| rep.is_record[l - 1]).count() as f64;
        let p = 1.0 / l as f64;
        let sigma = (p * (1.0 - p) / m).sqrt();
        out.check(Check::within(format!("{id}/rank={l}/record_probability"), hits / m, p, 3.0 * sigma));
    }
    // indicators of ranks 2..=ranks over replicas that reach every rank
    let full: Vec<&Replica> = replicas.iter().filter(|rep| rep.n >= ranks).collect();
    let mut max_corr: f64 = 0.0;
    for a in 2..=ranks {
        for b in (a + 1)..=ranks {
            let x: Vec<f64> = full.iter().map(|rep| rep.is_record[a - 1] as u8 as f64).collect();
            let y: Vec<f64> = full.iter().map(|rep| rep.is_record[b - 1] as u8 as f64).collect();
            max_corr = max_corr.max(correlation(&x, &y).abs());
        }
    }
    out.check(Check::at_most(
        format!("{id}/max_indicator_correlation"),
        max_corr,
        4.0 / (full.len() as f64).sqrt(),
    ));

    let observed: Vec<u64> = out.records.iter().map(|r| r.records_by_count_time as u64).collect();
    let k_max = 12;
    out.report(
        format!("{id}/record_count_chi2"),
        chi2_gof(&fold_tail(&observed, k_max), &record_count_pmf(count_time, k_max), c.alpha),
    );
    let mut rng = oracle_rng(c.master_seed, oracle_index(id, 0, 0));
    let limit: Vec<Vec<f64>> = (0..c.oracle_samples)
        .map(|_| sample_record_limit(c.record_horizon * lam, &mut rng))
        .collect::<Result<_>>()?;
    let limit_counts: Vec<u64> = limit.iter().map(|ts| ts.iter().filter(|&&t| t <= count_time).count() as u64).collect();
    out.report(
        format!("{id}/record_count_vs_limit_sampler"),
        chi2_homogeneity(&fold_tail(&observed, k_max), &fold_tail(&limit_counts, k_max), c.alpha),
    );
    let emp_times: Vec<f64> = replicas.iter().flat_map(|rep| rep.records.iter().copied()).filter(|&t| t <= count_time).collect();
    let lim_times: Vec<f64> = limit.iter().flatten().copied().filter(|&t| t <= count_time).collect();
    out.report(format!("{id}/record_times_vs_limit_sampler"), two_sample_ks(&emp_times, &lim_times, c.alpha));
    Ok(out)
}

fn e8_hazard_local_time(r: &Runner) -> Result<ExperimentOutput> {
    let id = ExperimentId::E8;
    let v = r.validated();
    let c = &v.config;
    let mut out = ExperimentOutput::new(id);
    let r1 = v.targets.get(1).map(|t| t.shape_radius()).ok_or_else(|| Error::Config("E8 needs two targets".into()))?;
    for (k, &eps) in c.eps_schedule.iter().enumerate() {
        let trials = r.trials(eps)?;
        out.add_trial_entries(eps, &trials.trials);
        let hs = hazard_sample(r, &trials)?;
        let sample: Vec<f64> = hs.local.iter().filter(|h| !h.truncated).map(|h| h.value).collect();
        let zero = sample.iter().filter(|&&x| x == 0.0).count() as f64 / sample.len() as f64;
        out.check(Check::within(tag(id, eps, None, "zero_probability"), zero, 1.0 - hs.p, 0.02));

        let mut rng = oracle_rng(c.master_seed, oracle_index(id, k, 0));
        let literal = compound_local_time_sampler(hs.p, &Scaled { factor: r1, law: HazardY }, c.oracle_samples, &mut rng)?;
        out.report(tag(id, eps, None, "two_sample_ks"), two_sample_ks(&sample, &literal, c.alpha));
        let mut rng = oracle_rng(c.master_seed, oracle_index(id, k, 1));
        let chord =
            compound_local_time_sampler(hs.p, &Scaled { factor: 2.0 * r1, law: HazardY }, c.oracle_samples, &mut rng)?;
        out.report(tag(id, eps, None, "two_sample_ks_chord_scaled"), two_sample_ks(&sample, &chord, c.alpha));

        let (mean, se) = mean_and_se(&sample);
        let wald = hs.p / (1.0 - hs.p) * PI / 4.0;
        out.metric(tag(id, eps, None, "mean"), mean);
        out.metric(tag(id, eps, None, "mean_std_err"), se);
        out.metric(tag(id, eps, None, "mean_oracle_r1"), r1 * wald);
        out.metric(tag(id, eps, None, "mean_oracle_2r1"), 2.0 * r1 * wald);
        out.metric(tag(id, eps, None, "valid_trials"), sample.len() as f64);
    }
    Ok(out)
}
