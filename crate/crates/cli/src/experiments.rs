use gapped_ent::channels::{ep_check, mult_gap, mult_search, DwhChannel};
use gapped_ent::entanglement::{convergence_experiment, distant_decay_experiment, fannes_gap, EofOptions};
use gapped_ent::fcs::{builtin_spec, transfer};
use gapped_ent::gapped::{
    build_model, diagonalize, entropy_bound_eval, entropy_profile, extremal_distribution, extremal_entropy,
    gs_projector_approx, lr_probe, region_split, sphere_bound, sphere_count, sphere_count_brute, GsOptions,
    LocalOperator, ModelKind, PaperConstants, PbMethod,
};
use gapped_ent::qlinalg::{random, DensityMatrix, Mat, PureState, TensorShape};
use gapped_ent::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Kind, ParamDef, Params};
use crate::error::{CliError, Context};
use crate::output::Outcome;

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamDef],
    pub run: fn(&Params, u64) -> Result<Outcome, CliError>,
}

/// Independent stream `stream` of the run's generator.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

const fn p(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> ParamDef {
    ParamDef { name, kind, default, help }
}

pub static REGISTRY: &[Experiment] = &[
    Experiment {
        name: "fcs-convergence",
        description: "EoF of the first spin against the rest of an n-site block, compared with the memory state",
        params: &[
            p("spec", Kind::Text, "\"aklt\"", "finitely correlated state"),
            p("n_max", Kind::UInt, "6", "largest block length"),
            p("restarts", Kind::UInt, "32", "optimizer restarts"),
            p("max_steps", Kind::UInt, "5000", "optimizer step limit"),
        ],
        run: fcs_convergence,
    },
    Experiment {
        name: "fcs-distant",
        description: "Trace distance between the first spin and a distant block and its product, against c lambda^(p-2)",
        params: &[
            p("spec", Kind::Text, "\"aklt\"", "finitely correlated state"),
            p("n", Kind::UInt, "7", "chain length"),
            p("p_min", Kind::UInt, "3", "first block start"),
            p("p_max", Kind::UInt, "6", "last block start"),
        ],
        run: fcs_distant,
    },
    Experiment {
        name: "channel-mult",
        description: "Closed-form tensor output norms and the multiplicativity gap of depolarized Werner-Holevo channels",
        params: &[
            p("d", Kind::UIntList, "[2, 3]", "local dimensions"),
            p("lambdas", Kind::FloatList, "[0.0, 0.25, 0.5, 0.75, 1.0]", "channel parameters"),
            p("samples", Kind::UInt, "10000", "Haar inputs per grid point"),
            p("direct_samples", Kind::UInt, "500", "inputs checked against the direct computation"),
            p("restarts", Kind::UInt, "20", "search restarts"),
            p("steps", Kind::UInt, "2000", "search proposals per restart"),
        ],
        run: channel_mult,
    },
    Experiment {
        name: "channel-ep",
        description: "Entrywise positivity of the channel in the standard basis, random bases and the circular qubit basis",
        params: &[
            p("d", Kind::UInt, "3", "local dimension"),
            p("lambda", Kind::Float, "0.5", "channel parameter"),
            p("bases", Kind::UInt, "100", "random orthonormal bases"),
        ],
        run: channel_ep,
    },
    Experiment {
        name: "area-law",
        description: "Ground-state entanglement entropy at every cut of a transverse-field Ising chain, gapped against critical",
        params: &[
            p("n", Kind::UInt, "12", "chain length"),
            p("h_gapped", Kind::Float, "2.0", "field of the gapped chain"),
            p("h_critical", Kind::Float, "1.0", "field of the critical chain"),
            p("cut_lo", Kind::UInt, "4", "first interior cut"),
            p("cut_hi", Kind::UInt, "8", "last interior cut"),
        ],
        run: area_law,
    },
    Experiment {
        name: "gs-approx",
        description: "Boundary-localized approximation P_B P_A P_E of the ground-state projector over a sweep of l",
        params: &[
            p("model", Kind::Text, "\"tfim(h=2)\"", "chain model"),
            p("n", Kind::UInt, "12", "chain length"),
            p("start", Kind::UInt, "0", "first site of A (0-based)"),
            p("end", Kind::UInt, "5", "last site of A (0-based)"),
            p("ells", Kind::UIntList, "[1, 2, 3]", "boundary widths"),
            p("method", Kind::Choice(&["exact", "quadrature"]), "\"exact\"", "evaluation of P_B(alpha)"),
            p("nodes", Kind::UInt, "80", "Gauss-Hermite nodes for the quadrature method"),
        ],
        run: gs_approx,
    },
    Experiment {
        name: "lr-probe",
        description: "Commutator growth of a Heisenberg-evolved single-site operator, arrival times and the Lieb-Robinson bound",
        params: &[
            p("model", Kind::Text, "\"tfim(h=1)\"", "chain model"),
            p("n", Kind::UInt, "10", "chain length"),
            p("x", Kind::UInt, "0", "site of the evolved operator"),
            p("t_max", Kind::Float, "4.0", "last time"),
            p("dt", Kind::Float, "0.1", "time step"),
        ],
        run: lr_experiment,
    },
    Experiment {
        name: "lemma-suite",
        description: "Lattice sphere counts, the entropy bound for tail-constrained distributions and the Fannes inequality",
        params: &[
            p("n_max", Kind::UInt, "6", "largest sphere radius"),
            p("d_max", Kind::UInt, "4", "largest lattice dimension"),
            p("samples", Kind::UInt, "200", "admissible random distributions"),
            p("pairs", Kind::UInt, "200", "close density-matrix pairs"),
        ],
        run: lemma_suite,
    },
];

pub fn find(name: &str) -> Result<&'static Experiment, CliError> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<_> = REGISTRY.iter().map(|e| e.name).collect();
        invalid(format!("unknown experiment {name:?}; known: {}", names.join(", ")))
    })
}

fn fcs_convergence(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let spec = builtin_spec(p.str("spec")).context("spec")?;
    let n_max = p.usize("n_max");
    let opts = EofOptions { restarts: p.usize("restarts"), max_steps: p.usize("max_steps"), seed, ..EofOptions::default() };
    let table = convergence_experiment(&spec, n_max, &opts).context("convergence experiment")?;
    let mut out = Outcome::new(&["n", "eof_chain", "eof_ab", "gap", "slope_fit"]);
    let slope = table.slope.unwrap_or(f64::NAN);
    for r in &table.rows {
        out.row(vec![r.n.into(), r.eof_chain.into(), r.eof_ab.into(), r.gap.into(), slope.into()]);
    }
    let slack = 2e-3;
    let min_gap = table.rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    out.check("lower bound", min_gap >= -slack, format!("min gap {min_gap:.3e}"));
    let tail: Vec<f64> = table.rows.iter().filter(|r| r.n >= 3).map(|r| r.gap).collect();
    let mono = tail.windows(2).all(|w| w[1] <= w[0] + slack);
    out.check("non-increasing beyond n=3", mono, format!("{tail:?}"));
    let gap_at = |n: usize| table.rows.iter().find(|r| r.n == n).map(|r| r.gap);
    if let (Some(g4), Some(g6)) = (gap_at(4), gap_at(6)) {
        out.check("gap_6 <= 0.6 gap_4", g6 <= 0.6 * g4, format!("gap_4 {g4:.4e}, gap_6 {g6:.4e}"));
    }
    out.note("slope", table.slope);
    out.note("max_spread", table.rows.iter().map(|r| r.gap_spread).fold(0.0, f64::max));
    Ok(out)
}

fn fcs_distant(p: &Params, _seed: u64) -> Result<Outcome, CliError> {
    let spec = builtin_spec(p.str("spec")).context("spec")?;
    let (n, lo, hi) = (p.usize("n"), p.usize("p_min"), p.usize("p_max"));
    if lo < 2 || hi < lo || hi > n {
        return Err(invalid(format!("need 2 <= p_min <= p_max <= n, got {lo}, {hi}, {n}")));
    }
    let t = transfer(&spec).context("transfer operator")?;
    let ps: Vec<usize> = (lo..=hi).collect();
    let rows = distant_decay_experiment(&spec, n, &ps).context("distant decay")?;
    let mut out = Outcome::new(&["p", "t_p", "ratio", "bound", "bound_cb"]);
    let mut ratio_ok = true;
    for (k, r) in rows.iter().enumerate() {
        let ratio = rows.get(k + 1).filter(|_| r.t_p > 1e-8).map(|next| next.t_p / r.t_p).unwrap_or(f64::NAN);
        if ratio.is_finite() && ratio > t.lambda + 0.15 {
            ratio_ok = false;
        }
        out.row(vec![r.p.into(), r.t_p.into(), ratio.into(), r.bound.into(), r.bound_cb.into()]);
    }
    out.check("T_(p+1)/T_p <= lambda + 0.15", ratio_ok, format!("lambda {:.6}", t.lambda));
    out.check("T_p <= c lambda^(p-2)", rows.iter().all(|r| r.within), format!("c {:.6}", t.c));
    out.note("lambda", t.lambda);
    out.note("c", t.c);
    out.note("c_cb", t.c_cb);
    out.note("within_cb", rows.iter().all(|r| r.within_cb));
    Ok(out)
}

fn hs_sq(m: gapped_ent::qlinalg::MatRef<'_, c64>) -> f64 {
    (0..m.ncols()).flat_map(|j| (0..m.nrows()).map(move |i| (i, j))).map(|(i, j)| m[(i, j)].norm_sqr()).sum()
}

/// `(|0⟩ + i|1⟩)/√2` in dimension `d`.
fn plus_i(d: usize) -> Result<PureState, CliError> {
    let mut v = vec![c64::new(0.0, 0.0); d];
    v[0] = c64::new(1.0, 0.0);
    v[1] = c64::new(0.0, 1.0);
    PureState::normalized(v, TensorShape::single(d).context("shape")?).context("state")
}

fn channel_mult(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::new(&[
        "d",
        "lambda",
        "max_norm_sq",
        "attained_norm_sq",
        "max_closed_direct_diff",
        "min_gap",
        "search_best",
        "search_ceiling",
    ]);
    let (samples, direct) = (p.usize("samples"), p.usize("direct_samples"));
    let mut worst_diff = 0.0f64;
    let mut worst_attain = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut search_ok = true;
    let mut stream = 0;
    for d in p.usize_list("d") {
        if d < 2 {
            return Err(invalid("channel dimension must be at least 2"));
        }
        let shape = TensorShape::uniform(d, 2).context("shape")?;
        for lam in p.f64_list("lambdas") {
            let ch = DwhChannel::new(lam, d).context("channel")?;
            let mut rng = stream_rng(seed, stream);
            stream += 1;
            let max_sq = ch.max_output_2norm_sq();
            let out_state = ch.apply(&plus_i(d)?.density()).context("apply")?;
            let attained = hs_sq(out_state.mat());
            worst_attain = worst_attain.max((attained - max_sq).abs());
            let mut diff = 0.0f64;
            let mut gap = f64::INFINITY;
            for k in 0..samples.max(direct) {
                let psi = random::gaussian_state(&mut rng, &shape);
                if k < samples {
                    gap = gap.min(mult_gap(&ch, &psi).context("gap")?.gap);
                }
                if k < direct {
                    let closed = ch.tensor_output_2norm_sq(&psi).context("closed form")?;
                    let dir = ch.tensor_output_2norm_sq_direct(&psi).context("direct")?;
                    diff = diff.max((closed - dir).abs());
                }
            }
            let search = mult_search(&ch, p.usize("restarts"), p.usize("steps"), &mut rng).context("search")?;
            let ceiling = max_sq * max_sq;
            search_ok &= search.best <= ceiling + 1e-8;
            worst_diff = worst_diff.max(diff);
            min_gap = min_gap.min(gap);
            out.row(vec![
                d.into(),
                lam.into(),
                max_sq.into(),
                attained.into(),
                diff.into(),
                gap.into(),
                search.best.into(),
                ceiling.into(),
            ]);
        }
    }
    out.check("closed form = direct", worst_diff <= 1e-10, format!("max diff {worst_diff:.3e}"));
    out.check("maximal norm attained", worst_attain <= 1e-12, format!("max diff {worst_attain:.3e}"));
    out.check("gap >= -1e-10", min_gap >= -1e-10, format!("min gap {min_gap:.3e}"));
    out.check("search within (||W||_2^2)^2", search_ok, "");
    out.note("min_gap", min_gap);
    out.note("max_closed_direct_diff", worst_diff);
    Ok(out)
}

fn channel_ep(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let (d, lam) = (p.usize("d"), p.f64("lambda"));
    let ch = DwhChannel::new(lam, d).context("channel")?;
    let mut out = Outcome::new(&["basis", "d", "lambda", "min_entry", "max_imag", "satisfied"]);
    let mut negative = true;
    let std_basis = Mat::<c64>::identity(d, d);
    let r = ep_check(&ch, std_basis.as_ref()).context("standard basis")?;
    negative &= r.min_entry < -1e-12;
    out.row(vec!["standard".into(), d.into(), lam.into(), r.min_entry.into(), r.max_imag.into(), r.satisfied.into()]);
    let mut rng = stream_rng(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..p.usize("bases") {
        let u = random::haar_unitary(&mut rng, d);
        let r = ep_check(&ch, u.as_ref()).context("random basis")?;
        negative &= r.min_entry < -1e-12;
        worst = worst.max(r.min_entry);
        out.row(vec![format!("random-{k}").into(), d.into(), lam.into(), r.min_entry.into(), r.max_imag.into(), r.satisfied.into()]);
    }
    out.check(format!("every basis negative at d={d}"), negative, format!("largest minimum {worst:.3e}"));
    // the circular qubit basis (|0⟩ ± i|1⟩)/√2
    let ch2 = DwhChannel::new(lam, 2).context("channel")?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let circ = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, _) => c64::new(s, 0.0),
        (1, 0) => c64::new(0.0, s),
        _ => c64::new(0.0, -s),
    });
    let r = ep_check(&ch2, circ.as_ref()).context("circular basis")?;
    out.row(vec!["circular".into(), 2usize.into(), lam.into(), r.min_entry.into(), r.max_imag.into(), r.satisfied.into()]);
    out.check("circular qubit basis non-negative", r.min_entry >= -1e-12, format!("min {:.3e}", r.min_entry));
    Ok(out)
}

fn max_step(steps: &[(usize, f64)], lo: usize, hi: usize) -> f64 {
    steps.iter().filter(|(m, _)| (lo..=hi).contains(m)).map(|s| s.1.abs()).fold(0.0, f64::max)
}

fn area_law(p: &Params, _seed: u64) -> Result<Outcome, CliError> {
    let (n, lo, hi) = (p.usize("n"), p.usize("cut_lo"), p.usize("cut_hi"));
    if lo < 2 || hi < lo || hi >= n {
        return Err(invalid(format!("need 2 <= cut_lo <= cut_hi < n, got {lo}, {hi}, {n}")));
    }
    let mut out = Outcome::new(&["h", "m", "entropy", "step"]);
    let mut peaks = Vec::new();
    for h in [p.f64("h_gapped"), p.f64("h_critical")] {
        let model = build_model(&ModelKind::Tfim { h }, n).context("model")?;
        let spec = diagonalize(&model).context("diagonalization")?;
        let prof = entropy_profile(&spec).context("entropy profile")?;
        let mut steps = Vec::new();
        for (k, pt) in prof.iter().enumerate() {
            let step = if k == 0 { f64::NAN } else { pt.entropy - prof[k - 1].entropy };
            if k > 0 {
                steps.push((pt.m, step));
            }
            out.row(vec![h.into(), pt.m.into(), pt.entropy.into(), step.into()]);
        }
        peaks.push(max_step(&steps, lo, hi));
    }
    let (gapped, critical) = (peaks[0], peaks[1]);
    out.check("gapped steps < 0.05", gapped < 0.05, format!("{gapped:.4e}"));
    out.check("critical steps >= 2x gapped", critical >= 2.0 * gapped, format!("{critical:.4e} vs {gapped:.4e}"));
    out.note("max_step_gapped", gapped);
    out.note("max_step_critical", critical);
    Ok(out)
}

fn gs_approx(p: &Params, _seed: u64) -> Result<Outcome, CliError> {
    let kind = ModelKind::parse(p.str("model")).context("model")?;
    let n = p.usize("n");
    let model = build_model(&kind, n).context("model")?;
    let spec = diagonalize(&model).context("diagonalization")?;
    let k = PaperConstants::new(spec.gap, model.j()).context("constants")?;
    let method = match p.str("method") {
        "exact" => PbMethod::Exact,
        _ => PbMethod::Quadrature { nodes: p.usize("nodes") },
    };
    let mut out = Outcome::new(&[
        "ell", "alpha", "cutoff", "error", "rank_a", "rank_e", "overlap_a", "overlap_e", "overlap_floor",
    ]);
    let mut errors = Vec::new();
    let mut overlap_ok = true;
    for ell in p.usize_list("ells") {
        let split = region_split(n, p.usize("start"), p.usize("end"), ell).context("region")?;
        let opts = GsOptions { method, ..GsOptions::paper(&model, &spec, &split).context("options")? };
        let r = gs_projector_approx(&model, &spec, &split, &opts).context(format!("approximation at l={ell}"))?;
        let floor = 1.0 - k.overlap_deficit(ell);
        overlap_ok &= r.overlap_a >= floor;
        errors.push(r.error);
        out.row(vec![
            ell.into(),
            r.alpha.into(),
            r.cutoff.into(),
            r.error.into(),
            r.rank_a.into(),
            r.rank_e.into(),
            r.overlap_a.into(),
            r.overlap_e.into(),
            floor.into(),
        ]);
    }
    let mono = errors.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    out.check("error non-increasing in l", mono, format!("{errors:?}"));
    let last = errors.last().copied().unwrap_or(f64::NAN);
    out.check("error < 1 at the largest l", last < 1.0, format!("{last:.6}"));
    out.check("<Psi0|P_A|Psi0> >= 1 - exp(-l/2xi')", overlap_ok, "");
    out.note("gap", spec.gap);
    out.note("xi_prime", k.xi_prime);
    out.note("c1", k.c1);
    Ok(out)
}

fn lr_experiment(p: &Params, _seed: u64) -> Result<Outcome, CliError> {
    let kind = ModelKind::parse(p.str("model")).context("model")?;
    if kind.local_dim() != 2 {
        return Err(invalid("the probe uses Pauli Z and needs a spin-1/2 model"));
    }
    let (n, x, dt, t_max) = (p.usize("n"), p.usize("x"), p.f64("dt"), p.f64("t_max"));
    if !(dt > 0.0) || t_max < 0.0 || x >= n {
        return Err(invalid("need dt > 0, t_max >= 0 and x inside the chain"));
    }
    let model = build_model(&kind, n).context("model")?;
    let spec = diagonalize(&model).context("diagonalization")?;
    let z = Mat::from_fn(2, 2, |i, j| if i != j { c64::new(0.0, 0.0) } else { c64::new(1.0 - 2.0 * i as f64, 0.0) });
    let a = LocalOperator { sites: vec![x], mat: z.clone() };
    let ys: Vec<usize> = (0..n).filter(|&y| y != x).collect();
    let steps = (t_max / dt).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let sweep = lr_probe(&model, &spec, &a, z.as_ref(), &ys, &grid).context("probe")?;
    let mut out = Outcome::new(&["distance", "t", "norm", "bound", "in_window"]);
    for r in &sweep.rows {
        out.row(vec![r.distance.into(), r.t.into(), r.norm.into(), r.bound.into(), r.in_window.into()]);
    }
    out.check("arrival monotone in distance", sweep.arrivals_monotone(), format!("{:?}", sweep.arrivals));
    let v = sweep.velocity.unwrap_or(f64::NAN);
    out.check("fitted velocity <= 4J", v <= sweep.v_bound, format!("{v:.4} vs {:.4}", sweep.v_bound));
    out.check("bound holds in window", sweep.bound_holds(), "");
    out.note("arrivals", &sweep.arrivals);
    out.note("velocity", sweep.velocity);
    out.note("v_bound", sweep.v_bound);
    Ok(out)
}

fn lemma_suite(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::new(&["check", "a", "b", "value", "reference", "holds"]);
    let mut sphere_ok = true;
    for d in 1..=p.usize("d_max") {
        for n in 1..=p.usize("n_max") {
            let (s, brute, bound) = (sphere_count(n, d), sphere_count_brute(n, d), sphere_bound(n, d));
            let ok = s == brute && s as f64 <= bound;
            sphere_ok &= ok;
            out.row(vec!["sphere".into(), n.into(), d.into(), (s as f64).into(), (brute as f64).into(), ok.into()]);
        }
    }
    out.check("sphere counts match enumeration and bound", sphere_ok, "");

    let mut rng = stream_rng(seed, 0);
    let mut entropy_ok = true;
    let mut accepted = 0;
    let mut attempts = 0u64;
    while accepted < p.usize("samples") {
        attempts += 1;
        if attempts > 10_000_000 {
            return Err(CliError::Output("rejection sampling did not produce enough admissible distributions".into()));
        }
        let c: f64 = rng.random_range(0.05..0.9);
        let r = rng.random_range(2..=4usize);
        let s1 = rng.random_range(1..=4usize);
        let schedule: Vec<usize> = (0..8).map(|k| s1 * r.pow(k)).collect();
        let len = rng.random_range(1..=schedule[3]);
        let mut sigma: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powi(8)).collect();
        let z: f64 = sigma.iter().sum();
        sigma.iter_mut().for_each(|x| *x /= z);
        sigma.sort_by(|a, b| b.total_cmp(a));
        if let Ok(b) = entropy_bound_eval(&sigma, &schedule, c, r as f64) {
            let ok = b.entropy <= b.bound + 1e-12;
            entropy_ok &= ok;
            out.row(vec!["entropy".into(), accepted.into(), len.into(), b.entropy.into(), b.bound.into(), ok.into()]);
            accepted += 1;
        }
    }
    out.check("entropy bound on admissible samples", entropy_ok, format!("{attempts} draws"));
    out.note("rejection_attempts", attempts);

    let mut extremal_ok = true;
    for (k, (s1, r, c)) in [(1usize, 2usize, 0.3), (2, 2, 0.5), (3, 3, 0.6), (4, 2, 0.2)].into_iter().enumerate() {
        let schedule: Vec<usize> = (0..6).map(|j| s1 * r.pow(j)).collect();
        let dist = extremal_distribution(&schedule, c).context("extremal distribution")?;
        let b = entropy_bound_eval(&dist, &schedule, c, r as f64).context("extremal bound")?;
        let closed = extremal_entropy(&schedule, c).context("extremal entropy")?;
        let ok = b.entropy <= b.bound && (b.entropy - closed).abs() < 1e-9;
        extremal_ok &= ok;
        out.row(vec!["extremal".into(), k.into(), schedule.len().into(), b.entropy.into(), b.bound.into(), ok.into()]);
    }
    out.check("extremal construction", extremal_ok, "");

    let mut rng = stream_rng(seed, 1);
    let mut fannes_ok = true;
    for k in 0..p.usize("pairs") {
        let d = rng.random_range(2..=6usize);
        let shape = TensorShape::single(d).context("shape")?;
        let rank = rng.random_range(1..=d);
        let rho = DensityMatrix::new(random::random_density(&mut rng, d, rank), shape.clone()).context("state")?;
        let other = random::random_density(&mut rng, d, d);
        let eps: f64 = rng.random_range(1e-4..0.18);
        let mix = Mat::from_fn(d, d, |i, j| rho.mat()[(i, j)] * (1.0 - eps) + other[(i, j)] * eps);
        let sigma = DensityMatrix::new(mix, shape).context("state")?;
        let r = fannes_gap(&rho, &sigma).context("fannes")?;
        fannes_ok &= r.holds;
        out.row(vec!["fannes".into(), k.into(), d.into(), r.lhs.into(), r.rhs.into(), r.holds.into()]);
    }
    out.check("Fannes inequality on close pairs", fannes_ok, "");
    Ok(out)
}
