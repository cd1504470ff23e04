use crate::output::{fmt_f64, Cell, Table};
use crate::*;
use bessel_delta::arith::{
    frak_c_bruteforce, frak_c_closed, gauss_sum, kloosterman, ramanujan_sum, ramanujan_sum_brute, DirichletCharacter,
    FrakC, FrakCArgs,
};
use bessel_delta::bounds::{run_battery, BoundGrid};
use bessel_delta::delta::{c_u, delta_single_modulus, delta_tolerance, delta_two_moduli, i_g, DeltaParams};
use bessel_delta::forms::tau::{cache_path, encode_cache, tau_table, tau_table_in, write_cache, CACHE_ENV};
use bessel_delta::forms::voronoi::{determine_eta, voronoi_check, TABLE_SIZE};
use bessel_delta::forms::RamanujanDelta;
use bessel_delta::quadrature::certify::Lemma;
use bessel_delta::sums::{
    amplification_split, exponent_fit, sharp_exp_sum, smooth_exp_sum, twisted_sum, PhaseSpec,
};
use bessel_delta::windows::plateau_window;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Res<T> = Result<T, String>;

fn lib<T>(r: bessel_delta::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

pub fn run(cli: &Cli) -> Res<Table> {
    let mut t = match &cli.command {
        Command::DeltaCheck(a) => delta_check(a, cli.seed)?,
        Command::Besselint(a) => besselint(a)?,
        Command::Charsum(a) => charsum(a, cli.seed)?,
        Command::Voronoi(a) => voronoi(a)?,
        Command::Expsum(a) => expsum(a)?,
        Command::Certify(a) => certify(a)?,
        Command::Tau(a) => tau(a)?,
    };
    t.param("seed", cli.seed);
    t.sort();
    Ok(t)
}

fn delta_check(a: &DeltaCheckArgs, seed: u64) -> Res<Table> {
    if a.n.is_empty() && a.random == 0 {
        return Err("give --n values or --random count".into());
    }
    let params = lib(DeltaParams::new(a.kernel, a.x, a.j))?;
    let mut t = Table::new(
        "delta-check",
        vec!["p", "q", "r", "n", "X", "kernel", "J", "value_re", "value_im", "expected", "abs_err", "tolerance", "pass"],
        4,
    );
    t.param("X", fmt_f64(a.x));
    t.param("kernel", a.kernel);
    t.param("J", a.j);
    t.param("tol", a.tol.map(fmt_f64).unwrap_or_else(|| "default".into()));
    t.param("random", a.random);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ps = a.p.clone();
    ps.sort_unstable();
    let mut rs = a.r.clone();
    rs.sort_unstable();
    for &p in &ps {
        for &r in &rs {
            let mut ns = a.n.clone();
            for _ in 0..a.random {
                ns.push(rng.gen_range(r.div_ceil(2)..=2 * r));
            }
            for n in ns {
                let (v, c) = match a.q {
                    Some(q) => (lib(delta_two_moduli(&params, p, q, r, n))?, p * q),
                    None => (lib(delta_single_modulus(&params, p, r, n))?, p),
                };
                let diff = n as i64 - r as i64;
                let (expected, tol) = if diff % c as i64 != 0 {
                    (0.0, 0.0)
                } else {
                    let d = n == r;
                    let tol = a.tol.unwrap_or_else(|| delta_tolerance(r.min(n), c, a.x, d));
                    (if d { 1.0 } else { 0.0 }, tol)
                };
                let err = (v - expected).norm();
                let q = a.q.map(|q| q.to_string()).unwrap_or_else(|| "-".into());
                t.push(vec![
                    p.into(),
                    q.into(),
                    r.into(),
                    n.into(),
                    a.x.into(),
                    a.kernel.to_string().into(),
                    a.j.into(),
                    v.re.into(),
                    v.im.into(),
                    expected.into(),
                    err.into(),
                    tol.into(),
                    (err <= tol).into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn besselint(a: &BesselintArgs) -> Res<Table> {
    let params = lib(DeltaParams::new(a.kernel, a.x, a.j))?;
    let mut t = Table::new(
        "besselint",
        vec!["a", "b", "X", "kernel", "J", "b2X", "i_g_re", "i_g_im", "c_u_re", "c_u_im", "ratio_re", "ratio_im", "pass"],
        2,
    );
    t.param("X", fmt_f64(a.x));
    t.param("kernel", a.kernel);
    t.param("J", a.j);
    for &x in &a.a {
        for &y in &a.b {
            let v = lib(i_g(&params, x, y))?;
            let c = c_u(&params, y);
            let r = v / c;
            let finite = [v.re, v.im, c.re, c.im, r.re, r.im].iter().all(|z| z.is_finite());
            t.push(vec![
                x.into(),
                y.into(),
                a.x.into(),
                a.kernel.to_string().into(),
                a.j.into(),
                (y * y * a.x).into(),
                v.re.into(),
                v.im.into(),
                c.re.into(),
                c.im.into(),
                r.re.into(),
                r.im.into(),
                finite.into(),
            ]);
        }
    }
    Ok(t)
}

fn need<T: Clone>(v: &[T], what: &str) -> Res<Vec<T>> {
    if v.is_empty() {
        Err(format!("missing --{what}"))
    } else {
        Ok(v.to_vec())
    }
}

fn characters(q: u64, ks: &[u64]) -> Res<Vec<DirichletCharacter>> {
    if ks.is_empty() {
        Ok(lib(DirichletCharacter::all(q))?.into_iter().filter(|c| !c.is_principal()).collect())
    } else {
        ks.iter().map(|&k| lib(DirichletCharacter::new(q, k))).collect()
    }
}

fn charsum(a: &CharsumArgs, seed: u64) -> Res<Table> {
    let mut t = match a.kind {
        CharsumKind::Gauss => {
            let mut t = Table::new("charsum gauss", vec!["q", "k", "re", "im", "abs", "sqrt_q", "abs_err", "pass"], 2);
            for q in need(&a.q, "q")? {
                for chi in characters(q, &a.k)? {
                    let g = lib(gauss_sum(&chi))?;
                    let s = (q as f64).sqrt();
                    let err = (g.norm() - s).abs();
                    t.push(vec![q.into(), chi.index().into(), g.re.into(), g.im.into(), g.norm().into(), s.into(), err.into(), (err <= a.tol).into()]);
                }
            }
            t
        }
        CharsumKind::Ramanujan => {
            let mut t = Table::new("charsum ramanujan", vec!["q", "a", "closed", "brute", "abs_err", "pass"], 2);
            for q in need(&a.q, "q")? {
                let avals = if a.a.is_empty() { (0..q as i64).collect() } else { a.a.clone() };
                for x in avals {
                    let c = lib(ramanujan_sum(q, x))? as f64;
                    let b = ramanujan_sum_brute(q, x);
                    let err = (c - b).abs();
                    t.push(vec![q.into(), x.into(), c.into(), b.into(), err.into(), (err <= a.tol).into()]);
                }
            }
            t
        }
        CharsumKind::Kloosterman => {
            let mut t = Table::new("charsum kloosterman", vec!["a", "b", "c", "value", "swapped", "ramanujan", "pass"], 3);
            for x in need(&a.a, "a")? {
                for y in need(&a.b, "b")? {
                    for c in need(&a.c, "c")? {
                        let v = lib(kloosterman(x, y, c))?;
                        let s = lib(kloosterman(y, x, c))?;
                        let ram = match (x, y) {
                            (0, b) | (b, 0) => Some(ramanujan_sum_brute(c, b)),
                            _ => None,
                        };
                        let pass = v == s && ram.map_or(true, |r| r == v);
                        let rc = ram.map(Cell::Float).unwrap_or_else(|| "-".into());
                        t.push(vec![x.into(), y.into(), c.into(), v.into(), s.into(), rc, pass.into()]);
                    }
                }
            }
            t
        }
        CharsumKind::Frakc => frakc(a, seed)?,
    };
    t.param("tol", fmt_f64(a.tol));
    Ok(t)
}

fn frakc(a: &CharsumArgs, seed: u64) -> Res<Table> {
    let mut t = Table::new(
        "charsum frakc",
        vec![
            "q", "k", "r1", "r2", "alpha", "gamma", "m", "case", "brute_re", "brute_im", "closed_re", "closed_im", "abs_err",
            "bound", "pass",
        ],
        7,
    );
    t.param("random", a.random);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut qs = need(&a.q, "q")?;
    qs.sort_unstable();
    for q in qs {
        let mut cases = Vec::new();
        if a.random > 0 {
            let chars = characters(q, &a.k)?;
            if chars.is_empty() {
                return Err(format!("no nonprincipal characters mod {q}"));
            }
            for _ in 0..a.random {
                let chi = chars[rng.gen_range(0..chars.len())].clone();
                let mut u = || rng.gen_range(1..q as i64);
                let (r1, r2, alpha, gamma) = (u(), u(), u(), u());
                let m = rng.gen_range(0..2 * q as i64);
                cases.push((chi, FrakCArgs { r1, r2, alpha, gamma, m }));
            }
        } else {
            let get = |v: Option<i64>, n: &str| v.ok_or_else(|| format!("missing --{n} (or use --random)"));
            let x = FrakCArgs {
                r1: get(a.r1, "r1")?,
                r2: get(a.r2, "r2")?,
                alpha: get(a.alpha, "alpha")?,
                gamma: get(a.gamma, "gamma")?,
                m: get(a.m, "m")?,
            };
            for chi in characters(q, &a.k)? {
                cases.push((chi, x));
            }
        }
        for (chi, x) in cases {
            let b = lib(frak_c_bruteforce(&chi, q, x))?;
            let bound = 3.0 * (q as f64).sqrt();
            let (case, c, err, pass) = match lib(frak_c_closed(&chi, q, x))? {
                FrakC::Value(v) => ("closed", v, (v - b).norm(), (v - b).norm() <= a.tol),
                FrakC::NotApplicable => ("generic", Complex64::new(f64::NAN, f64::NAN), f64::NAN, b.norm() <= bound),
            };
            t.push(vec![
                q.into(),
                chi.index().into(),
                x.r1.into(),
                x.r2.into(),
                x.alpha.into(),
                x.gamma.into(),
                x.m.into(),
                case.into(),
                b.re.into(),
                b.im.into(),
                c.re.into(),
                c.im.into(),
                err.into(),
                bound.into(),
                pass.into(),
            ]);
        }
    }
    Ok(t)
}

fn voronoi(a: &VoronoiArgs) -> Res<Table> {
    let d = lib(RamanujanDelta::new(TABLE_SIZE))?;
    let eta = match a.eta.as_slice() {
        [] => lib(determine_eta(&d))?,
        [re] => Complex64::new(*re, 0.0),
        [re, im] => Complex64::new(*re, *im),
        _ => return Err("--eta takes re or re,im".into()),
    };
    let mut t = Table::new(
        "voronoi",
        vec!["a", "c", "N", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "diff", "dual_terms", "pass"],
        3,
    );
    t.param("eta", format!("{},{}", fmt_f64(eta.re), fmt_f64(eta.im)));
    t.param("eta_source", if a.eta.is_empty() { "determined" } else { "given" });
    t.param("tol", fmt_f64(a.tol));
    t.param("rel", fmt_f64(a.rel));
    t.param("abs", fmt_f64(a.abs));
    for &x in &a.a {
        for &c in &a.c {
            for &n in &a.n {
                let r = lib(voronoi_check(&d, eta, x, c, n, a.tol))?;
                t.push(vec![
                    x.into(),
                    c.into(),
                    n.into(),
                    r.lhs.re.into(),
                    r.lhs.im.into(),
                    r.rhs.re.into(),
                    r.rhs.im.into(),
                    r.diff.into(),
                    r.dual_terms.into(),
                    r.agrees(a.rel, a.abs).into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn scales(a: &ExpsumArgs) -> Res<Vec<f64>> {
    let mut ns = a.n.clone();
    if let Some(d) = &a.dyadic {
        let (lo, hi) = d.split_once(':').ok_or("--dyadic takes lo:hi")?;
        let lo: i32 = lo.trim().parse().map_err(|_| "bad --dyadic lower end")?;
        let hi: i32 = hi.trim().parse().map_err(|_| "bad --dyadic upper end")?;
        if !(0..=30).contains(&lo) || lo > hi || hi > 30 {
            return Err(format!("--dyadic {d}: need 0 <= lo <= hi <= 30"));
        }
        ns.extend((lo..=hi).map(|e| 2f64.powi(e)));
    }
    if ns.is_empty() {
        return Err("give --N values or --dyadic lo:hi".into());
    }
    if ns.iter().any(|n| !(*n >= 1.0)) {
        return Err("every N must be >= 1".into());
    }
    Ok(ns)
}

fn cis_cells(z: Complex64) -> [Cell; 3] {
    [z.re.into(), z.im.into(), z.norm().into()]
}

fn expsum(a: &ExpsumArgs) -> Res<Table> {
    let ns = scales(a)?;
    let mode = if a.mode == ExpsumMode::Fit { a.of } else { a.mode };
    if mode == ExpsumMode::Fit {
        return Err("--of must name a sum, not fit".into());
    }
    let n_max = ns.iter().cloned().fold(0.0, f64::max);
    let size = match mode {
        ExpsumMode::Sharp => n_max,
        ExpsumMode::Amplify => 2.0 * n_max * a.l.iter().copied().max().unwrap_or(1) as f64,
        _ => 2.0 * n_max,
    }
    .ceil() as usize
        + 1;
    let d = lib(RamanujanDelta::new(size))?;
    let v = lib(plateau_window(1.0, 2.0, a.delta))?;
    let name = match a.mode {
        ExpsumMode::Fit => format!("expsum fit ({mode:?})").to_lowercase(),
        m => format!("expsum {m:?}").to_lowercase(),
    };
    let mut t = match mode {
        ExpsumMode::Smooth => {
            let mut t = Table::new(&name, vec!["N", "T", "gamma", "re", "im", "abs", "pass"], 1);
            match a.big_t {
                Some(bt) => t.param("T", fmt_f64(bt)),
                None => t.param("theta", fmt_f64(a.theta)),
            }
            t.param("phi", "x^2");
            t.param("gamma", fmt_f64(a.gamma));
            t.param("delta", fmt_f64(a.delta));
            for &n in &ns {
                let tt = a.big_t.unwrap_or(n.powf(a.theta));
                let p = lib(PhaseSpec::quadratic(tt, a.gamma, n))?;
                let s = lib(smooth_exp_sum(&d, &p, &v))?;
                let [re, im, ab] = cis_cells(s);
                t.push(vec![n.into(), tt.into(), a.gamma.into(), re, im, ab, s.norm().is_finite().into()]);
            }
            t
        }
        ExpsumMode::Sharp => {
            let mut t = Table::new(&name, vec!["N", "alpha", "beta", "gamma", "re", "im", "abs", "pass"], 1);
            t.param("alpha", fmt_f64(a.alpha));
            t.param("beta", fmt_f64(a.beta));
            t.param("gamma", fmt_f64(a.gamma));
            for &n in &ns {
                let s = lib(sharp_exp_sum(&d, a.alpha, a.beta, a.gamma, n as u64))?;
                let [re, im, ab] = cis_cells(s);
                t.push(vec![n.into(), a.alpha.into(), a.beta.into(), a.gamma.into(), re, im, ab, s.norm().is_finite().into()]);
            }
            t
        }
        ExpsumMode::Twisted => {
            let chi = lib(DirichletCharacter::new(a.q, a.k))?;
            let mut t = Table::new(&name, vec!["N", "q", "k", "t", "re", "im", "abs", "pass"], 1);
            t.param("q", a.q);
            t.param("k", a.k);
            t.param("t", fmt_f64(a.t));
            t.param("delta", fmt_f64(a.delta));
            for &n in &ns {
                let s = lib(twisted_sum(&d, &chi, a.t, &v, n))?;
                let [re, im, ab] = cis_cells(s);
                t.push(vec![n.into(), a.q.into(), a.k.into(), a.t.into(), re, im, ab, s.norm().is_finite().into()]);
            }
            t
        }
        ExpsumMode::Amplify => {
            let chi = lib(DirichletCharacter::new(a.q, a.k))?;
            let mut t = Table::new(
                &name,
                vec!["N", "q", "k", "t", "s_re", "s_im", "s1_re", "s1_im", "s2_re", "s2_im", "residual", "l_star", "pass"],
                1,
            );
            let ls: Vec<String> = a.l.iter().map(|l| l.to_string()).collect();
            t.param("L", ls.join(","));
            t.param("tol", fmt_f64(a.tol));
            t.param("delta", fmt_f64(a.delta));
            for &n in &ns {
                let r = lib(amplification_split(&d, &chi, a.t, &v, n, &a.l))?;
                t.push(vec![
                    n.into(),
                    a.q.into(),
                    a.k.into(),
                    a.t.into(),
                    r.s.re.into(),
                    r.s.im.into(),
                    r.s1.re.into(),
                    r.s1.im.into(),
                    r.s2.re.into(),
                    r.s2.im.into(),
                    r.residual.into(),
                    r.l_star.into(),
                    (r.residual <= a.tol * (1.0 + r.s.norm())).into(),
                ]);
            }
            t
        }
        ExpsumMode::Fit => unreachable!(),
    };
    if a.mode == ExpsumMode::Fit {
        let abs_col = t.columns.iter().position(|c| *c == "abs").ok_or("fit needs a sum with an abs column")?;
        let samples: Vec<(f64, f64)> = t
            .rows
            .iter()
            .map(|r| match (&r[0], &r[abs_col]) {
                (Cell::Float(n), Cell::Float(s)) => (*n, *s),
                _ => (f64::NAN, f64::NAN),
            })
            .collect();
        let f = lib(exponent_fit(&samples))?;
        let cap = a.cap.or(match mode {
            ExpsumMode::Smooth if a.big_t.is_none() => {
                Some((0.5 + a.theta / 3.0).max(1.0 - a.theta / 6.0) + 0.15)
            }
            ExpsumMode::Sharp => Some(0.5 + a.beta / 3.0 + 0.15),
            _ => None,
        });
        t.summary.push(("slope".into(), f.slope.into()));
        t.summary.push(("intercept".into(), f.intercept.into()));
        t.summary.push(("r2".into(), f.r2.into()));
        t.summary.push(("used".into(), f.used.into()));
        if let Some(c) = cap {
            t.summary.push(("cap".into(), c.into()));
            t.summary_pass = Some(f.slope <= c);
        }
    }
    Ok(t)
}

fn certify(a: &CertifyArgs) -> Res<Table> {
    let lemma = match a.lemma {
        LemmaArg::A1 => Lemma::A1,
        LemmaArg::A2 => Lemma::A2,
        LemmaArg::A3 => Lemma::A3,
    };
    let grid = match &a.grid {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read grid {}: {e}", p.display()))?;
            serde_json::from_str::<BoundGrid>(&text).map_err(|e| format!("bad grid file {}: {e}", p.display()))?
        }
        None => BoundGrid::default_for(lemma),
    };
    let r = lib(run_battery(lemma, &grid))?;
    let mut t = Table::new(
        "certify",
        vec!["index", "parameters", "bound", "integral_re", "integral_im", "ratio", "slack", "violated", "error", "pass"],
        1,
    );
    t.param("lemma", format!("{lemma:?}"));
    t.param("grid", a.grid.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "built-in".into()));
    for rec in &r.records {
        let ps: Vec<String> = rec.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut row: Vec<Cell> = vec![rec.index.into(), ps.join(";").into()];
        match &rec.certificate {
            Some(c) => row.extend([
                c.bound_value.into(),
                c.integral_value.re.into(),
                c.integral_value.im.into(),
                c.ratio.into(),
                c.slack.into(),
                c.violated.into(),
                "-".into(),
                (!c.violated).into(),
            ]),
            None => {
                let nan = || Cell::Float(f64::NAN);
                row.extend([nan(), nan(), nan(), nan(), nan(), false.into()]);
                row.push(rec.error.clone().unwrap_or_default().into());
                row.push(false.into());
            }
        }
        t.push(row);
    }
    t.summary.push(("lemma".into(), format!("{lemma:?}").into()));
    t.summary.push(("grid".into(), r.grid.clone().into()));
    t.summary.push(("cases".into(), r.cases.into()));
    t.summary.push(("certified".into(), r.certified.into()));
    t.summary.push(("violations".into(), r.violations.into()));
    t.summary.push(("max_ratio".into(), r.max_ratio.into()));
    Ok(t)
}

fn tau(a: &TauArgs) -> Res<Table> {
    if a.n_max < 1 {
        return Err("--n-max must be at least 1".into());
    }
    let dir = a
        .cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(Into::into))
        .ok_or_else(|| format!("no cache directory: pass --cache or set {CACHE_ENV}"))?;
    let (table, from_cache) = if a.refresh {
        let t = lib(tau_table(a.n_max))?;
        lib(write_cache(&cache_path(&dir, a.n_max), &t))?;
        (t, false)
    } else {
        let (t, hit) = lib(tau_table_in(Some(&dir), a.n_max))?;
        let path = cache_path(&dir, a.n_max);
        if !hit && !path.exists() {
            // tau_table_in writes best-effort; here a failed write is an error.
            lib(write_cache(&path, &t))?;
        }
        (t, hit)
    };
    let sum = hex::encode(Sha256::digest(encode_cache(&table)));
    let mut t = Table::new("tau", vec!["n_max", "source", "tau_1", "tau_2", "tau_n_max", "sha256", "path", "pass"], 1);
    t.param("cache", dir.display());
    t.param("refresh", a.refresh);
    let at = |n: usize| table.get(n).map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    t.push(vec![
        a.n_max.into(),
        (if from_cache { "cache" } else { "computed" }).into(),
        at(1).into(),
        at(2).into(),
        at(a.n_max).into(),
        sum.into(),
        cache_path(&dir, a.n_max).display().to_string().into(),
        true.into(),
    ]);
    Ok(t)
}
