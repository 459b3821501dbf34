use std::fs::File;
use std::io::{self, BufReader, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::json;

use kendall_core::asymptotics::{
    applicable_theorems, blackwell_constant, default_grid, run_diagnostic, DiagnosticExtras,
    GridSpec, LimitDiagnostic, TheoremId,
};
use kendall_core::kendall::{self, GeneratingFunction};
use kendall_core::renewal::Renewal;
use kendall_core::williamson;
use kendall_core::{DistModel, Error, Interpolation, KendallParam, QuadratureSpec, TabulatedCdf};

use crate::report::{Cell, Table};
use crate::{Command, Interp, Options};

/// Bad invocation; reported with exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

/// 2 for usage and input errors, 3 for numerical failures.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() || cause.is::<io::Error>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::InvalidParameter(_)
                | Error::InvalidTable { .. }
                | Error::Parse { .. }
                | Error::InfiniteMoment { .. }
                | Error::DensityRequired { .. }
                | Error::IncompatibleTailClass { .. } => 2,
                _ => 3,
            };
        }
    }
    3
}

pub fn run(command: Command, opts: &Options) -> Result<ExitCode> {
    let quad = QuadratureSpec::from_env()?;
    let alpha = KendallParam::new(opts.alpha)?;
    let dist = match &opts.dist {
        Some(spec) => parse_dist(spec, opts)?,
        None => return usage("--dist is required"),
    };
    let ctx = Ctx {
        dist: &dist,
        alpha,
        quad,
        opts,
    };
    let table = match command {
        Command::Transform => ctx.transform()?,
        Command::Moments => ctx.moments()?,
        Command::Convolve => ctx.convolve()?,
        Command::Nfold => ctx.nfold()?,
        Command::Renewal => ctx.renewal()?,
        Command::Blackwell => ctx.blackwell()?,
        Command::Sample => ctx.sample()?,
        Command::Weighted => ctx.weighted()?,
        Command::Verify => return ctx.verify(),
    };
    match &opts.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write(io::BufWriter::new(file), opts.format)?;
        }
        None => table.write(io::stdout().lock(), opts.format)?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn parse_dist(spec: &str, opts: &Options) -> Result<DistModel> {
    let exponent = opts.exponent.unwrap_or(opts.alpha);
    Ok(match spec {
        "dirac1" => DistModel::dirac_at_one(),
        "pareto" => match opts.beta {
            Some(b) => DistModel::pareto(b)?,
            None => return usage("pareto needs --beta"),
        },
        "exp" => DistModel::exponential_unit(),
        "powerlaw" => DistModel::power_law_unit(exponent)?,
        "kendallstable" => DistModel::kendall_stable(exponent)?,
        other => match other.strip_prefix("table:") {
            Some(path) => {
                let file = File::open(path).with_context(|| format!("opening {path}"))?;
                let interp = match opts.interp {
                    Interp::Linear => Interpolation::Linear,
                    Interp::MonotoneCubic => Interpolation::MonotoneCubic,
                };
                let table = TabulatedCdf::from_csv(BufReader::new(file), interp)
                    .with_context(|| format!("reading {path}"))?;
                DistModel::from_table(table)
            }
            None => return usage(format!("unknown distribution {other:?}")),
        },
    })
}

pub fn parse_gen(spec: &str) -> Result<GeneratingFunction> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let number = |what: &str| -> Result<f64> {
        arg.parse()
            .map_err(|_| Usage(format!("{what} expects a number, got {arg:?}")).into())
    };
    Ok(match name {
        "ones" => GeneratingFunction::Ones,
        "geometric" => GeneratingFunction::geometric(number("geometric")?)?,
        "poisson" => GeneratingFunction::poisson_like(number("poisson")?)?,
        "coeffs" => {
            let file = File::open(arg).with_context(|| format!("opening {arg}"))?;
            GeneratingFunction::from_csv(BufReader::new(file)).with_context(|| format!("reading {arg}"))?
        }
        _ => return usage(format!("unknown generating function {spec:?}")),
    })
}

pub fn parse_grid(spec: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Usage(format!("--grid expects x0:ratio:count, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad().into());
    }
    let x0: f64 = parts[0].parse().map_err(|_| bad())?;
    let ratio: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(GridSpec::new(x0, ratio, count)?)
}

struct Ctx<'a> {
    dist: &'a DistModel,
    alpha: KendallParam,
    quad: QuadratureSpec,
    opts: &'a Options,
}

impl<'a> Ctx<'a> {
    fn points(&self) -> Result<Option<Vec<f64>>> {
        match (&self.opts.grid, self.opts.x.is_empty()) {
            (Some(_), false) => usage("--x and --grid are mutually exclusive"),
            (Some(g), true) => Ok(Some(parse_grid(g)?.points())),
            (None, false) => Ok(Some(self.opts.x.clone())),
            (None, true) => Ok(None),
        }
    }

    fn required_points(&self) -> Result<Vec<f64>> {
        match self.points()? {
            Some(p) => Ok(p),
            None => usage("this command needs --x or --grid"),
        }
    }

    fn ys(&self) -> Vec<f64> {
        if self.opts.y.is_empty() {
            vec![1.0]
        } else {
            self.opts.y.clone()
        }
    }

    // The moment, or None when it diverges.
    fn finite_moment(&self) -> Result<Option<f64>> {
        match williamson::moment(self.dist, self.alpha, &self.quad) {
            Ok(m) => Ok(Some(m)),
            Err(Error::InfiniteMoment { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn transform(&self) -> Result<Table> {
        let points = self.required_points()?;
        let (d, a, q) = (self.dist, self.alpha, &self.quad);
        let m = self.finite_moment()?;
        let rows = per_point(&points, |x| {
            let tail = match m {
                Some(m) => {
                    let wbar = williamson::tail_moment_wbar(d, a, x, q)?;
                    let hbar = williamson::tail_moment_hbar(d, a, x, q)?;
                    [Cell::Num(wbar), Cell::Num(hbar), Cell::Num(m)]
                }
                None => [Cell::Missing, Cell::Missing, Cell::Missing],
            };
            let mut row = vec![
                Cell::Num(x),
                Cell::Num(d.cdf(x)),
                Cell::Num(williamson::g_transform(d, a, x, q)?),
                Cell::Num(williamson::gbar_transform(d, a, x, q)?),
                Cell::Num(williamson::truncated_moment_h(d, a, x, q)?),
                Cell::Num(williamson::lower_moment_w(d, a, x, q)?),
            ];
            row.extend(tail);
            Ok(row)
        })?;
        Ok(table(
            &["x", "cdf", "g", "gbar", "h_alpha", "w_alpha", "wbar_alpha", "hbar_alpha", "moment"],
            rows,
        ))
    }

    fn moments(&self) -> Result<Table> {
        let m = williamson::moment(self.dist, self.alpha, &self.quad)?;
        let Some(points) = self.points()? else {
            return Ok(table(&["alpha", "moment"], vec![vec![Cell::Num(self.alpha.get()), Cell::Num(m)]]));
        };
        let (d, a, q) = (self.dist, self.alpha, &self.quad);
        let rows = per_point(&points, |x| {
            Ok(vec![
                Cell::Num(x),
                Cell::Num(williamson::truncated_moment_h(d, a, x, q)?),
                Cell::Num(williamson::lower_moment_w(d, a, x, q)?),
                Cell::Num(williamson::tail_moment_wbar(d, a, x, q)?),
                Cell::Num(williamson::tail_moment_hbar(d, a, x, q)?),
                Cell::Num(m),
            ])
        })?;
        Ok(table(&["x", "h_alpha", "w_alpha", "wbar_alpha", "hbar_alpha", "moment"], rows))
    }

    fn convolve(&self) -> Result<Table> {
        let Some(spec2) = &self.opts.dist2 else {
            return usage("convolve needs --dist2");
        };
        let d2 = parse_dist(spec2, self.opts)?;
        let points = self.required_points()?;
        let (d, a, q) = (self.dist, self.alpha, &self.quad);
        let rows = per_point(&points, |x| {
            let g = williamson::g_transform(d, a, x, q)? * williamson::g_transform(&d2, a, x, q)?;
            Ok(vec![Cell::Num(x), Cell::Num(kendall::convolve(d, &d2, a, x, q)?), Cell::Num(g)])
        })?;
        Ok(table(&["x", "cdf", "g"], rows))
    }

    fn nfold(&self) -> Result<Table> {
        let points = self.required_points()?;
        let (d, a, q, n) = (self.dist, self.alpha, &self.quad, self.opts.n);
        let rows = per_point(&points, |x| {
            Ok(vec![
                Cell::Num(x),
                Cell::Int(n.into()),
                Cell::Num(kendall::nfold(d, a, n, x, q)?),
                Cell::Num(kendall::nfold_transform(d, a, n, x, q)?),
            ])
        })?;
        Ok(table(&["x", "n", "cdf", "g"], rows))
    }

    fn renewal(&self) -> Result<Table> {
        let points = self.required_points()?;
        let r = Renewal::new(self.dist, self.alpha, self.quad)?;
        let terms = self.opts.terms;
        let rows = per_point(&points, |x| {
            let r_prime = if self.dist.has_density() {
                Some(r.derivative(x)?)
            } else {
                None
            };
            let resid = match r.moment() {
                Some(_) => Some(r.elementary_residual(x)?),
                None => None,
            };
            let mut row = vec![Cell::Num(x), Cell::Num(r.value(x)?), r_prime.into(), resid.into()];
            if let Some(n) = terms {
                let ps = r.partial_sum(x, n)?;
                row.extend([Cell::Num(ps.value), Cell::Num(ps.bound)]);
            }
            Ok(row)
        })?;
        let mut columns = vec!["x", "r", "r_prime", "elementary_residual"];
        if terms.is_some() {
            columns.extend(["partial_sum", "partial_bound"]);
        }
        Ok(table(&columns, rows))
    }

    fn blackwell(&self) -> Result<Table> {
        let points = self.required_points()?;
        let r = Renewal::with_finite_moment(self.dist, self.alpha, self.quad)?;
        let m = r.moment().expect("finite moment was required");
        let ys = self.ys();
        let pairs: Vec<(f64, f64)> = points
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
            .collect();
        let rows = pairs
            .par_iter()
            .map(|&(x, y)| -> kendall_core::Result<Vec<Cell>> {
                let diff = r.blackwell_difference(x, y)?;
                let resid = r.blackwell_residual(x, y)?;
                let limit = blackwell_constant(self.alpha.get(), m, y);
                Ok(vec![Cell::Num(x), Cell::Num(y), Cell::Num(diff), Cell::Num(limit), Cell::Num(resid)])
            })
            .collect::<Vec<_>>();
        let rows = first_error(rows, &pairs, |&(x, y)| format!("at x = {}, y = {y}", show(x)))?;
        Ok(table(&["x", "y", "difference", "limit", "residual"], rows))
    }

    fn sample(&self) -> Result<Table> {
        const CHUNK: u64 = 64;
        let (d, a, q, n, seed) = (self.dist, self.alpha, &self.quad, self.opts.n, self.opts.seed);
        let count = self.opts.count as u64;
        let chunks: Vec<u64> = (0..count.div_ceil(CHUNK)).collect();
        let draws = chunks
            .par_iter()
            .map(|&c| {
                let range = c * CHUNK..((c + 1) * CHUNK).min(count);
                kendall::sample_nfold_range(d, a, n, range, seed, q)
            })
            .collect::<Vec<_>>();
        let draws = first_error(draws, &chunks, |&c| format!("in draws {}..", c * CHUNK))?;
        let rows = draws
            .into_iter()
            .flatten()
            .enumerate()
            .map(|(i, v)| vec![Cell::Int(i as u64), Cell::Num(v)])
            .collect();
        Ok(table(&["index", "value"], rows))
    }

    fn weighted(&self) -> Result<Table> {
        let Some(spec) = &self.opts.gen else {
            return usage("weighted needs --gen");
        };
        let gen = parse_gen(spec)?;
        let points = self.required_points()?;
        let (d, a, q) = (self.dist, self.alpha, &self.quad);
        let rows = per_point(&points, |x| {
            Ok(vec![Cell::Num(x), Cell::Num(kendall::weighted_renewal(d, a, &gen, x, q)?)])
        })?;
        Ok(table(&["x", "value"], rows))
    }

    fn verify(&self) -> Result<ExitCode> {
        williamson::moment(self.dist, self.alpha, &self.quad)?;
        let requested = !self.opts.theorem.is_empty();
        let theorems: Vec<TheoremId> = if requested {
            self.opts
                .theorem
                .iter()
                .map(|s| s.parse())
                .collect::<kendall_core::Result<_>>()?
        } else {
            applicable_theorems(self.dist, self.alpha)
        };
        let grid = match &self.opts.grid {
            Some(g) => parse_grid(g)?,
            None => default_grid(self.dist, self.alpha),
        };
        let extras = DiagnosticExtras {
            y: self.ys()[0],
            tolerance: self.opts.tol,
            ..DiagnosticExtras::default()
        };
        let results: Vec<kendall_core::Result<LimitDiagnostic>> = theorems
            .par_iter()
            .map(|&t| run_diagnostic(self.dist, self.alpha, t, &grid, &extras, &self.quad))
            .collect();

        let mut out = Table::new(&[
            "theorem",
            "constant",
            "est_limit",
            "abs_residual",
            "tolerance",
            "verdict",
            "note",
        ]);
        let mut all_pass = true;
        let mut dump = Vec::new();
        for (t, res) in theorems.iter().zip(&results) {
            match res {
                Ok(d) => {
                    all_pass &= d.passed();
                    out.push(vec![
                        Cell::Text(t.to_string()),
                        Cell::Num(d.constant),
                        Cell::Num(d.est_limit),
                        Cell::Num(d.final_residual().abs()),
                        Cell::Num(d.verdict.tolerance),
                        Cell::Text(if d.passed() { "PASS" } else { "FAIL" }.into()),
                        Cell::Text(d.verdict.reason.clone().unwrap_or_default()),
                    ]);
                    dump.push(serde_json::to_value(d)?);
                }
                Err(e) => {
                    let usage_like = matches!(
                        e,
                        Error::IncompatibleTailClass { .. } | Error::DensityRequired { .. }
                    );
                    if requested && usage_like {
                        return Err(e.clone()).with_context(|| format!("theorem {t}"));
                    }
                    all_pass = false;
                    out.push(vec![
                        Cell::Text(t.to_string()),
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Text("FAIL".into()),
                        Cell::Text(e.to_string()),
                    ]);
                    dump.push(json!({ "name": t.as_str(), "error": e.to_string() }));
                }
            }
        }
        out.write(io::stdout().lock(), self.opts.format)?;
        if let Some(path) = &self.opts.output {
            let mut file = io::BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            serde_json::to_writer_pretty(&mut file, &dump)?;
            writeln!(file)?;
        }
        Ok(if all_pass {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        })
    }
}

fn show(x: f64) -> String {
    if x != 0.0 && !(1e-4..1e6).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn table(columns: &[&'static str], rows: Vec<Vec<Cell>>) -> Table {
    let mut t = Table::new(columns);
    for row in rows {
        t.push(row);
    }
    t
}

// Evaluates rows in parallel; the first failing point, in input order, wins.
fn per_point<F>(points: &[f64], f: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(f64) -> kendall_core::Result<Vec<Cell>> + Sync,
{
    let rows: Vec<_> = points.par_iter().map(|&x| f(x)).collect();
    first_error(rows, points, |&x| format!("at x = {}", show(x)))
}

fn first_error<T, K, E, C>(results: Vec<std::result::Result<T, E>>, keys: &[K], context: C) -> Result<Vec<T>>
where
    E: std::error::Error + Send + Sync + 'static,
    C: Fn(&K) -> String,
{
    results
        .into_iter()
        .zip(keys)
        .map(|(r, k)| r.with_context(|| context(k)))
        .collect()
}
