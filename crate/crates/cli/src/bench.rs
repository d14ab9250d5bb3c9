use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use gtp_core::basis::MAX_INPUT_DEGREE;
use gtp_core::basis::MAX_TABLE_DEGREE;
use gtp_core::conv::{edge_frame, equiv_convolution_counted, EdgeGeometry, FilterWeights};
use gtp_core::many_body::{self_product_with, BodyOrder, MultiTpOptions, Schedule, MAX_BODY_ORDER};
use gtp_core::oracle::{cg_tp_reference_counted, gaunt_tp_reference_counted};
use gtp_core::so3::eval_sh_vector;
use gtp_core::tp::gaunt_full_tp_counted;
use gtp_core::{DegreeWeights, IrrepsVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::tables::warm_table;
use crate::{CliError, CliResult};

pub const CSV_HEADER: [&str; 9] = ["op_class", "path", "L", "channels", "batch", "nu", "repeat", "wall_ns", "work_ops"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum OpClass {
    FeatureInteraction,
    Convolution,
    ManyBody,
}

impl OpClass {
    pub fn name(self) -> &'static str {
        match self {
            OpClass::FeatureInteraction => "feature_interaction",
            OpClass::Convolution => "convolution",
            OpClass::ManyBody => "many_body",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchPath {
    GauntFft,
    OracleGaunt,
    OracleCg,
    SparseFilter,
    DenseFilter,
    Tree,
    LeftFold,
}

impl BenchPath {
    pub fn name(self) -> &'static str {
        match self {
            BenchPath::GauntFft => "gaunt_fft",
            BenchPath::OracleGaunt => "oracle_gaunt",
            BenchPath::OracleCg => "oracle_cg",
            BenchPath::SparseFilter => "sparse_filter",
            BenchPath::DenseFilter => "dense_filter",
            BenchPath::Tree => "tree",
            BenchPath::LeftFold => "leftfold",
        }
    }

    fn is_oracle(self) -> bool {
        matches!(self, BenchPath::OracleGaunt | BenchPath::OracleCg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub op: OpClass,
    pub l_list: Vec<usize>,
    pub channels: usize,
    pub batch: usize,
    pub nu: usize,
    pub repeats: usize,
    pub warmup: usize,
    pub seed: u64,
    pub threads: usize,
    /// Oracle paths are skipped above this degree.
    pub oracle_max_l: usize,
    pub with_cg: bool,
}

impl BenchConfig {
    pub fn validate(&self) -> CliResult<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.l_list.is_empty() {
            return usage("--l needs at least one degree".into());
        }
        if let Some(&l) = self.l_list.iter().find(|&&l| l > MAX_INPUT_DEGREE) {
            return usage(format!("degree {l} exceeds the supported maximum {MAX_INPUT_DEGREE}"));
        }
        if self.repeats < 3 {
            return usage(format!("--repeats must be at least 3, got {}", self.repeats));
        }
        if self.channels == 0 || self.batch == 0 || self.threads == 0 {
            return usage("--channels, --batch and --threads must be positive".into());
        }
        if self.op == OpClass::ManyBody {
            if self.nu == 0 || self.nu > MAX_BODY_ORDER {
                return usage(format!("--nu must lie in 1..={MAX_BODY_ORDER}"));
            }
            if let Some(&l) = self.l_list.iter().find(|&&l| l * self.nu > MAX_TABLE_DEGREE) {
                return usage(format!("nu * L = {} exceeds the table limit {MAX_TABLE_DEGREE}", l * self.nu));
            }
        }
        Ok(())
    }

    pub fn paths(&self) -> Vec<BenchPath> {
        match self.op {
            OpClass::FeatureInteraction if self.with_cg => {
                vec![BenchPath::GauntFft, BenchPath::OracleGaunt, BenchPath::OracleCg]
            }
            OpClass::FeatureInteraction => vec![BenchPath::GauntFft, BenchPath::OracleGaunt],
            OpClass::Convolution => vec![BenchPath::SparseFilter, BenchPath::DenseFilter],
            OpClass::ManyBody => vec![BenchPath::Tree, BenchPath::LeftFold],
        }
    }

    fn nu_column(&self) -> usize {
        if self.op == OpClass::ManyBody {
            self.nu
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub op_class: &'static str,
    pub path: &'static str,
    pub l: usize,
    pub channels: usize,
    pub batch: usize,
    pub nu: usize,
    /// `-1` marks the median row.
    pub repeat: i64,
    pub wall_ns: u128,
    pub work_ops: u64,
}

/// Inputs for one degree, shared by every path of that degree.
enum Workload {
    Pairs(Vec<(IrrepsVector, IrrepsVector)>),
    Edges(Vec<(IrrepsVector, EdgeGeometry, FilterWeights)>),
    Features(Vec<IrrepsVector>),
}

fn normal_vector(g: &mut ChaCha8Rng, l: usize) -> IrrepsVector {
    let n = (l + 1) * (l + 1);
    IrrepsVector::from_vec(l, (0..n).map(|_| g.sample(StandardNormal)).collect()).expect("length matches degree")
}

fn normal_point(g: &mut ChaCha8Rng) -> [f64; 3] {
    [g.sample(StandardNormal), g.sample(StandardNormal), g.sample(StandardNormal)]
}

fn sample_workload(cfg: &BenchConfig, l: usize) -> CliResult<Workload> {
    let mut g = ChaCha8Rng::seed_from_u64(cfg.seed);
    g.set_stream(l as u64);
    let n = cfg.batch * cfg.channels;
    Ok(match cfg.op {
        OpClass::FeatureInteraction => {
            Workload::Pairs((0..n).map(|_| (normal_vector(&mut g, l), normal_vector(&mut g, l))).collect())
        }
        OpClass::Convolution => {
            let mut items = Vec::with_capacity(n);
            while items.len() < n {
                let x = normal_vector(&mut g, l);
                let h = FilterWeights::new((0..=l).map(|_| g.sample(StandardNormal)).collect())?;
                // a coincident pair of normal draws is astronomically unlikely; skip it anyway
                if let Ok(e) = edge_frame(normal_point(&mut g), normal_point(&mut g)) {
                    items.push((x, e, h));
                }
            }
            Workload::Edges(items)
        }
        OpClass::ManyBody => Workload::Features((0..n).map(|_| normal_vector(&mut g, l)).collect()),
    })
}

fn run_item(path: BenchPath, w: &Workload, i: usize, l: usize, nu: usize) -> gtp_core::Result<u64> {
    match (path, w) {
        (BenchPath::GauntFft, Workload::Pairs(p)) => {
            let (out, work) = gaunt_full_tp_counted(&p[i].0, &p[i].1, 2 * l)?;
            black_box(out);
            Ok(work.total())
        }
        (BenchPath::OracleGaunt, Workload::Pairs(p)) => {
            let (out, ops) = gaunt_tp_reference_counted(&p[i].0, &p[i].1, 2 * l, None);
            black_box(out);
            Ok(ops)
        }
        (BenchPath::OracleCg, Workload::Pairs(p)) => {
            let (out, ops) = cg_tp_reference_counted(&p[i].0, &p[i].1, 2 * l);
            black_box(out);
            Ok(ops)
        }
        (BenchPath::SparseFilter, Workload::Edges(e)) => {
            let (x, edge, h) = &e[i];
            let (out, work) = equiv_convolution_counted(x, edge, h, 2 * l)?;
            black_box(out);
            Ok(work.total.total())
        }
        (BenchPath::DenseFilter, Workload::Edges(e)) => {
            let (x, edge, h) = &e[i];
            let filter =
                eval_sh_vector(l, edge.direction())?.scale_degrees(&DegreeWeights::new(h.as_slice().to_vec())?)?;
            let (out, work) = gaunt_full_tp_counted(x, &filter, 2 * l)?;
            black_box(out);
            Ok(work.total())
        }
        (BenchPath::Tree | BenchPath::LeftFold, Workload::Features(f)) => {
            let schedule = if path == BenchPath::Tree { Schedule::Balanced } else { Schedule::LeftFold };
            let opts = MultiTpOptions { schedule, fused: false };
            let out = self_product_with(&f[i], BodyOrder::new(nu)?, &DegreeWeights::ones(l), nu * l, opts)?;
            Ok(black_box(out).fft_work)
        }
        _ => unreachable!("path does not belong to this operation class"),
    }
}

fn item_count(w: &Workload) -> usize {
    match w {
        Workload::Pairs(p) => p.len(),
        Workload::Edges(e) => e.len(),
        Workload::Features(f) => f.len(),
    }
}

/// One timed pass over every item; returns wall time and summed work.
fn run_once(
    path: BenchPath,
    w: &Workload,
    l: usize,
    nu: usize,
    pool: Option<&rayon::ThreadPool>,
) -> CliResult<(u128, u64)> {
    let n = item_count(w);
    let start = Instant::now();
    let work = match pool {
        Some(pool) => {
            pool.install(|| (0..n).into_par_iter().map(|i| run_item(path, w, i, l, nu)).sum::<gtp_core::Result<u64>>())?
        }
        None => (0..n).map(|i| run_item(path, w, i, l, nu)).sum::<gtp_core::Result<u64>>()?,
    };
    Ok((start.elapsed().as_nanos(), work))
}

/// Median with the mean of the two middle values for even counts.
pub fn median<T: Copy + Ord + Into<u128>>(values: &[T]) -> u128 {
    let mut v: Vec<u128> = values.iter().map(|&x| x.into()).collect();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2
    }
}

fn table_degree(cfg: &BenchConfig, l: usize) -> usize {
    match cfg.op {
        OpClass::ManyBody => cfg.nu * l,
        _ => 2 * l,
    }
}

/// Runs the configured benchmark; tables come from (or go to) `cache`
/// before any timing starts.
pub fn run_bench(cfg: &BenchConfig, cache: &Path) -> CliResult<Vec<BenchRow>> {
    cfg.validate()?;
    for &l in &cfg.l_list {
        warm_table(cache, table_degree(cfg, l))?;
    }
    let pool = if cfg.threads > 1 {
        let p = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cfg.threads)))?;
        Some(p)
    } else {
        None
    };

    let mut rows = Vec::new();
    for &l in &cfg.l_list {
        let w = sample_workload(cfg, l)?;
        for path in cfg.paths() {
            if path.is_oracle() && l > cfg.oracle_max_l {
                tracing::info!(path = path.name(), l, "skipping oracle above --oracle-max-l");
                continue;
            }
            for _ in 0..cfg.warmup {
                run_once(path, &w, l, cfg.nu, pool.as_ref())?;
            }
            let mut walls = Vec::with_capacity(cfg.repeats);
            let mut works = Vec::with_capacity(cfg.repeats);
            let row = |repeat: i64, wall_ns: u128, work_ops: u64| BenchRow {
                op_class: cfg.op.name(),
                path: path.name(),
                l,
                channels: cfg.channels,
                batch: cfg.batch,
                nu: cfg.nu_column(),
                repeat,
                wall_ns,
                work_ops,
            };
            for r in 0..cfg.repeats {
                let (wall, work) = run_once(path, &w, l, cfg.nu, pool.as_ref())?;
                walls.push(wall);
                works.push(work);
                rows.push(row(r as i64, wall, work));
            }
            rows.push(row(-1, median(&walls), median(&works) as u64));
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: &Path) -> CliResult<()> {
    let err = |source| CliError::Csv { path: out.to_path_buf(), source };
    let mut w = csv::Writer::from_path(out).map_err(err)?;
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.write_record([
            r.op_class.to_string(),
            r.path.to_string(),
            r.l.to_string(),
            r.channels.to_string(),
            r.batch.to_string(),
            r.nu.to_string(),
            r.repeat.to_string(),
            r.wall_ns.to_string(),
            r.work_ops.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| err(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config() -> BenchConfig {
        BenchConfig {
            op: OpClass::FeatureInteraction,
            l_list: vec![1, 2],
            channels: 2,
            batch: 1,
            nu: 3,
            repeats: 3,
            warmup: 0,
            seed: 7,
            threads: 1,
            oracle_max_l: 12,
            with_cg: false,
        }
    }

    #[test]
    fn validation() {
        assert!(config().validate().is_ok());
        let bad = [
            BenchConfig { repeats: 2, ..config() },
            BenchConfig { l_list: vec![4, 33], ..config() },
            BenchConfig { l_list: vec![], ..config() },
            BenchConfig { channels: 0, ..config() },
            BenchConfig { op: OpClass::ManyBody, nu: 3, l_list: vec![22], ..config() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(CliError::Usage(_))), "{cfg:?}");
        }
    }

    #[test]
    fn samples_depend_only_on_seed_and_degree() {
        let a = sample_workload(&config(), 3).unwrap();
        let b = sample_workload(&BenchConfig { l_list: vec![3], ..config() }, 3).unwrap();
        let (Workload::Pairs(a), Workload::Pairs(b)) = (a, b) else { panic!() };
        assert_eq!(a, b);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[5u64, 1, 3]), 3);
        assert_eq!(median(&[4u64, 1, 3, 2]), 2);
    }

    proptest! {
        #[test]
        fn median_is_bracketed(v in proptest::collection::vec(0u64..1_000_000, 1..20)) {
            let m = median(&v) as u64;
            prop_assert!(*v.iter().min().unwrap() <= m && m <= *v.iter().max().unwrap());
        }

    }
}
