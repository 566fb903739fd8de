use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use proxauth_authd::{
    AuthPolicy, AuthService, JsonlStore, Lab, Mailer, MemoryStore, ServiceParts, SpoolMailer, StdoutMailer, SystemClock,
    UserStore,
};
use proxauth_core::ml::{
    benchmark_inference, cross_validate, feature_importance, holdout_evaluation, split, train, Algo, TimingRow,
    TrainedModel,
};
use proxauth_core::rfsim::{build_environment, generate_dataset, Environment, SiteSurvey};
use proxauth_core::seed::derive_seed;
use proxauth_core::threat::{run_suite, AttackSpec};
use proxauth_core::{Dataset, Error as CoreError, LabeledSet, FEATURE_NAMES};
use serde::Serialize;

use crate::args::*;
use crate::config::FileConfig;
use crate::demo::{run_demo, DemoPlan};
use crate::manifest::{unix_now, RunManifest};

pub struct Ctx {
    pub config: FileConfig,
    pub seed: u64,
    pub json: bool,
    pub argv: Vec<String>,
    pub command: String,
    pub args: serde_json::Value,
    pub started_at: f64,
}

impl Ctx {
    fn manifest(&self, inputs: &[&Path], outputs: &[&Path]) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            argv: self.argv.clone(),
            working_dir: std::env::current_dir().unwrap_or_default(),
            args: self.args.clone(),
            config: self.config.clone(),
            seed: self.seed,
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
            outputs: outputs.iter().map(|p| p.to_path_buf()).collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: self.started_at,
            finished_at: unix_now(),
        }
    }

    fn finish(&self, inputs: &[&Path], outputs: &[&Path]) -> anyhow::Result<()> {
        let m = self.manifest(inputs, outputs);
        for o in outputs {
            m.write_beside(o)?;
        }
        Ok(())
    }

    /// Writes `rows` as CSV (or JSON with `--json`) to `output`, with its
    /// manifest, or to stdout.
    fn emit<T: Serialize>(&self, rows: &[T], output: Option<&Path>, inputs: &[&Path]) -> anyhow::Result<()> {
        let mut buf = Vec::new();
        if self.json {
            serde_json::to_writer_pretty(&mut buf, rows)?;
            buf.push(b'\n');
        } else {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        match output {
            Some(p) => {
                write_file(p, &buf)?;
                self.finish(inputs, &[p])
            }
            None => {
                std::io::stdout().write_all(&buf)?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load_data(path: &Path) -> anyhow::Result<LabeledSet> {
    let d = Dataset::load(path).with_context(|| format!("loading dataset {}", path.display()))?;
    Ok(d.to_labeled())
}

fn test_fraction(ctx: &Ctx, flag: Option<f64>) -> f64 {
    flag.unwrap_or(ctx.config.evaluation.test_fraction)
}

/// Splits with the run seed and trains every requested model on the
/// training part, exactly as `eval` does.
fn split_and_train(ctx: &Ctx, data: &LabeledSet, algos: &[Algo], tf: f64) -> anyhow::Result<(LabeledSet, LabeledSet, Vec<TrainedModel>)> {
    let (tr, te) = split(data, tf, ctx.seed)?;
    let models = algos
        .iter()
        .map(|&a| train(a, &tr, &ctx.config.hyperparams, derive_seed(ctx.seed, 1)))
        .collect::<proxauth_core::Result<Vec<_>>>()?;
    Ok((tr, te, models))
}

pub fn gen_data(ctx: &mut Ctx, a: &GenDataArgs) -> anyhow::Result<()> {
    let sim = &mut ctx.config.sim;
    if let Some(n) = a.aps {
        sim.ap_count = n;
    }
    if let Some(n) = a.authentic {
        sim.n_authentic = n;
    }
    if let Some(n) = a.unauthorized {
        sim.n_unauthorized = n;
    }
    sim.seed = ctx.seed;
    sim.validate()?;
    let env = build_environment(sim, ctx.seed)?;
    let data = generate_dataset(&env, sim.n_authentic, sim.n_unauthorized, ctx.seed)?;
    let env_out = a.env_out.clone().unwrap_or_else(|| default_env_path(&a.output));
    let mut csv = Vec::new();
    if matches!(a.output.extension().and_then(|e| e.to_str()), Some("jsonl" | "json" | "ndjson")) {
        data.write_jsonl(&mut csv)?;
    } else {
        data.write_csv(&mut csv)?;
    }
    write_file(&a.output, &csv)?;
    write_file(&env_out, (serde_json::to_string_pretty(&env)? + "\n").as_bytes())?;
    let (pos, neg) = data.class_counts();
    eprintln!("wrote {} rows ({pos} authentic, {neg} unauthorized) to {}", data.len(), a.output.display());
    ctx.finish(&[], &[&a.output, &env_out])
}

pub fn default_env_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into());
    data.with_file_name(format!("{stem}.env.json"))
}

pub fn train_cmd(ctx: &Ctx, a: &TrainArgs) -> anyhow::Result<()> {
    let data = load_data(&a.data.data)?;
    let train_set = match a.holdout {
        Some(f) => split(&data, f, ctx.seed)?.0,
        None => data,
    };
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut outputs = Vec::new();
    for &algo in &a.data.algo.0 {
        let m = train(algo, &train_set, &ctx.config.hyperparams, derive_seed(ctx.seed, 1))?;
        let path = a.out_dir.join(format!("{}.json", algo.name().to_lowercase()));
        write_file(&path, (m.to_json()? + "\n").as_bytes())?;
        eprintln!("trained {algo} on {} rows -> {}", train_set.len(), path.display());
        outputs.push(path);
    }
    let outs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    ctx.finish(&[&a.data.data], &outs)
}

pub fn eval(ctx: &Ctx, a: &EvalArgs) -> anyhow::Result<()> {
    let data = load_data(&a.data.data)?;
    let rows = holdout_evaluation(&data, &a.data.algo.0, test_fraction(ctx, a.test_fraction), &ctx.config.hyperparams, ctx.seed)?;
    ctx.emit(&rows, a.output.as_deref(), &[&a.data.data])
}

pub fn cv(ctx: &Ctx, a: &CvArgs) -> anyhow::Result<()> {
    let data = load_data(&a.data.data)?;
    let k = a.k.unwrap_or(ctx.config.evaluation.folds);
    let rows = cross_validate(&data, &a.data.algo.0, k, &ctx.config.hyperparams, ctx.seed)?;
    ctx.emit(&rows, a.output.as_deref(), &[&a.data.data])
}

#[derive(Debug, Serialize)]
struct ImportanceRow {
    model: &'static str,
    feature: &'static str,
    score: f64,
    rank: usize,
}

pub fn importance(ctx: &Ctx, a: &ImportanceArgs) -> anyhow::Result<()> {
    let data = load_data(&a.data.data)?;
    let (tr, _, models) = split_and_train(ctx, &data, &a.data.algo.0, test_fraction(ctx, a.test_fraction))?;
    let mut rows = Vec::new();
    for m in &models {
        let imp = match feature_importance(m, &tr) {
            Err(e @ CoreError::NotApplicable(_)) if models.len() > 1 => {
                eprintln!("skipping {}: {e}", m.algo);
                continue;
            }
            r => r?,
        };
        let rank = imp.ranking();
        for (j, &score) in imp.scores.iter().enumerate() {
            let r = rank.iter().position(|&f| f == j).unwrap_or(j) + 1;
            rows.push(ImportanceRow { model: m.algo.name(), feature: FEATURE_NAMES[j], score, rank: r });
        }
    }
    ctx.emit(&rows, a.output.as_deref(), &[&a.data.data])
}

pub fn bench(ctx: &Ctx, a: &BenchArgs) -> anyhow::Result<()> {
    let data = load_data(&a.data.data)?;
    let (_, te, models) = split_and_train(ctx, &data, &a.data.algo.0, test_fraction(ctx, a.test_fraction))?;
    let mut rows = models
        .iter()
        .map(|m| {
            Ok(TimingRow {
                model: m.algo.name().into(),
                rows: te.len(),
                repetitions: a.reps,
                median_seconds: benchmark_inference(m, &te.rows, a.reps)?,
                rank: 0,
            })
        })
        .collect::<proxauth_core::Result<Vec<_>>>()?;
    TimingRow::rank_all(&mut rows);
    ctx.emit(&rows, a.output.as_deref(), &[&a.data.data])
}

/// Config specs, narrowed to `--attacks` and adjusted by the other flags.
pub fn resolve_attacks(config: &[AttackSpec], a: &AttackArgs) -> Vec<AttackSpec> {
    let base = if config.is_empty() { AttackSpec::defaults() } else { config.to_vec() };
    let mut specs: Vec<AttackSpec> = if a.attacks.is_empty() {
        base
    } else {
        a.attacks
            .iter()
            .map(|want| {
                let kind = match want {
                    AttackName::Evasion => proxauth_core::threat::AttackKind::Evasion,
                    AttackName::Extraction => proxauth_core::threat::AttackKind::Extraction,
                    AttackName::Interference => proxauth_core::threat::AttackKind::Interference,
                };
                base.iter()
                    .chain(AttackSpec::defaults().iter())
                    .find(|s| s.kind() == kind)
                    .cloned()
                    .expect("defaults cover every kind")
            })
            .collect()
    };
    for s in &mut specs {
        match s {
            AttackSpec::Evasion { sigmas } if !a.sigmas.is_empty() => *sigmas = a.sigmas.clone(),
            AttackSpec::Extraction { range_db, query_budget, .. } => {
                if let Some(r) = a.range_db {
                    *range_db = r;
                }
                if a.query_budget.is_some() {
                    *query_budget = a.query_budget;
                }
            }
            AttackSpec::Interference { sigma } => {
                if let Some(x) = a.interference_sigma {
                    *sigma = x;
                }
            }
            _ => {}
        }
    }
    specs
}

pub fn attack(ctx: &mut Ctx, a: &AttackArgs) -> anyhow::Result<()> {
    let data = load_data(&a.data.data)?;
    let specs = resolve_attacks(&ctx.config.attacks, a);
    ctx.config.attacks = specs.clone();
    let (tr, te, models) = split_and_train(ctx, &data, &a.data.algo.0, test_fraction(ctx, a.test_fraction))?;
    let report = run_suite(&models, &tr, &te, &specs, &ctx.config.hyperparams, ctx.seed)?;
    let csv_path = a.out_dir.join("attack_report.csv");
    let json_path = a.out_dir.join("attack_report.json");
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_file(&csv_path, &csv)?;
    write_file(&json_path, (report.to_json()? + "\n").as_bytes())?;
    print!("{}", report.render());
    ctx.finish(&[&a.data.data], &[&csv_path, &json_path])
}

pub fn serve(ctx: &mut Ctx, a: &ServeArgs) -> anyhow::Result<()> {
    let cfg = &mut ctx.config.service;
    if let Some(b) = &a.bind {
        cfg.bind = b.clone();
    }
    if let Some(e) = &a.environment {
        cfg.environment = Some(e.clone());
    }
    if !a.models.is_empty() {
        cfg.models = a.models.clone();
    }
    if let Some(s) = &a.user_store {
        cfg.user_store = Some(s.clone());
    }
    if let Some(s) = &a.mail_spool {
        cfg.mail_spool = Some(s.clone());
    }
    let cfg = cfg.clone();
    let Some(env_path) = &cfg.environment else {
        bail!("serve needs an environment file (--environment or service.environment)");
    };
    if cfg.models.is_empty() {
        bail!("serve needs model files (--models or service.models)");
    }
    let env = Environment::load(env_path).with_context(|| format!("loading {}", env_path.display()))?;
    let models = cfg
        .models
        .iter()
        .map(|p| TrainedModel::load(p).with_context(|| format!("loading model {}", p.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let store: Arc<dyn UserStore> = match &cfg.user_store {
        Some(p) => Arc::new(JsonlStore::open(p)?),
        None => Arc::new(MemoryStore::default()),
    };
    let mailer: Arc<dyn Mailer> = match &cfg.mail_spool {
        Some(d) => Arc::new(SpoolMailer::new(d)?),
        None => Arc::new(StdoutMailer),
    };
    let svc = AuthService::new(ServiceParts {
        policy: cfg.policy.clone(),
        models,
        survey: SiteSurvey::from_environment(&env),
        store,
        clock: Arc::new(SystemClock),
        mailer,
        hash_cost: cfg.hash,
        token_seed: None,
    })?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&cfg.bind).await.with_context(|| format!("binding {}", cfg.bind))?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        proxauth_authd::http::serve(Arc::new(svc), listener, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        Ok(())
    })
}

pub fn demo_session(ctx: &Ctx, a: &DemoArgs) -> anyhow::Result<()> {
    let sim = &ctx.config.sim;
    let lab = Lab::from_config(sim, &ctx.config.hyperparams, a.per_class, a.per_class, ctx.seed)?;
    let plan = DemoPlan {
        separate_at: a.separate_at,
        together_m: a.together_m,
        separation_m: a.separation_m,
        max_ticks: a.max_ticks.unwrap_or(a.separate_at + 2),
    };
    let policy: AuthPolicy = ctx.config.service.policy.clone();
    let steps = run_demo(&lab, plan, policy, ctx.seed)?;
    ctx.emit(&steps, a.output.as_deref(), &[])
}
