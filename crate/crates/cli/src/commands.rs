use std::fs;
use std::path::{Path, PathBuf};

use ckm_core::discovery::format_ranking;
use ckm_core::sim::{export_csv, import_csv, run_experiment, Experiment, InitialDist, NoiseSpec};
use ckm_core::{
    apply_intervention, apply_interventions, compile_mass_action, format_model, parse_directive,
    parse_model, parse_network, rank_models, BasisSpec, KineticModel, TimeGrid,
};

use crate::config::{RunConfig, Sigma};
use crate::{plot, Cli, CliError, Command};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    let config = cli.config.as_deref().map(RunConfig::load).transpose()?;
    match &cli.command {
        Command::Compile { network, output } => compile(cli, network, output.as_deref()),
        Command::Simulate => {
            let cfg = config.ok_or_else(|| CliError::Usage("simulate needs --config".into()))?;
            simulate(cli, &cfg)
        }
        Command::Intervene { model, directives, output } => intervene(cli, model, directives, output.as_deref()),
        Command::Discover { data, target, p_max, degree, output } => {
            let cfg = config.unwrap_or_default();
            let data = match (data, &cfg.discover.data, &cfg.output) {
                (Some(p), _, _) => p.clone(),
                (None, Some(p), _) => p.clone(),
                (None, None, Some(stem)) => cli.out_dir.join(format!("{stem}.csv")),
                (None, None, None) => return Err(CliError::Usage("discover needs --data or a config naming the dataset".into())),
            };
            let target = target
                .clone()
                .or(cfg.discover.target.clone())
                .ok_or_else(|| CliError::Usage("discover needs --target".into()))?;
            let spec = BasisSpec {
                degree: degree.or(cfg.discover.degree).unwrap_or(2),
                include_target: cfg.discover.include_target.unwrap_or(true),
                mm_half_sat: cfg.discover.mm_half_sat.clone(),
            };
            let output = match (output, &cfg.discover.output) {
                (Some(p), _) => p.clone(),
                (None, Some(name)) => cli.out_dir.join(name),
                (None, None) => cli.out_dir.join("ranking.tsv"),
            };
            discover(&data, &target, p_max.or(cfg.discover.p_max), &spec, &output)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn default_output(cli: &Cli, input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned());
    cli.out_dir.join(format!("{stem}{suffix}"))
}

fn with_context(what: &Path) -> impl Fn(ckm_core::Error) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", what.display())),
        CliError::Runtime(m) => CliError::Runtime(format!("{}: {m}", what.display())),
    }
}

fn print_initial(model: &KineticModel) {
    for (name, v) in model.names().iter().zip(model.initial()) {
        match v {
            Some(v) => println!("{name}_0 = {v}"),
            None => println!("{name}_0 = unset"),
        }
    }
}

fn compile(cli: &Cli, network: &Path, output: Option<&Path>) -> Result<()> {
    let net = parse_network(&read_input(network)?).map_err(with_context(network))?;
    let model = compile_mass_action(&net)?;
    let out = output.map_or_else(|| default_output(cli, network, ".model"), Path::to_path_buf);
    write_output(&out, &format_model(&model))?;
    print!("{}", model.equations());
    println!("edges:");
    print!("{}", model.causal_graph().display(model.names()));
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn intervene(cli: &Cli, path: &Path, directives: &[String], output: Option<&Path>) -> Result<()> {
    let mut model = parse_model(&read_input(path)?).map_err(with_context(path))?;
    for text in directives {
        let iv = parse_directive(text, &model)?;
        model = apply_intervention(&model, &iv)?;
    }
    let out = output.map_or_else(|| default_output(cli, path, ".intervened.model"), Path::to_path_buf);
    write_output(&out, &format_model(&model))?;
    print!("{}", model.equations());
    print_initial(&model);
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn named_values(model: &KineticModel, pairs: &[(String, f64)]) -> Result<Vec<(usize, f64)>> {
    pairs
        .iter()
        .map(|(name, v)| Ok((model.index_of(name)?, *v)))
        .collect()
}

fn load_model(cfg: &RunConfig) -> Result<KineticModel> {
    let mut model = match (&cfg.network, &cfg.model) {
        (Some(p), None) => compile_mass_action(&parse_network(&read_input(p)?).map_err(with_context(p))?)?,
        (None, Some(p)) => parse_model(&read_input(p)?).map_err(with_context(p))?,
        _ => return Err(CliError::Usage("[model] needs exactly one of `network` or `model`".into())),
    };
    if !cfg.initial.is_empty() {
        let mut init = model.initial().to_vec();
        for (k, v) in named_values(&model, &cfg.initial)? {
            init[k] = Some(v);
        }
        let init = init
            .iter()
            .zip(model.names())
            .map(|(v, name)| v.ok_or_else(|| CliError::Usage(format!("no initial value for `{name}`"))))
            .collect::<Result<Vec<f64>>>()?;
        model = model.with_initial(init)?;
    }
    Ok(model)
}

fn simulate(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let base = load_model(cfg)?;
    let d = base.dim();
    let g = cfg.grid.as_ref().ok_or_else(|| CliError::Usage("config needs a [grid] section".into()))?;
    let grid = TimeGrid::uniform(g.start, g.end, g.points, g.substeps)?;

    let noise = match &cfg.sigma {
        None => NoiseSpec::None,
        Some(Sigma::All(s)) => NoiseSpec::uniform(*s, d),
        Some(Sigma::PerSpecies(pairs)) => {
            let mut s = vec![0.0; d];
            for (k, v) in named_values(&base, pairs)? {
                s[k] = v;
            }
            NoiseSpec::Gaussian(s)
        }
    };
    let initial = if cfg.initial_sd.is_empty() {
        None
    } else {
        let mean = base.require_initial()?;
        let mut dists: Vec<InitialDist> = mean.iter().map(|&m| InitialDist::Point(m)).collect();
        for (k, sd) in named_values(&base, &cfg.initial_sd)? {
            dists[k] = InitialDist::Gaussian { mean: mean[k], sd };
        }
        Some(dists)
    };

    let blocks = if cfg.environments.is_empty() {
        vec![crate::config::EnvBlock { label: "observational".into(), reps: 1, directives: Vec::new() }]
    } else {
        cfg.environments.clone()
    };
    let mut stochastic = !noise.is_noiseless() || initial.is_some();
    let mut envs = Vec::new();
    for b in &blocks {
        let ivs = b
            .directives
            .iter()
            .map(|t| parse_directive(t, &base))
            .collect::<ckm_core::Result<Vec<_>>>()
            .map_err(|e| CliError::Usage(format!("environment `{}`: {e}", b.label)))?;
        stochastic |= apply_interventions(&base, &ivs)?.is_stochastic();
        envs.push((b, ivs));
    }
    let seed = match cli.seed.or(cfg.seed) {
        Some(s) => s,
        None if stochastic => {
            return Err(CliError::Usage("this run has stochastic steps; give a seed ([run] seed or --seed)".into()))
        }
        None => 0,
    };

    let mut exp = Experiment::new(base, grid, seed).noise(noise);
    exp.initial = initial;
    for (b, ivs) in envs {
        exp = exp.environment(&b.label, ivs, b.reps);
    }
    let ds = run_experiment(&exp)?;

    let stem = cfg.output.as_deref().unwrap_or("dataset");
    let csv = cli.out_dir.join(format!("{stem}.csv"));
    fs::create_dir_all(&cli.out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", cli.out_dir.display())))?;
    export_csv(&ds, &csv).map_err(|e| CliError::Runtime(e.to_string()))?;
    let bundle = cli.out_dir.join(format!("{stem}_plot"));
    for (rel, text) in plot::plot_files(&ds) {
        write_output(&bundle.join(rel), &text)?;
    }
    println!("dataset: {} ({} rows, {} species, {} time points)", csv.display(), ds.n_rows(), ds.dim(), ds.n_times());
    for (e, env) in ds.environments.iter().enumerate() {
        println!("plot data: {} ({} reps)", bundle.join(&env.label).display(), ds.reps_in_env(e));
    }
    Ok(())
}

fn discover(data: &Path, target: &str, p_max: Option<usize>, spec: &BasisSpec, output: &Path) -> Result<()> {
    let ds = import_csv(data)?;
    let target = ds.index_of(target)?;
    let ranking = rank_models(&ds, target, p_max.unwrap_or(ds.dim()), spec)?;
    if !ranking.invariance_available {
        eprintln!("warning: single environment; invariance cannot be assessed, ranking by predictability only");
    }
    let text = format_ranking(&ranking);
    write_output(output, &text)?;
    // comment lines, the header and the top three rows
    let head = text.lines().filter(|l| l.starts_with('#')).count() + 1;
    for line in text.lines().take(head + 3) {
        println!("{line}");
    }
    eprintln!("wrote {}", output.display());
    Ok(())
}
