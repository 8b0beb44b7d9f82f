use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use tropstat::datagen::{simulate_equidistant, SimConfig};
use tropstat::experimental::{fit_lda, fit_regression, LdaConfig, RegressionConfig};
use tropstat::fmt::sig12;
use tropstat::location::{closure_report, fermat_weber, frechet_mean, LocationResult};
use tropstat::pca::{fit_principal_polytope_with, pca_coordinates, PcaConfig};
use tropstat::svm::{accuracy, classify, train_hard, train_soft, LabeledSample, SvmModel};
use tropstat::tree::{
    cophenetic, default_leaf_names, leaves_for_len, serialize_newick, three_point_check,
    topology_id, ultrametric_to_tree, DissimilarityMap,
};
use tropstat::tropical::{
    project_onto_polytope, sector_of, trop_distance, Sector, TropicalHyperplane,
};
use tropstat::{PhyloTree, TropicalPoint};

use crate::envelope::to_value;
use crate::error::{CliError, CliResult, DIMENSION, NOT_ULTRAMETRIC};
use crate::io;
use crate::svg;
use crate::{Cli, Command, ModeArg, SvmCommand, TreeCommand};

/// What a command hands back to `main` for printing.
pub struct Output {
    pub result: Value,
    pub diagnostics: Value,
    pub seed: Option<u64>,
    /// Text printed on stdout ahead of the envelope.
    pub stream: Option<String>,
}

impl Output {
    fn new(result: Value, diagnostics: Value) -> Self {
        Output {
            result,
            diagnostics,
            seed: None,
            stream: None,
        }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    if !(cli.tol >= 0.0 && cli.tol.is_finite()) {
        return Err(CliError::parameter(format!(
            "--tol must be a nonnegative number, got {}",
            cli.tol
        )));
    }
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Metric { a, b } => metric(cli, a, b),
        Command::Fw {
            points,
            check_ultrametric,
        } => {
            let sample = io::read_points(points, cli.header)?;
            location(cli, fermat_weber(&sample)?, *check_ultrametric)
        }
        Command::Frechet {
            points,
            check_ultrametric,
        } => {
            let sample = io::read_points(points, cli.header)?;
            location(cli, frechet_mean(&sample)?, *check_ultrametric)
        }
        Command::Pca {
            points,
            s,
            out_prefix,
            restarts,
        } => pca(cli, points, *s, out_prefix.as_deref(), *restarts, seed).map(|o| o.seeded(seed)),
        Command::Svm(SvmCommand::Train {
            points,
            labels_column,
            mode,
            c,
            model_out,
        }) => svm_train(cli, points, *labels_column, *mode, *c, model_out.as_deref()),
        Command::Svm(SvmCommand::Predict { model, points }) => svm_predict(cli, model, points),
        Command::Tree(TreeCommand::Newick2ultra { input, out }) => {
            newick2ultra(cli, input, out.as_deref())
        }
        Command::Tree(TreeCommand::Ultra2newick { input, leaves, out }) => {
            ultra2newick(cli, input, leaves.as_deref(), out.as_deref())
        }
        Command::Tree(TreeCommand::Check { input }) => tree_check(cli, input),
        Command::Tree(TreeCommand::Simulate {
            n_leaves,
            height,
            count,
            out,
        }) => simulate(*n_leaves, *height, *count, seed, out.as_deref()).map(|o| o.seeded(seed)),
        Command::Lda {
            class1,
            class2,
            grid,
            sweeps,
            perturbation,
        } => {
            let s1 = io::read_points(class1, cli.header)?;
            let s2 = io::read_points(class2, cli.header)?;
            let config = LdaConfig {
                grid: *grid,
                sweeps: *sweeps,
                perturbation: *perturbation,
            };
            let fit = fit_lda(&s1, &s2, seed, &config)?;
            let diagnostics = json!({ "experimental": true, "config": to_value(&config) });
            Ok(Output::new(to_value(&fit), diagnostics).seeded(seed))
        }
        Command::Regress {
            data,
            starts,
            max_sweeps,
        } => {
            let rows = io::read_rows(data, cli.header)?;
            if rows[0].len() < 2 {
                return Err(CliError::new(
                    DIMENSION,
                    "regression data needs at least one explanatory column",
                ));
            }
            let data: Vec<(Vec<f64>, f64)> = rows
                .into_iter()
                .map(|mut r| {
                    let y = r.pop().unwrap();
                    (r, y)
                })
                .collect();
            let config = RegressionConfig {
                starts: *starts,
                max_sweeps: *max_sweeps,
                ..RegressionConfig::default()
            };
            let model = fit_regression(&data, seed, &config)?;
            let diagnostics =
                json!({ "experimental": true, "config": to_value(&config), "n": data.len() });
            Ok(Output::new(to_value(&model), diagnostics).seeded(seed))
        }
    }
}

fn operand(cli: &Cli, text: &str) -> CliResult<Vec<TropicalPoint>> {
    if let Some(v) = io::parse_inline(text) {
        return io::to_points(vec![v]);
    }
    let path = Path::new(text);
    if !path.exists() {
        return Err(CliError::parse(format!(
            "{text:?} is neither a vector nor a readable file"
        )));
    }
    io::read_points(path, cli.header)
}

fn metric(cli: &Cli, a: &str, b: &str) -> CliResult<Output> {
    let (xs, ys) = (operand(cli, a)?, operand(cli, b)?);
    let n = match (xs.len(), ys.len()) {
        (p, q) if p == q => p,
        (1, q) => q,
        (p, 1) => p,
        (p, q) => {
            return Err(CliError::new(
                DIMENSION,
                format!("cannot pair {p} points with {q} points"),
            ));
        }
    };
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let x = &xs[k.min(xs.len() - 1)];
        let y = &ys[k.min(ys.len() - 1)];
        d.push(trop_distance(x, y)?);
    }
    let result = if n == 1 {
        json!({ "distance": d[0] })
    } else {
        json!({ "distances": d })
    };
    Ok(Output::new(result, json!({ "pairs": n })))
}

fn location(cli: &Cli, res: LocationResult, check: Option<usize>) -> CliResult<Output> {
    let result = json!({
        "point": to_value(&res.point),
        "objective": res.objective,
        "method": to_value(&res.method),
    });
    let mut diagnostics = to_value(&res.diagnostics);
    if let Some(n) = check {
        let report = closure_report(&res, n, cli.tol)?;
        diagnostics["ultrametric_closure"] = json!({
            "n_leaves": n,
            "tol": cli.tol,
            "raw": report.raw,
            "shifted": report.shifted,
            "passed": report.raw && report.shifted,
        });
    }
    Ok(Output::new(result, diagnostics))
}

fn pca(
    cli: &Cli,
    points: &Path,
    s: usize,
    prefix: Option<&Path>,
    restarts: usize,
    seed: u64,
) -> CliResult<Output> {
    let sample = io::read_points(points, cli.header)?;
    if s == 0 || s > sample.len() {
        return Err(CliError::parameter(format!(
            "-s {s} must lie in 1..={}",
            sample.len()
        )));
    }
    let model = fit_principal_polytope_with(&sample, s, seed, &PcaConfig { restarts })?;
    let fw = fermat_weber(&sample)?;
    let fw_gap = trop_distance(
        &fw.point,
        &project_onto_polytope(&fw.point, &model.polytope)?,
    )?;

    let mut files = Vec::new();
    if let Some(prefix) = prefix.filter(|_| s == 3) {
        let coords = pca_coordinates(&model, &sample)?;
        let mut csv = String::from("x,y\n");
        for (x, y) in &coords {
            csv.push_str(&format!("{},{}\n", sig12(*x), sig12(*y)));
        }
        let csv_path = with_suffix(prefix, ".coords.csv");
        io::write_text(&csv_path, &csv)?;
        let svg_path = with_suffix(prefix, ".svg");
        io::write_text(
            &svg_path,
            &svg::scatter(&coords, None, "principal polytope coordinates"),
        )?;
        files.push(csv_path.display().to_string());
        files.push(svg_path.display().to_string());
    }
    let result = json!({
        "vertices": to_value(model.polytope.vertices()),
        "vertex_indices": model.vertex_indices,
        "objective": model.objective,
        "trace": model.trace,
    });
    let diagnostics = json!({
        "restarts": restarts,
        "fw_distance_to_polytope": fw_gap,
        "files": files,
    });
    Ok(Output::new(result, diagnostics))
}

fn with_suffix(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn sector_counts(model: &SvmModel, sample: &LabeledSample) -> CliResult<BTreeMap<String, usize>> {
    let h = TropicalHyperplane::new(model.omega.clone());
    let mut counts = BTreeMap::new();
    for p in &sample.points {
        let key = match sector_of(p, &h)? {
            Sector::Open(i) => i.to_string(),
            Sector::OnHyperplane => "hyperplane".to_string(),
        };
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}

fn svm_train(
    cli: &Cli,
    points: &Path,
    column: Option<usize>,
    mode: ModeArg,
    c: Option<f64>,
    model_out: Option<&Path>,
) -> CliResult<Output> {
    let (pts, labels) = io::read_labeled(points, cli.header, column)?;
    let sample = LabeledSample::new(pts, labels)?;
    let model = match mode {
        ModeArg::Hard => {
            if c.is_some() {
                return Err(CliError::parameter("-C applies to soft mode only"));
            }
            train_hard(&sample)?
        }
        ModeArg::Soft => {
            let c = c.ok_or_else(|| CliError::parameter("soft mode needs -C"))?;
            train_soft(&sample, c)?
        }
    };
    let acc = accuracy(&model, &sample)?;
    if let Some(path) = model_out {
        let text =
            serde_json::to_string_pretty(&crate::envelope::round_floats(to_value(&model))).unwrap();
        io::write_text(path, &(text + "\n"))?;
    }
    let diagnostics = json!({
        "training_accuracy": acc,
        "n_points": sample.points.len(),
        "sector_counts": sector_counts(&model, &sample)?,
    });
    Ok(Output::new(to_value(&model), diagnostics))
}

fn svm_predict(cli: &Cli, model: &Path, points: &Path) -> CliResult<Output> {
    let model: SvmModel = serde_json::from_str(&io::read_text(model)?)
        .map_err(|e| CliError::parse(format!("{}: {e}", model.display())))?;
    let pts = io::read_points(points, cli.header)?;
    let mut stream = String::new();
    let mut counts = [0usize; 2];
    for p in &pts {
        let l = classify(&model, p)?;
        counts[l as usize] += 1;
        stream.push_str(&format!("{l}\n"));
    }
    let mut out = Output::new(json!({ "n": pts.len(), "counts": counts }), json!({}));
    out.stream = Some(stream);
    Ok(out)
}

fn same_leaves(trees: &[PhyloTree]) -> CliResult<Vec<DissimilarityMap>> {
    let maps = trees
        .iter()
        .map(cophenetic)
        .collect::<tropstat::Result<Vec<_>>>()?;
    if let Some(first) = maps.first() {
        for (k, m) in maps.iter().enumerate() {
            if m.leaf_names() != first.leaf_names() {
                return Err(CliError::new(
                    DIMENSION,
                    format!("tree {} has a different leaf set", k + 1),
                ));
            }
        }
    }
    Ok(maps)
}

fn newick2ultra(cli: &Cli, input: &Path, out: Option<&Path>) -> CliResult<Output> {
    let maps = same_leaves(&io::read_newick(input)?)?;
    let leaves = maps[0].leaf_names().to_vec();
    let vectors: Vec<&[f64]> = maps.iter().map(|m| m.values()).collect();
    if let Some(path) = out {
        let mut csv = String::new();
        if cli.header {
            let n = leaves.len();
            let names: Vec<String> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| format!("{}|{}", leaves[i], leaves[j]))
                .collect();
            csv.push_str(&names.join(","));
            csv.push('\n');
        }
        for v in &vectors {
            csv.push_str(&v.iter().map(|x| sig12(*x)).collect::<Vec<_>>().join(","));
            csv.push('\n');
        }
        io::write_text(path, &csv)?;
    }
    Ok(Output::new(
        json!({ "leaves": leaves, "vectors": vectors }),
        json!({ "n_trees": maps.len() }),
    ))
}

fn leaf_names(len: usize, leaves: Option<&str>) -> CliResult<Vec<String>> {
    let n = leaves_for_len(len).ok_or_else(|| {
        CliError::new(
            DIMENSION,
            format!("{len} values is not the number of pairs of any leaf set"),
        )
    })?;
    match leaves {
        None => Ok(default_leaf_names(n)),
        Some(text) => {
            let names: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
            if names.len() != n {
                return Err(CliError::new(
                    DIMENSION,
                    format!("{} leaf names for {n} leaves", names.len()),
                ));
            }
            Ok(names)
        }
    }
}

fn ultra2newick(
    cli: &Cli,
    input: &Path,
    leaves: Option<&str>,
    out: Option<&Path>,
) -> CliResult<Output> {
    let rows = io::read_rows(input, cli.header)?;
    let names = leaf_names(rows[0].len(), leaves)?;
    let mut lines = Vec::with_capacity(rows.len());
    for (k, row) in rows.into_iter().enumerate() {
        let u = DissimilarityMap::new(names.clone(), row)?;
        let tree = ultrametric_to_tree(&u, cli.tol.max(1e-12))
            .map_err(|e| CliError::new(NOT_ULTRAMETRIC, format!("row {}: {e}", k + 1)))?;
        lines.push(serialize_newick(&tree));
    }
    if let Some(path) = out {
        io::write_text(path, &(lines.join("\n") + "\n"))?;
    }
    Ok(Output::new(
        json!({ "newick": lines }),
        json!({ "n_trees": lines.len() }),
    ))
}

fn tree_check(cli: &Cli, input: &Path) -> CliResult<Output> {
    let text = io::read_text(input)?;
    let is_newick = text.trim_start().starts_with('(');
    let (maps, source) = if is_newick {
        (same_leaves(&io::read_newick(input)?)?, "newick")
    } else {
        let rows = io::read_rows(input, cli.header)?;
        let names = leaf_names(rows[0].len(), None)?;
        let maps = rows
            .into_iter()
            .map(|r| DissimilarityMap::new(names.clone(), r))
            .collect::<tropstat::Result<Vec<_>>>()?;
        (maps, "csv")
    };
    let mut verdicts = Vec::with_capacity(maps.len());
    let mut topologies = std::collections::BTreeSet::new();
    for m in &maps {
        let ok = three_point_check(m.values(), cli.tol)?;
        if ok {
            topologies.insert(topology_id(&ultrametric_to_tree(m, cli.tol.max(1e-12))?));
        }
        verdicts.push(ok);
    }
    let result = json!({
        "ultrametric": verdicts,
        "all_ultrametric": verdicts.iter().all(|&v| v),
        "distinct_topologies": topologies.len(),
    });
    Ok(Output::new(
        result,
        json!({ "source": source, "n_leaves": maps[0].n_leaves(), "n": maps.len() }),
    ))
}

fn simulate(
    n_leaves: usize,
    height: f64,
    count: usize,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<Output> {
    let cfg = SimConfig {
        n_leaves,
        height,
        seed,
        count,
    };
    let trees = simulate_equidistant(&cfg)?;
    let topologies: std::collections::BTreeSet<String> = trees.iter().map(topology_id).collect();
    let lines: Vec<String> = trees.iter().map(serialize_newick).collect();
    let mut result = json!({
        "n_leaves": n_leaves,
        "height": height,
        "count": count,
        "distinct_topologies": topologies.len(),
    });
    match out {
        Some(path) => io::write_text(path, &(lines.join("\n") + "\n"))?,
        None => result["newick"] = json!(lines),
    }
    Ok(Output::new(
        result,
        json!({ "generator": "uniform merge times, uniform pair choice" }),
    ))
}
