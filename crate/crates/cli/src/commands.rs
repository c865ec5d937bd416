use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use mdpd::{
    distance_matrix, euclidean_field, evaluate, geodesic_field, mdrg_distance,
    refine_for_quantization, DistanceMatrix, Mdpd, MultiField, Pipeline, QuantizationSpec,
    SimplicialMesh,
};
use rayon::prelude::*;

use crate::config::{build_spec, parse_list, parse_ranges, resolve_order};
use crate::error::{CliError, CliResult};
use crate::input::{load_object, read_manifest};
use crate::{Quantization, Which};

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.write_all(b"\n"))
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> CliResult<T> + Send,
) -> CliResult<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(f)
}

pub fn fields(mesh: &Path, which: Which, out: &Path) -> CliResult<()> {
    let m = SimplicialMesh::load_off(mesh)?;
    let mut todo = Vec::new();
    if which != Which::Euclidean {
        todo.push(("geodesic", geodesic_field(&m)?));
    }
    if which != Which::Geodesic {
        todo.push(("euclidean", euclidean_field(&m)?));
    }
    for (name, field) in todo {
        let path = out.join(format!("{name}.csv"));
        let mut w = create(&path)?;
        field.write_csv(&mut w)?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn prepare(
    mf: &MultiField,
    spec: &QuantizationSpec,
    order: &[usize],
    refine: bool,
) -> CliResult<MultiField> {
    let mf = mf.reordered(order)?;
    Ok(if refine {
        refine_for_quantization(&mf, spec)?
    } else {
        mf
    })
}

pub fn pipeline(
    input: &Path,
    quant: &Quantization,
    order: &[usize],
    members: bool,
    out: &Path,
) -> CliResult<()> {
    let mf = load_object(input, &quant.fields)?;
    let order = resolve_order(order, mf.field_count())?;
    let levels = parse_list("levels", &quant.levels)?;
    let spec = build_spec(
        std::slice::from_ref(&mf),
        &levels,
        &parse_ranges(&quant.range)?,
        &order,
    )?;
    let mf = prepare(&mf, &spec, &order, quant.refine)?;
    let p = with_jobs(quant.jobs, || Ok(Pipeline::run(&mf, &spec, quant.epsilon)?))?;
    write_text(&out.join("jcn.json"), &p.jcn.to_json(members)?)?;
    write_text(&out.join("mdrg.json"), &p.mdrg.to_json()?)?;
    let mdpd = p.mdpd()?;
    write_text(&out.join("mdpd.json"), &mdpd.to_json()?)?;
    log::info!(
        "{} joint contours, {} MDPD points",
        p.jcn.node_count(),
        mdpd.len()
    );
    Ok(())
}

fn read_mdpd(path: &Path) -> CliResult<Mdpd> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(Mdpd::from_json(&text)?)
}

pub fn dist(a: &Path, b: &Path, q: f64, transcript: Option<&Path>) -> CliResult<()> {
    let (f, g) = (read_mdpd(a)?, read_mdpd(b)?);
    let d = mdrg_distance(&f, &g, q)?;
    println!("{}", d.value);
    if let Some(path) = transcript {
        let json = serde_json::to_string_pretty(&d).map_err(|e| CliError::Input(e.to_string()))?;
        write_text(path, &json)?;
    }
    Ok(())
}

pub fn matrix(
    manifest: &Path,
    quant: &Quantization,
    orders: &[String],
    q: f64,
    out: &Path,
) -> CliResult<()> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(CliError::Config(format!("--q must be positive, got {q}")));
    }
    let entries = read_manifest(manifest)?;
    let levels = parse_list("levels", &quant.levels)?;
    let ranges = parse_ranges(&quant.range)?;
    let ids: Vec<String> = entries.iter().map(|e| e.id.clone()).collect();

    let result = with_jobs(quant.jobs, || {
        let objects = entries
            .par_iter()
            .map(|e| {
                load_object(&e.path, &quant.fields)
                    .map_err(|err| CliError::Input(format!("{}: {err}", e.id)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let fields = objects[0].field_count();
        if let Some(e) = entries
            .iter()
            .zip(&objects)
            .find(|(_, o)| o.field_count() != fields)
        {
            return Err(CliError::Input(format!(
                "{} has {} fields, expected {fields}",
                e.0.id,
                e.1.field_count()
            )));
        }
        let orders = if orders.is_empty() {
            vec![resolve_order(&[], fields)?]
        } else {
            orders
                .iter()
                .map(|o| resolve_order(&parse_list("order", o)?, fields))
                .collect::<CliResult<Vec<_>>>()?
        };
        let mut matrices = Vec::new();
        for order in &orders {
            let spec = build_spec(&objects, &levels, &ranges, order)?;
            let mdpds = objects
                .par_iter()
                .zip(&entries)
                .map(|(mf, e)| {
                    let mf = prepare(mf, &spec, order, quant.refine)?;
                    let p =
                        Pipeline::run(&mf, &spec, quant.epsilon).map_err(|err| tag(&e.id, err))?;
                    p.mdpd().map_err(|err| tag(&e.id, err))
                })
                .collect::<CliResult<Vec<_>>>()?;
            log::info!("order {order:?}: {} MDPDs built", mdpds.len());
            matrices.push(distance_matrix(ids.clone(), &mdpds, q)?);
        }
        Ok(DistanceMatrix::mean(&matrices)?)
    })?;

    let mut w = create(out)?;
    result.write_csv(&mut w)?;
    w.flush().map_err(|e| CliError::io(out, e))?;
    Ok(())
}

fn tag(id: &str, err: mdpd::Error) -> CliError {
    match CliError::from(err) {
        CliError::Input(m) => CliError::Input(format!("{id}: {m}")),
        CliError::Config(m) => CliError::Config(format!("{id}: {m}")),
    }
}

fn read_matrix(path: &Path) -> CliResult<DistanceMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(DistanceMatrix::read_csv(file)?)
}

pub fn eval(matrix: &Path, manifest: &Path, e_k: usize, out: Option<&Path>) -> CliResult<()> {
    if e_k == 0 {
        return Err(CliError::Config("--e-k must be at least 1".into()));
    }
    let m = read_matrix(matrix)?;
    let entries = read_manifest(manifest)?;
    let labels = m
        .ids
        .iter()
        .map(|id| {
            entries
                .iter()
                .find(|e| &e.id == id)
                .map(|e| e.label.clone())
                .ok_or_else(|| {
                    CliError::Input(format!("no label for `{id}` in {}", manifest.display()))
                })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let scores = evaluate(&m, &labels, e_k)?;
    let json = serde_json::to_string_pretty(&scores).map_err(|e| CliError::Input(e.to_string()))?;
    match out {
        Some(path) => write_text(path, &json),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

pub fn heatmap(matrix: &Path, out: &Path) -> CliResult<()> {
    let m = read_matrix(matrix)?;
    for (ext, gray) in [("pgm", true), ("ppm", false)] {
        let path = out.with_extension(ext);
        let mut w = create(&path)?;
        let r = if gray {
            m.write_pgm(&mut w)
        } else {
            m.write_ppm(&mut w)
        };
        r.and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path, e))?;
        println!("{}", path.display());
    }
    Ok(())
}
