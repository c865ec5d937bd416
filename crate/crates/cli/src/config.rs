//! Parsing of the quantization, ordering and range flags.

use mdpd::{FieldQuantization, MultiField, QuantizationSpec};

use crate::error::{CliError, CliResult};

/// How field ranges are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum RangePolicy {
    /// Joint min/max over every object being processed.
    Corpus,
    /// One `(min, max)` per input field, by input index.
    Explicit(Vec<(usize, f64, f64)>),
}

pub fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--{flag}: invalid entry `{t}`")))
        })
        .collect()
}

pub fn parse_ranges(entries: &[String]) -> CliResult<RangePolicy> {
    if entries.is_empty() || entries.iter().all(|e| e == "corpus") {
        return Ok(RangePolicy::Corpus);
    }
    let bad = |e: &str| {
        CliError::Config(format!(
            "--range: expected `f<i>:<min>:<max>` or `corpus`, got `{e}`"
        ))
    };
    let mut out = Vec::new();
    for e in entries {
        let parts: Vec<&str> = e.split(':').collect();
        let [name, lo, hi] = parts[..] else {
            return Err(bad(e));
        };
        let index = name
            .strip_prefix('f')
            .and_then(|i| i.parse::<usize>().ok())
            .ok_or_else(|| bad(e))?;
        let lo: f64 = lo.parse().map_err(|_| bad(e))?;
        let hi: f64 = hi.parse().map_err(|_| bad(e))?;
        out.push((index, lo, hi));
    }
    Ok(RangePolicy::Explicit(out))
}

/// Levels given once apply to every field.
pub fn expand_levels(levels: &[u32], fields: usize) -> CliResult<Vec<u32>> {
    match levels.len() {
        1 => Ok(vec![levels[0]; fields]),
        n if n == fields => Ok(levels.to_vec()),
        n => Err(CliError::Config(format!(
            "--levels has {n} entries for {fields} fields"
        ))),
    }
}

/// Identity when `order` is empty.
pub fn resolve_order(order: &[usize], fields: usize) -> CliResult<Vec<usize>> {
    if order.is_empty() {
        return Ok((0..fields).collect());
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..fields).collect::<Vec<_>>() {
        return Err(CliError::Config(format!(
            "--order {order:?} is not a permutation of 0..{fields}"
        )));
    }
    Ok(order.to_vec())
}

/// Quantization for multi-fields already in input order; `order` is applied afterwards by
/// the caller, so the returned spec is permuted to match.
pub fn build_spec(
    objects: &[MultiField],
    levels: &[u32],
    ranges: &RangePolicy,
    order: &[usize],
) -> CliResult<QuantizationSpec> {
    let fields = objects.first().map_or(0, MultiField::field_count);
    let levels = expand_levels(levels, fields)?;
    let base = match ranges {
        RangePolicy::Corpus => QuantizationSpec::from_corpus(objects, &levels)?,
        RangePolicy::Explicit(list) => {
            let mut slots: Vec<Option<(f64, f64)>> = vec![None; fields];
            for &(i, lo, hi) in list {
                let slot = slots.get_mut(i).ok_or_else(|| {
                    CliError::Config(format!("--range names f{i} but there are {fields} fields"))
                })?;
                *slot = Some((lo, hi));
            }
            let qs = slots
                .into_iter()
                .zip(&levels)
                .enumerate()
                .map(|(i, (r, &q))| {
                    let (lo, hi) =
                        r.ok_or_else(|| CliError::Config(format!("--range is missing f{i}")))?;
                    Ok(FieldQuantization::new(lo, hi, q)?)
                })
                .collect::<CliResult<Vec<_>>>()?;
            QuantizationSpec::new(qs)?
        }
    };
    Ok(QuantizationSpec::new(
        order.iter().map(|&i| base.fields[i]).collect(),
    )?)
}
