use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::{execute, Pipeline};
use super::config::PipelineConfig;
use super::report::Record;
use crate::cocycle::{coboundary_kernel, StepFunction, MAX_KERNEL_DEPTH};
use crate::error::Result;
use crate::evc::skew_edges;
use crate::group::Group;
use crate::odometer::{CylinderSet, ProductMeasure, Word};

/// Writes `word,depth,num,den` rows, one per cylinder of the set.
pub fn write_cylinder_csv<W: Write>(set: &CylinderSet, mu: &ProductMeasure, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "depth", "num", "den"])?;
    for x in set.iter() {
        let word = Word::new(x, set.depth);
        let m = mu.cylinder_measure(&word);
        w.write_record([word.to_string(), set.depth.to_string(), m.numer().to_string(), m.denom().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the skew graph of `Δf` seen on the kernel of depth `depth` at
/// level `m` as a `source,target` edge list.
pub fn write_skew_edges<G: Group, W: Write>(
    group: &G,
    f: &StepFunction<G::Elem>,
    depth: u32,
    m: u32,
    out: W,
) -> Result<()> {
    let kernel = coboundary_kernel(group, f, depth, m)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target"])?;
    for (a, b) in skew_edges(group, &kernel)? {
        w.write_record([a, b])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the recursion and writes its artifacts into `dir`: the terminal
/// function, the level sets of the terminal function as cylinder lists, the
/// connectivity ladder and, when small enough, the skew edge list of a
/// coarse truncation. Returns the written paths.
pub fn export_run(config: &PipelineConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let done = execute(config, Pipeline::Run)?;
    let mut written = Vec::new();

    let path = dir.join("function.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["word", "element"])?;
    for (word, v) in &done.terminal {
        w.write_record([word, v])?;
    }
    w.flush()?;
    written.push(path);

    let group = config.group.build()?;
    let mu = config.measure.build()?;
    crate::with_group!(&group, g => {
        let depth = done.terminal.first().map_or(0, |(w, _)| w.len() as u32);
        let mut text = String::from("word,element\n");
        for (word, v) in &done.terminal {
            text.push_str(&format!("{word},\"{v}\"\n"));
        }
        let f = StepFunction::read_csv(g, text.as_bytes())?;
        for (i, v) in f.values().iter().enumerate() {
            let path = dir.join(format!("level-set-{}.csv", i + 1));
            write_cylinder_csv(&f.level_set(v), &mu, std::fs::File::create(&path)?)?;
            written.push(path);
        }
        if g.order().is_some() {
            let d = depth.min(MAX_KERNEL_DEPTH).min(8);
            if f.depth <= d {
                let path = dir.join("skew-edges.csv");
                write_skew_edges(g, &f, d, d, std::fs::File::create(&path)?)?;
                written.push(path);
            }
        }
    });

    if let Some((ladder, control)) = done.report.connectivity() {
        let path = dir.join("ladder.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["level", "components", "control"])?;
        for (a, b) in ladder.iter().zip(control) {
            w.write_record([a.level.to_string(), a.components.to_string(), b.components.to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    let path = dir.join("report.jsonl");
    std::fs::write(&path, done.report.to_jsonl())?;
    written.push(path);
    if let Some(Record::Summary { error: Some(e), .. }) = done.report.records.last() {
        return Err(crate::error::Error::invalid(format!("run aborted: {e}")));
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    #[test]
    fn cylinder_rows_carry_exact_measures() {
        let mu = ProductMeasure::bernoulli(&crate::rational::q(1, 3)).unwrap();
        let set = CylinderSet::from_words(&[Word::parse("01").unwrap()]);
        let mut buf = Vec::new();
        write_cylinder_csv(&set, &mu, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "word,depth,num,den\n01,2,2,9\n");
    }

    #[test]
    fn edge_list_of_a_small_coboundary() {
        let g = FiniteGroup::cyclic(2);
        let f = StepFunction::from_fn(1, |x| (x & 1) as u16);
        let mut buf = Vec::new();
        write_skew_edges(&g, &f, 1, 1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // one pair of words, two group elements
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("0|0,1|1"));
    }
}
