//! End-to-end likelihood ratio for a rare type match: ingest a profile
//! database, append the suspect as a new type, and evaluate the ratio
//! under both a diffuse hyperprior and a point one.

use std::io::Write;

use raretype::inference::{lr_bayes, Hyperprior};
use raretype::partition::{ingest_database, IngestOptions};
use raretype::pyp::{crp_assignments, HyperParams};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    // Fabricate a database file: 2000 profiles over two loci drawn from a
    // synthetic population.
    let h = HyperParams::new(0.5, 50.0)?;
    let types = crp_assignments(2_000, &h, Seed(5))?;
    let mut file = tempfile::NamedTempFile::new().expect("tempfile");
    writeln!(file, "id\tlocusA\tlocusB").expect("write");
    for (i, t) in types.iter().enumerate() {
        // Two-locus rendering of the type id; the split is irrelevant to
        // the model, which only sees key equality.
        writeln!(file, "s{i}\tA{}\tB{}", t / 7, t % 7).expect("write");
    }

    let opts = IngestOptions {
        loci: vec!["locusA".into(), "locusB".into()],
        ..IngestOptions::default()
    };
    let (records, partition) = ingest_database(file.path(), &opts)?;
    println!(
        "ingested {} rows, {} distinct profiles, {} singletons",
        records.len(),
        partition.num_blocks(),
        partition.singleton_count()
    );

    let p_plus = partition.extend_with_suspect();

    let diffuse = lr_bayes(&p_plus, &Hyperprior::default_diffuse())?;
    println!("\ndiffuse hyperprior:");
    println!("{}", serde_json::to_string_pretty(&diffuse)?);

    let point = lr_bayes(&p_plus, &Hyperprior::point_mass(0.5, 216.0)?)?;
    println!("\npoint hyperprior at (0.5, 216): lr = {}", point.lr_bayes);
    println!(
        "closed form (n + 1 + theta) / (1 - alpha) = {}",
        (diffuse.n as f64 + 217.0) / 0.5
    );
    Ok(())
}
