//! The data reduction pipeline: a database of profiles becomes a partition
//! of row indexes, the suspect joins as a new singleton, and the matching
//! trace joins the suspect's block.

use raretype::partition::SetPartition;

fn main() -> raretype::Result<()> {
    // Ten individuals, six distinct profiles (values are profile keys; only
    // equality matters).
    let database = ["h3", "h1", "h3", "h1", "h2", "h2", "h6", "h9", "h4", "h1"];
    let db_partition = SetPartition::from_labels(&database)?;
    println!(
        "database partition: {}",
        serde_json::to_string(&db_partition)?
    );
    println!(
        "blocks: {}, singletons: {}",
        db_partition.num_blocks(),
        db_partition.singleton_count()
    );

    // The suspect's profile matches the crime stain but is new to the
    // database: a fresh singleton block.
    let with_suspect = db_partition.extend_with_suspect();
    println!("\nwith suspect: {}", serde_json::to_string(&with_suspect)?);

    // The trace then joins the suspect's block.
    let with_trace = with_suspect.extend_with_trace()?;
    println!("with trace:   {}", serde_json::to_string(&with_trace)?);

    // Block sizes are all the model ever sees.
    let compact = with_suspect.to_integer_partition();
    println!("\nblock-size classes of the suspect-extended partition:");
    println!("  {}", serde_json::to_string(&compact)?);
    println!("  (sizes a, multiplicities r; n = {})", compact.n());

    // Joining the trace onto a non-singleton suspect is refused.
    let not_rare = SetPartition::from_labels(&["x", "y", "x"])?;
    println!(
        "\nnon-rare-type trace join: {:?}",
        not_rare.extend_with_trace().err()
    );
    Ok(())
}
