//! Drive an experiment from its text config, as the `gluedwalk` binary
//! does, and check the manifest it leaves behind.

use glued_localization::experiment::{run, Experiment, ExperimentConfig, RunManifest};

fn main() -> glued_localization::Result<()> {
    let out = std::env::temp_dir().join("gluedwalk-example");
    let mut config = ExperimentConfig::new(Experiment::Hitting);
    config.merge_text("n = 10, 20, 30\ndelta = 0.2\nseeds = 5\nseed = 42\n")?;
    config.out = out.clone();
    config.overwrite = true;
    println!("config:\n{}", config.to_text());

    let manifest = run(&config)?;
    for f in &manifest.files {
        println!(
            "{:<22} {} bytes  sha256 {}",
            f.path,
            f.bytes,
            &f.sha256[..16]
        );
    }
    let stale = RunManifest::load(&out)?.verify(&out)?;
    println!(
        "checksums verified, {} stale; took {:.3} s",
        stale.len(),
        manifest.wall_clock_seconds
    );
    Ok(())
}
