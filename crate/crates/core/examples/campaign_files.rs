//! Runs a JSON campaign the way the `corrgsa run` command does and lists the
//! files it produced.
//!
//! ```text
//! cargo run --example campaign_files -- [config.json] [out_dir]
//! ```

use std::path::PathBuf;

use corrgsa::campaign::{cmd_run, coffee_cup_config, Campaign, CampaignConfig};

fn main() -> corrgsa::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = match args.next() {
        Some(path) => CampaignConfig::load(path.as_ref())?,
        None => coffee_cup_config(Some(0.4)),
    };
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("corrgsa-campaign"));
    println!("{}", serde_json::to_string_pretty(&config)?);
    let campaign = Campaign::new(config)?;
    for f in cmd_run(&campaign, &out)? {
        let size = std::fs::metadata(&f).map(|m| m.len()).unwrap_or(0);
        println!("{:>9} bytes  {}", size, f.display());
    }
    Ok(())
}
