//! Saves a model and a traced series, then reads both back.

use msetarx::io::{load_model, read_series, save_model, write_series, SeriesData};
use msetarx::{make_dgp, simulate_msetarx, Dgp, SimulationConfig};

fn main() -> msetarx::Result<()> {
    let dir = std::env::temp_dir().join(format!("msetarx-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let spec = make_dgp(Dgp::Dgp2);
    save_model(dir.join("model.json"), &spec)?;
    let loaded = load_model(dir.join("model.json"))?;
    println!("model round-trip identical: {}", loaded == spec);

    let sim = simulate_msetarx(&spec, &SimulationConfig::new(100, 5))?;
    let data = SeriesData::from_simulation(&sim, &spec, true);
    write_series(dir.join("series.csv"), &data)?;
    let back = read_series(dir.join("series.csv"))?;
    println!("series round-trip identical: {}", back == data);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
