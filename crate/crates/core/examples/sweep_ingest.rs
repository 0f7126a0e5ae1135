//! Parse an S21 sweep, keep one band and turn it into power samples.

use std::io::Cursor;

use mixchan::ingest::{filter_band, parse_sweep, to_power_samples, SweepFormat};

fn main() -> mixchan::Result<()> {
    let mut text = String::from("# distance_m=0.3\n# label=demo\nfreq_hz,s21_re,s21_im\n");
    for i in 0..200 {
        let f = 230e9 + i as f64 * 500e6;
        let a = 1e-3 * (1.0 + 0.3 * (i as f64 * 0.37).sin());
        text.push_str(&format!("{f:e},{:e},{:e}\n", a * 0.8, -a * 0.6));
    }

    let ds = parse_sweep(Cursor::new(text), SweepFormat::Native)?;
    println!("{} records, label {:?}, distance {:?}", ds.len(), ds.label(), ds.distance_m());
    let band = filter_band(&ds, 240e9, 300e9)?;
    let power = to_power_samples(&band)?;
    println!("{} samples in 240–300 GHz", power.values.len());
    let mean = power.values.iter().sum::<f64>() / power.values.len() as f64;
    println!("mean |S21|² power {mean:.4e}");
    Ok(())
}
