//! Line-of-sight tap, log-distance received power and SNR.

use mixchan::channel::{
    db_to_linear, instantaneous_snr, linear_to_db, los_channel, path_loss_rx_power_db, LinkBudget,
};

fn main() -> mixchan::Result<()> {
    let cir = los_channel(0.2, 270e9, 1e-3)?;
    let tap = cir.taps()[0];
    println!("LoS tap: delay {:.4e} s, phase {:.4} rad", tap.delay, tap.phase);
    println!("narrowband gain {:.4e}", cir.narrowband_gain());

    let n0 = 4e-21; // roughly kT at room temperature, W/Hz
    // distance term only; losses at 1 m are folded into the transmit power
    for d in [1.0, 2.0, 4.0] {
        let budget = LinkBudget::new(-60.0, 2.0, -3.0, d)?;
        let p_dbm = path_loss_rx_power_db(&budget);
        let p_w = db_to_linear(p_dbm - 30.0);
        let snr = instantaneous_snr(p_w, 60e9, n0)?;
        println!("d = {d} m: P_rx {p_dbm:.2} dBm, SNR {:.1} dB", linear_to_db(snr));
    }
    Ok(())
}
