"""
Uplink energy efficiency: multi-directional vs screen transmitter
=================================================================

Sweeps transmit SNR for the uplink, averaging over a small position and
orientation grid, and reports spectral efficiency against energy
efficiency for the two handset designs.
"""

from lifisim import emit, run_uplink_eval, scenario_from_dict

base = dict(
    direction="uplink",
    scheme="asm",
    activity="sitting",
    grid_step=1.5,
    n_directions=4,
    orientations_per_point=10,
    uplink_snr_start_db=135.0,
    uplink_snr_stop_db=175.0,
    uplink_snr_step_db=5.0,
    mi_samples=0,
    seed=5,
)

for device, label in (("mdr", "multi-directional"), ("sr", "screen")):
    sc = scenario_from_dict(dict(base, device=device))
    ber_res, ee_res = run_uplink_eval(sc)
    emit(ber_res, "out", f"uplink_ber_{device}")
    paths = emit(ee_res, "out", f"uplink_ee_{device}", plots=True)
    print(f"{label} transmitter: wrote " + ", ".join(paths))
    print(f"{'config':>18} {'rate b/s/Hz':>12} {'bits/Joule':>12}")
    for row in ee_res.rows:
        print(f"{row['config']:>18} {row['eta_rse']:12.4f} "
              f"{row['eta_ee']:12.4g}")
    print()
