"""Mapping the solved field back onto the physically evolving interval.

Computation happens on the fixed reference interval (0, l0); the
physical habitat is (0, rho(t) l0) and the two are related by the
relabeling x = rho(t) y.  This script runs a short simulation, emits the
field in both frames as CSV plus a gnuplot-ready block file, and prints
the breathing domain endpoint.

Artifacts are written to demo_output/evolving_frame/ (plus surface.svg
when matplotlib is importable).
"""

import os
from dataclasses import replace

from evodom.engine import Grid, OutputSpec, initial_condition, simulate
from evodom.experiments import (
    get_preset,
    reconstruct_physical,
    write_csv,
    write_gnuplot_blocks,
)

out_dir = os.path.join("demo_output", "evolving_frame")
os.makedirs(out_dir, exist_ok=True)

scenario = get_preset("4.1b")
scenario = replace(scenario,
                   grid=Grid.for_model(scenario.params, ny=63,
                                       steps_per_period=256))
grid = scenario.grid
v0 = initial_condition(scenario.v0_modes, grid, scenario.params.l0)
traj = simulate(scenario.params, scenario.rho, scenario.pulse, grid, v0, 6,
                output=OutputSpec(stride=32))
phys = reconstruct_physical(traj, scenario.rho)

print("breathing domain endpoint over the first period:")
for t, length in zip(phys.endpoint_times, phys.endpoint_lengths):
    if t > scenario.params.T:
        break
    print(f"  t = {t:5.3f}   l(t) = {length:.5f}")

write_csv(os.path.join(out_dir, "physical.csv"), ("t", "phase", "x", "u"),
          ((f.time, f.phase, float(x), float(u))
           for f in phys.frames for x, u in zip(f.x, f.u)))
write_gnuplot_blocks(os.path.join(out_dir, "field.dat"), phys.frames)
print(f"\nwrote {out_dir}/physical.csv and {out_dir}/field.dat")
print('plot with:  gnuplot -e \'splot "field.dat" u 1:2 w l\' (per-time blocks)')

try:
    from evodom.experiments import write_surface_svg

    write_surface_svg(os.path.join(out_dir, "surface.svg"), phys.frames,
                      scenario.name)
    print(f"wrote {out_dir}/surface.svg")
except ImportError:
    print("matplotlib not available; skipped the vector surface plot")
