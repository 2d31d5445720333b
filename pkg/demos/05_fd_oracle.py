# %% [markdown]
# # A second opinion from finite differences
#
# The oscillator-basis pipeline uses a lot of bespoke machinery: Hermite
# recurrences, parity-folded quadrature and the analytic x^2 ladder.  A plain
# 3-point finite-difference Hamiltonian on [-L, L] shares none of it, apart
# from the eigensolver.  When both give the same levels, the assembly code is
# probably right.

# %%
import numpy as np

from ptmdm.analysis import Tolerances, spectrum_report
from ptmdm.fd import GridSpec, fd_levels, oracle_compare
from ptmdm.potentials import ExpPT, Harmonic

# %% [markdown]
# ## The stencil is second order
#
# The ground-state error of the unit oscillator drops fourfold each time the
# grid spacing halves.

# %%
prev = None
for points in (100, 200, 400, 800):
    err = abs(fd_levels(Harmonic(1.0), GridSpec(12.0, points))[0] - 1.0)
    ratio = "" if prev is None else f"  ratio {prev / err:.3f}"
    print(f"points={points:4d}  error={err:.3e}{ratio}")
    prev = err

# %% [markdown]
# ## Comparing with the basis expansion
#
# A 1500-point grid keeps this quick.  The oracle tests use 3000 points.

# %%
report = spectrum_report(ExpPT(), 400, 500, Tolerances(max_energy=12.0))
for m in oracle_compare(ExpPT(), report, GridSpec(12.0, 1500)):
    print(f"basis {m.energy_mdm:10.6f}   grid {m.energy_fd:10.6f}   gap {m.gap:.1e}")
print("expected stencil error at E~10 for h =", np.round(GridSpec(12.0, 1500).spacing, 4),
      "is of order 1e-3")
