# %% [markdown]
# # Even-dominant levels of x^2/4 + exp(-2i x|x|)
#
# Here the potential mixes parity, so no eigenvector is purely even or odd.
# Still, each converged level's eigenvector puts most of its weight on either
# the even or the odd oscillator functions.  The even-dominant ones are the
# levels usually tabulated as "even states".  The odd-dominant levels sit
# between them, and the listing reports them rather than dropping them
# silently.
#
# Sizes (400, 500) by default; pass `700 900` for the full run.

# %%
import sys

from ptmdm.analysis import Tolerances, spectrum_report
from ptmdm.potentials import ExpPT

n1, n2 = (int(a) for a in sys.argv[1:3]) if len(sys.argv) > 2 else (400, 500)
report = spectrum_report(ExpPT(), n1, n2, Tolerances(max_energy=12.0), parity=True)

# %%
print(f"{'n':>3} {'energy':>12} {'even weight':>12}  parity")
for lv in report.real_levels:
    print(f"{lv.quantum_number:>3} {lv.energy:12.6f} {lv.parity_weight:12.4f}  {lv.parity}")

# %% [markdown]
# The even-dominant subsequence is what gets compared with the reference
# digits.  Its last entry converges to 10.5142, not 10.5107.  The
# finite-difference oracle in `05_fd_oracle.py` gives the same value.

# %%
print("even-dominant:", [round(lv.energy, 4) for lv in report.even_levels()])
