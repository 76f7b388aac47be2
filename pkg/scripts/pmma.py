"""Normalised parameters of the PMMA data set, tensile and shear viscosity readings."""
from dataclasses import replace

from czcrack.config import PMMA, normalize_physical

for kind in ("tensile", "shear"):
    n = normalize_physical(replace(PMMA, viscosity_kind=kind))
    m = n.material
    print(f"{kind:8s} m={m.creep.m:.4f} theta={m.creep.theta:.5f} delta_c={m.delta_c:.5f} "
          f"t_inf={n.t_inf_hat:.4f} {PMMA.time_unit} mu0={n.mu0:.6g} kappa={n.kappa:.4f}")
