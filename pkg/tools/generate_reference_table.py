"""Regenerate the committed parahydrogen reference table from CoolProp.

Development-only: CoolProp is not a runtime dependency. The package reads
``src/lh2airport/h2props/data/parahydrogen_reference.csv`` and never imports
CoolProp.

    python tools/generate_reference_table.py
"""
from pathlib import Path

import numpy as np
import CoolProp
import CoolProp.CoolProp as CP

FLUID = "ParaHydrogen"
OUT = Path(__file__).resolve().parents[1] / "src/lh2airport/h2props/data/parahydrogen_reference.csv"


def main():
    temps = np.round(np.arange(18.0, 30.0001, 0.2), 4)
    rows = []
    for T in temps:
        p = CP.PropsSI("P", "T", T, "Q", 0, FLUID)
        rows.append((
            T,
            p,
            CP.PropsSI("D", "T", T, "Q", 0, FLUID),
            CP.PropsSI("D", "T", T, "Q", 1, FLUID),
            CP.PropsSI("H", "T", T, "Q", 0, FLUID),
            CP.PropsSI("H", "T", T, "Q", 1, FLUID),
            CP.PropsSI("C", "T", T, "Q", 0, FLUID),
            CP.PropsSI("V", "T", T, "Q", 0, FLUID),
            CP.PropsSI("isothermal_compressibility", "T", T, "Q", 0, FLUID),
        ))
    header = "T_K,p_sat_Pa,rho_l_kg_m3,rho_v_kg_m3,h_l_J_kg,h_v_J_kg,cp_l_J_kgK,mu_l_Pa_s,kappa_l_1_Pa"
    with open(OUT, "w") as fh:
        fh.write(f"# saturated parahydrogen, CoolProp {CoolProp.__version__} ({FLUID})\n")
        fh.write(header + "\n")
        for r in rows:
            fh.write(",".join(f"{v:.10g}" for v in r) + "\n")
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
