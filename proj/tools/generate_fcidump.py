#!/usr/bin/env python3
"""Regenerate the FCIDUMP fixtures under tests/data with PySCF.

Not needed for building or testing; the generated files are checked in.

    python3 tools/generate_fcidump.py tests/data
"""
import sys
from pathlib import Path

from pyscf import fci, gto, mcscf, scf
from pyscf.tools import fcidump

GEOMETRIES = Path(__file__).resolve().parent.parent / "tests" / "data" / "geometries"


def read_xyz(name: str) -> str:
    lines = (GEOMETRIES / name).read_text().splitlines()
    return "\n".join(lines[2:])


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)

    mol = gto.M(atom=read_xyz("h8.xyz"), basis="sto-3g", unit="Angstrom")
    mf = scf.RHF(mol).run()
    fcidump.from_scf(mf, str(out / "h8_sto3g.fcidump"), tol=1e-12)
    e_fci = fci.FCI(mf).kernel()[0]
    print(f"H8 FCI = {e_fci:.10f}")

    # 8 electrons in 8 orbitals around the HOMO/LUMO gap: 4 occupied + 4 virtual.
    mol = gto.M(atom=read_xyz("pyridine.xyz"), basis="sto-3g", unit="Angstrom")
    mf = scf.RHF(mol).run()
    mc = mcscf.CASCI(mf, 8, 8)
    e_cas = mc.kernel()[0]
    fcidump.from_mcscf(mc, str(out / "pyridine_cas8_8_sto3g.fcidump"), tol=1e-12)
    print(f"Pyridine CASCI(8,8) = {e_cas:.10f}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data"))
