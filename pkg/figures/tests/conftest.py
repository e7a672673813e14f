import subprocess
import sys

import pytest

SWEEP_ARGS = [
    "sweep",
    "--delta-range", "-12.2474487139", "12.2474487139", "3",
    "--eta-range", "0.1", "2.5", "4",
    "--g", "10", "--kappa", "0.5", "--nmax", "12",
    "--observables", "nbar,Smin,thetaS,R",
]

POINT_ARGS = ["--delta", "0", "--eta", "0.5", "--g", "10", "--kappa", "0.5", "--nmax", "20"]


def run_cli(*args: str) -> None:
    cmd = [sys.executable, "-m", "hyperrad.cli", *args]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, f"{' '.join(cmd)} failed:\n{proc.stderr}"


@pytest.fixture(scope="session")
def cli_outputs(tmp_path_factory):
    """Real input files produced through the simulator's command line."""
    root = tmp_path_factory.mktemp("cli_outputs")
    run_cli(*SWEEP_ARGS, "--out", str(root))
    run_cli("wigner", *POINT_ARGS, "--xmax", "4", "--points", "41",
            "--out", str(root / "wigner_acc.csv"))
    run_cli("klyshko", *POINT_ARGS, "--out", str(root / "klyshko_acc.csv"))
    return {
        "sweep": root / "sweep.csv",
        "wigner": root / "wigner_acc.csv",
        "klyshko": root / "klyshko_acc.csv",
        "dir": root,
    }
