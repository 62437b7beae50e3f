"""Fixtures that produce real harness artifacts through the primary CLI.

The figure pipeline's only contract with the simulator is the CSV schema
and the `undulant` command line, so the fixtures shell out rather than
import the simulation package.
"""

import json
import subprocess

import pytest

SYMMETRIZATION = {
    "scenario": "symmetrization",
    "grid": {"n_x": 32, "n_theta": 16, "length": 40.0},
    "stepper": {"dt": 0.02, "solver": "theta_modes"},
    "t_final": 2.0,
    "perturbation": {"mode": 1, "amplitude": 0.05, "component": 1},
}

COMPARISON = {
    "scenario": "effective_comparison",
    "grid": {"n_x": 32, "n_theta": 16, "length": 40.0},
    "stepper": {"dt": 0.02, "solver": "theta_modes"},
    "t_final": 1.0,
    "compare_time": 1.0,
    "amplitudes": [0.05, 0.025, 0.0125],
    "probe_stride": 5,
}

PULSE = {
    "scenario": "pulse_speed",
    "params": {"alpha": 0.25, "eps": 1e-06, "gamma": 1e-06},
    "profile": {"kind": "constant", "base_radius": 1.0},
    "grid": {"n_x": 512, "n_theta": 8, "length": 100.0},
    "stepper": {"dt": 0.1, "scheme": "imex_cn", "solver": "theta_modes"},
    "t_final": 60.0,
    "x_front": 20.0,
    "probe_stride": 10,
}


def run_scenario(raw, outdir):
    cfg = dict(raw, output_dir=str(outdir))
    cfg_path = outdir.parent / f"{raw['scenario']}_cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    proc = subprocess.run(
        ["undulant", "run", str(cfg_path)], capture_output=True, text=True,
    )
    assert proc.returncode in (0, 1), proc.stderr
    return outdir


@pytest.fixture(scope="session")
def symmetrization_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("symmetrization")
    return run_scenario(SYMMETRIZATION, base / "out")


@pytest.fixture(scope="session")
def comparison_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("comparison")
    return run_scenario(COMPARISON, base / "out")


@pytest.fixture(scope="session")
def pulse_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("pulse")
    return run_scenario(PULSE, base / "out")
