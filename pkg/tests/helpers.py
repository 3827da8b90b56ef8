"""Shared synthetic fixtures for unit tests: tiny deployments and tensors."""

import numpy as np

# One line per acceptance criterion, echoed in the terminal summary by
# conftest.pytest_terminal_summary.
ACCEPTANCE_LINES: list[str] = []

from mimosim.channel import ChannelTensor
from mimosim.geometry import BsSite, Deployment


def crandn(rng, *shape):
    """Unit-variance circularly symmetric complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def synth_deployment(antennas, budgets) -> Deployment:
    """A placeholder multi-site deployment with co-located point arrays."""
    sites = []
    for n, p in zip(antennas, budgets):
        sites.append(
            BsSite(
                position=np.array([0.0, 0.0, 3.0]),
                array_kind="rectangular-ceiling",
                num_antennas=int(n),
                power_budget=float(p),
                antenna_positions=np.zeros((int(n), 3)),
            )
        )
    return Deployment(
        name="synthetic", sites=tuple(sites), total_antennas=int(sum(antennas))
    )


def synth_tensor(coeffs, deployment) -> ChannelTensor:
    """Wrap raw coefficients in a ChannelTensor for the given deployment."""
    coeffs = np.asarray(coeffs, np.complex128)
    return ChannelTensor(
        coeffs=coeffs,
        site_slices=deployment.site_slices,
        subcarrier_freqs=2.1e9 + 15e3 * np.arange(coeffs.shape[2]),
        realization_index=0,
        seed="synthetic",
    )


def read_csv(path):
    """Parse a harness CSV into dict rows, skipping the manifest comment."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        if not line or line.startswith("#"):
            continue
        rows.append(dict(zip(header, line.split(","))))
    return header, rows


def eval_sinr(coeffs, precoder, noise_var):
    """Reference SINR evaluation on the true channel, plain loops."""
    num_ues, _, num_f = coeffs.shape
    out = np.zeros((num_ues, num_f))
    for f in range(num_f):
        cross = np.abs(coeffs[:, :, f].conj() @ precoder.w[:, :, f]) ** 2
        for k in range(num_ues):
            interference = cross[k].sum() - cross[k, k]
            out[k, f] = cross[k, k] / (noise_var + interference)
    return out
