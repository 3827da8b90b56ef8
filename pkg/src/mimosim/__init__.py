"""Seedable link-level simulator for an indoor multi-cell massive MIMO downlink.

The package is organized as a pipeline:

* :mod:`mimosim.geometry`   -- floor plan, BS deployments, arrays, UE drops
* :mod:`mimosim.channel`    -- pathloss/shadowing/fading channel tensors
* :mod:`mimosim.modulation` -- QAM mutual information / MMSE tables
* :mod:`mimosim.powalloc`   -- water-filling and finite-alphabet power allocation
* :mod:`mimosim.precoding`  -- multi-cell zero-forcing precoders and MRT
* :mod:`mimosim.capacity`   -- broadcast-channel sum-capacity upper bound
* :mod:`mimosim.metrics`    -- SINR, spectral efficiency, fairness statistics
* :mod:`mimosim.harness`    -- experiment sweeps, CSV outputs, reproducibility
* :mod:`mimosim.cli`        -- command-line entry point
"""

__version__ = "0.1.0"
