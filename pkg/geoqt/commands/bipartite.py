# SPDX-License-Identifier: BUSL-1.1
"""geoqt bipartite — the geometric state a subsystem inherits from an entangled pure state."""

import numpy as np

from geoqt.commands.common import emit, load_run, make_result
from geoqt.statespace import (
    bipartite_geometric_state,
    complex_to_pairs,
    ensemble_density_matrix,
    ensemble_entropy,
    ensemble_to_dicts,
    partial_trace_b,
)


def cmd_bipartite(args):
    cfg = load_run(args, "bipartite")
    spec = cfg.bipartite
    psi = spec.amplitudes(np.random.default_rng(cfg.sampler.seed))
    ensemble = bipartite_geometric_state(psi)
    rho = ensemble_density_matrix(ensemble)
    reconstruction = float(np.abs(rho - partial_trace_b(psi)).max())
    merged = ensemble.collapse()

    columns = ["index", "weight"] + [f"{part}{k}" for k in range(spec.dim_a) for part in ("re", "im")]
    rows = []
    for index, (weight, state) in enumerate(ensemble):
        cells = [index, weight]
        for z in state.amplitudes:
            cells.extend([float(z.real), float(z.imag)])
        rows.append(cells)

    entropy = ensemble_entropy(ensemble)
    data = {
        "psi": complex_to_pairs(psi),
        "ensemble": ensemble_to_dicts(ensemble),
        "rho_a": complex_to_pairs(rho),
        "entropy": entropy,
        "reconstruction_error": reconstruction,
        "distinct_points": len(merged),
    }
    summary = {
        "d_A x d_B": f"{spec.dim_a} x {spec.dim_b}",
        "entries": len(ensemble),
        "distinct points": len(merged),
        "entanglement entropy": entropy,
        "max |rho - Tr_B|": reconstruction,
    }
    emit(make_result("bipartite", cfg, columns, rows, data=data, summary=summary), cfg, args)
