# SPDX-License-Identifier: BUSL-1.1
"""geoqt sweep / grid — qudit-gas predictions across beta and the (q, chi) density grid."""

from geoqt.commands.common import emit, load_run, make_result, sampler_config
from geoqt.quditgas import (
    MeasurementAxis,
    Method,
    canonical_density_grid,
    thermal_sweep,
)
from geoqt.volumes import MeasureConvention

SWEEP_COLUMNS = ("beta", "gibbs_mean", "gibbs_std", "geo_mean", "geo_std", "geo_std_error")


def _measured(cfg):
    """The axis projector when an axis is configured, the observable otherwise."""
    if cfg.axis is not None:
        axis = MeasurementAxis(cfg.axis.theta, cfg.axis.phi)
        return axis.projector(), {"theta": axis.theta, "phi": axis.phi}
    return cfg.observable_operator(), None


def cmd_sweep(args):
    cfg = load_run(args, "sweep")
    sys = cfg.system()
    obs, axis = _measured(cfg)
    method = Method.parse(cfg.method)
    sampler = sampler_config(cfg) if method is Method.MC else None
    result = thermal_sweep(sys, obs, cfg.beta_grid.betas(), method, sampler, getattr(args, "workers", None))

    rows = [tuple(row) for row in result.rows]
    extra = {
        "hamiltonian": sys.observable.to_pairs(),
        "observable": obs.to_pairs(),
        "axis": axis,
        "method": result.method,
    }
    summary = {
        "points": len(rows),
        "method": result.method,
        "max |geo - gibbs|": max(abs(r.geo_mean - r.gibbs_mean) for r in result.rows),
    }
    emit(make_result("sweep", cfg, SWEEP_COLUMNS, rows, data=result.as_dicts(), extra=extra, summary=summary),
         cfg, args)


def cmd_grid(args):
    cfg = load_run(args, "grid")
    sys = cfg.system()
    convention = MeasureConvention.parse(cfg.convention)
    grid = canonical_density_grid(sys, float(cfg.beta), cfg.grid.num_q, cfg.grid.num_chi, convention)

    rows = []
    for i, q in enumerate(grid.q):
        for j, chi in enumerate(grid.chi):
            rows.append((float(q), float(chi), float(grid.density[i, j])))
    extra = {
        "eigenvector_coords": [list(c) for c in grid.eigenvector_coords],
        "gibbs_weights": grid.gibbs_weights,
    }
    data = {
        "q": grid.q,
        "chi": grid.chi,
        "density": grid.density,
        "eigenvector_coords": extra["eigenvector_coords"],
        "gibbs_weights": grid.gibbs_weights,
    }
    summary = {
        "beta": float(cfg.beta),
        "grid": f"{len(grid.q)} x {len(grid.chi)}",
        "peak density": float(grid.density.max()),
    }
    emit(make_result("grid", cfg, ("q", "chi", "density"), rows, data=data, extra=extra, summary=summary),
         cfg, args)
