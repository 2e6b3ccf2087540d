# SPDX-License-Identifier: BUSL-1.1
"""geoqt sample — Monte Carlo estimates under the Fubini-Study measure."""

import logging
import math

from geoqt.commands.common import emit, load_run, make_result, sampler_config
from geoqt.output import write_table
from geoqt.sampling import (
    McEstimate,
    mc_partition_estimate,
    sample_canonical,
    sample_canonical_weighted,
)
from geoqt.volumes import MeasureConvention

log = logging.getLogger(__name__)

SAMPLE_COLUMNS = ("quantity", "value", "std_error", "n", "acceptance_rate")


def _energy_estimate(sys, beta, cfg):
    """Mean energy of canonical samples, plus the batch for optional export."""
    if beta >= 0.0:
        batch = sample_canonical(sys, beta, cfg)
        h = batch.energies(sys)
        error = float(h.std(ddof=1) / math.sqrt(h.size)) if h.size > 1 else 0.0
        return McEstimate(float(h.mean()), error, int(h.size), batch.acceptance_rate), batch
    weighted = sample_canonical_weighted(sys, beta, cfg)
    h = weighted.batch.energies(sys)
    mean = float(weighted.weights @ h)
    var = float(weighted.weights @ (h - mean) ** 2)
    error = math.sqrt(var / weighted.effective_sample_size)
    return McEstimate(mean, error, len(weighted.batch)), weighted.batch


def _state_rows(batch):
    rows = []
    for index, row in enumerate(batch.amplitudes):
        cells = [index]
        for z in row:
            cells.extend([float(z.real), float(z.imag)])
        rows.append(cells)
    return rows


def cmd_sample(args):
    cfg = load_run(args, "sample")
    sys = cfg.system()
    beta = float(cfg.beta)
    convention = MeasureConvention.parse(cfg.convention)
    sampler = sampler_config(cfg)

    q = mc_partition_estimate(sys, beta, sampler, convention)
    u, batch = _energy_estimate(sys, beta, sampler)
    estimates = {"Q": q, "U": u}
    rows = [(name, e.value, e.std_error, e.n, e.acceptance_rate) for name, e in estimates.items()]

    states_path = getattr(args, "states", None)
    if states_path:
        columns = ["index"] + [f"{part}{k}" for k in range(sys.dimension) for part in ("re", "im")]
        write_table(states_path, columns, _state_rows(batch))
        log.info("wrote %d states to %s", len(batch), states_path)

    summary = {
        "dimension": sys.dimension,
        "beta": beta,
        "samples": sampler.n_samples,
        "Q": q.value,
        "Q std error": q.std_error,
        "U": u.value,
        "acceptance": u.acceptance_rate,
    }
    data = {name: e.as_dict() for name, e in estimates.items()}
    data["streams"] = sampler.n_streams
    emit(make_result("sample", cfg, SAMPLE_COLUMNS, rows, data=data, summary=summary), cfg, args)

