# SPDX-License-Identifier: BUSL-1.1
"""geoqt firstlaw — dU = dW + dQ, dF = dW and dH_q = beta dQ across a small lambda step.

Two rows are written, at dlambda and dlambda / 2, so the O(dlambda^3)
shrink of the residuals can be read off directly.
"""

from geoqt.commands.common import emit, load_run, make_result, sampler_config
from geoqt.commands.jarzynski import build_family
from geoqt.dynamics import first_law_check

FIRSTLAW_COLUMNS = (
    "beta", "lambda0", "dlambda", "dU", "dW", "dQ", "dF", "dHq",
    "residual_first_law", "residual_free_energy", "residual_entropy",
    "dW_mc", "dW_mc_std_error",
)


def _row(report) -> tuple:
    mc = report.dW_mc
    return (
        report.beta, report.lambda0, report.dlambda, report.dU, report.dW, report.dQ,
        report.dF, report.dHq, report.residual_first_law, report.residual_free_energy,
        report.residual_entropy,
        mc.value if mc is not None else None,
        mc.std_error if mc is not None else None,
    )


def cmd_firstlaw(args):
    cfg = load_run(args, "firstlaw")
    family = build_family(cfg)
    beta = float(cfg.beta)
    lambda0 = cfg.first_law.lambda0 if cfg.first_law is not None else cfg.protocol.lambda_i
    delta = cfg.first_law.dlambda if cfg.first_law is not None and cfg.first_law.dlambda else 1e-2
    mc = sampler_config(cfg) if getattr(args, "mc", False) else None

    reports = [
        first_law_check(family, beta, lambda0, delta, cfg=mc),
        first_law_check(family, beta, lambda0, delta / 2.0, cfg=mc),
    ]
    rows = [_row(r) for r in reports]
    summary = {"beta": beta, "lambda0": lambda0}
    coarse, fine = reports
    for name in ("residual_first_law", "residual_free_energy", "residual_entropy"):
        a, b = getattr(coarse, name), getattr(fine, name)
        summary[f"{name} shrink"] = a / b if b > 0.0 else None
    emit(
        make_result("firstlaw", cfg, FIRSTLAW_COLUMNS, rows, data=[r.as_dict() for r in reports], summary=summary),
        cfg,
        args,
    )
