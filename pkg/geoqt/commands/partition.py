# SPDX-License-Identifier: BUSL-1.1
"""geoqt partition / thermo — closed-form canonical thermodynamics."""

from geoqt.canonical import gibbs_thermo_report, thermo_report
from geoqt.commands.common import emit, fallback_config, load_run, make_result
from geoqt.volumes import MeasureConvention

PARTITION_COLUMNS = ("beta", "Q", "log_Q")
THERMO_COLUMNS = ("beta", "Q", "F", "U", "Hq", "var_h")


def _betas(cfg) -> list:
    if cfg.beta_grid is not None:
        return [float(b) for b in cfg.beta_grid.betas()]
    return [float(cfg.beta)]


def _reports(cfg, args):
    sys = cfg.system()
    if getattr(args, "gibbs", False):
        return sys, [gibbs_thermo_report(sys, beta) for beta in _betas(cfg)]
    convention = MeasureConvention.parse(cfg.convention)
    fallback = fallback_config(cfg, args)
    return sys, [thermo_report(sys, beta, convention, fallback=fallback) for beta in _betas(cfg)]


def cmd_partition(args):
    cfg = load_run(args, "partition")
    sys, reports = _reports(cfg, args)
    rows = [(r.beta, r.Q, r.log_Q) for r in reports]
    data = [{"beta": r.beta, "Q": r.Q, "log_Q": r.log_Q, "convention": r.convention, "method": r.method}
            for r in reports]
    summary = {"dimension": sys.dimension, "convention": reports[0].convention}
    if len(reports) == 1:
        summary.update({"beta": reports[0].beta, "Q": reports[0].Q, "method": reports[0].method})
    emit(make_result("partition", cfg, PARTITION_COLUMNS, rows, data=data, summary=summary), cfg, args)


def cmd_thermo(args):
    cfg = load_run(args, "thermo")
    sys, reports = _reports(cfg, args)
    rows = [(r.beta, r.Q, r.F, r.U, r.Hq, r.var_h) for r in reports]
    summary = {"dimension": sys.dimension, "convention": reports[0].convention, "points": len(reports)}
    if len(reports) == 1:
        r = reports[0]
        summary.update({"beta": r.beta, "F": r.F, "U": r.U, "Hq": r.Hq})
    data = [r.as_dict() for r in reports]
    emit(make_result("thermo", cfg, THERMO_COLUMNS, rows, data=data, summary=summary), cfg, args)
