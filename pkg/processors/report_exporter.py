"""
Report Exporter - Jinja2 Markdown reports
Summary report: per-run (one or more seeds)
Comparison report: controller x target count
"""

import logging
from typing import Dict, List, Optional, Sequence

from jinja2 import Template

from processors.metrics import AggregateStats, MetricSummary
from templates import get_comparison_template, get_summary_template
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


class ReportExporter:
    def __init__(self):
        self.summary_template = Template(get_summary_template())
        self.comparison_template = Template(get_comparison_template())

    def create_summary_report(self, scenario: str, controller: str, scenario_hash: str, version: str,
                              summaries: Sequence[MetricSummary], aggregate: Optional[AggregateStats] = None,
                              conflicts: int = 0) -> str:
        """PercentObs per seed, with the aggregate when several seeds ran"""
        if not summaries:
            raise ConfigurationError("summary report needs at least one run")
        return self.summary_template.render(
            scenario=scenario,
            controller=controller,
            scenario_hash=scenario_hash,
            version=version,
            m_total=summaries[0].m_total,
            tau=summaries[0].tau,
            summaries=summaries,
            aggregate=aggregate if len(summaries) > 1 else None,
            conflicts=conflicts,
        )

    def create_comparison_report(self, scenario: str, scenario_hash: str, version: str, seeds: List[int],
                                 table: Dict[str, Dict[int, Optional[AggregateStats]]],
                                 generated_at: Optional[str] = None) -> str:
        """mean ± stddev PercentObs, controllers as rows, m as columns"""
        controllers = list(table)
        m_values = sorted({m for row in table.values() for m in row})
        best = {}
        for m in m_values:
            defined = [c for c in controllers if table[c][m] is not None]
            # first controller in table order wins ties
            best[m] = max(defined, key=lambda c: (table[c][m].mean, -controllers.index(c))) if defined else None
        return self.comparison_template.render(
            scenario=scenario,
            scenario_hash=scenario_hash,
            version=version,
            seeds=seeds,
            generated_at=generated_at,
            controllers=controllers,
            m_values=m_values,
            table=table,
            best=best,
        )


report_exporter = ReportExporter()
