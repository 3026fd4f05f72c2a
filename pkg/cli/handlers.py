"""
Command Handlers - run, compare, bench
Each handler loads the scenario, applies flag overrides, executes and writes outputs
"""

import logging
import sys
from datetime import datetime
from typing import Dict, List, Optional

from cli.run_orchestrator import RunJob, RunOutcome, execute_run
from config import config
from controllers import CONTROLLER_NAMES
from processors.bench import scaling_bench
from processors.csv_processor import CSVGenerator
from processors.metrics import AggregateStats, aggregate
from processors.report_exporter import report_exporter
from processors.scenario import Scenario, load_scenario, resolve_scenario_path
from processors.snapshot_renderer import SnapshotRenderer
from storage import OutputStore
from utils.errors import ConfigurationError, SimulationError
from utils.hashing import version_string
from utils.rng import parse_seed_list
from utils.run_pool import RunPool

logger = logging.getLogger(__name__)


def parse_int_list(text, what: str) -> List[int]:
    """'5,10,20' or a list of ints; order kept, duplicates dropped"""
    if isinstance(text, (list, tuple)):
        parts = [str(p) for p in text]
    else:
        parts = str(text).split(",")
    values = []
    for part in parts:
        part = part.strip()
        if not part:
            continue
        try:
            value = int(part)
        except ValueError:
            raise ConfigurationError(f"{what}: {part!r} is not an integer") from None
        if value not in values:
            values.append(value)
    if not values:
        raise ConfigurationError(f"{what}: empty list")
    return values


def progress_bar(current: int, total: int, label: str = "Runs"):
    pct = int(current * 100 / total) if total else 100
    bar = "█" * (pct // 10) + "░" * (10 - pct // 10)
    end = "\n" if current >= total else ""
    print(f"\r🔄 {label} [{bar}] {pct}% ({current}/{total})", end=end, file=sys.stderr, flush=True)


class CommandHandlers:
    def __init__(self, renderer: Optional[SnapshotRenderer] = None):
        self.renderer = renderer or SnapshotRenderer()

    # ==================== SHARED ====================

    def load(self, args) -> Scenario:
        scenario = load_scenario(resolve_scenario_path(args.scenario))
        return scenario.replace(
            controller=getattr(args, "controller", None),
            tau=getattr(args, "steps", None),
        )

    def stamp(self, scenario: Scenario, reproducible: bool) -> dict:
        """Fields every output document carries"""
        doc = {
            "scenario": scenario.name,
            "scenario_hash": scenario.content_hash(),
            "version": version_string(),
        }
        if not reproducible:
            doc["generated_at"] = datetime.now().isoformat(timespec="seconds")
        return doc

    def seeds(self, args, scenario: Scenario) -> List[int]:
        if getattr(args, "seeds", None):
            return parse_seed_list(args.seeds)
        seed = args.seed if getattr(args, "seed", None) is not None else scenario.seed
        return parse_seed_list(str(seed))

    def execute(self, jobs: List[RunJob], n_jobs: Optional[int], label: str) -> List[RunOutcome]:
        pool = RunPool(n_jobs)
        return pool.map(execute_run, jobs, progress=lambda i, n: progress_bar(i, n, label))

    @staticmethod
    def run_stem(outcome: RunOutcome) -> str:
        record = outcome.record
        return f"{record.scenario_name}_{record.controller}_m{record.m_total}_s{record.seed}"

    def write_run(self, store: OutputStore, outcome: RunOutcome, scenario: Scenario, stamp: dict):
        stem = self.run_stem(outcome)
        record = outcome.record
        CSVGenerator.write_run_table(store, f"{stem}.csv", record)

        summary = outcome.summary
        document = {
            **stamp,
            "kind": "run_summary",
            "controller": record.controller,
            "seed": record.seed,
            "seeds": [record.seed],
            "m_total": record.m_total,
            "tau": record.tau,
            "percent_obs": summary.percent_obs if summary else None,
            "per_step_obs": record.per_step_obs,
            "belief_conflicts": outcome.conflicts,
        }
        store.write_json(f"{stem}_summary.json", document)

        if outcome.beliefs:
            store.write_jsonl(f"{stem}_beliefs.jsonl", outcome.beliefs)
        if outcome.values:
            store.write_jsonl(f"{stem}_values.jsonl", outcome.values)
        if outcome.final_camera_state is not None:
            image = self.renderer.render(
                scenario.area(), outcome.final_camera_state, outcome.final_cells, outcome.final_heat
            )
            store.save_image(f"{stem}.png", image)

    # ==================== RUN ====================

    def handle_run(self, args) -> int:
        """Run one controller over one or more seeds"""
        scenario = self.load(args)
        if args.targets is not None:
            scenario = scenario.replace(targets=int(args.targets))
        seeds = self.seeds(args, scenario)
        reproducible = args.reproducible or config.REPRODUCIBLE
        store = OutputStore(args.out)

        jobs = [
            RunJob(
                scenario=scenario,
                controller=scenario.controller,
                seed=seed,
                emit_beliefs=args.emit_beliefs,
                top_k=config.BELIEF_TOP_K if args.emit_beliefs else None,
                verbose_values=args.verbose_values,
                capture_final=args.render,
            )
            for seed in seeds
        ]
        logger.info(f"🔄 {scenario.name}: {scenario.controller}, m={scenario.n_targets}, "
                    f"tau={scenario.tau}, {len(seeds)} seed(s)")
        outcomes = self.execute(jobs, args.jobs, "Runs")

        stamp = self.stamp(scenario, reproducible)
        for outcome in outcomes:
            self.write_run(store, outcome, scenario, stamp)
            value = outcome.summary.percent_obs if outcome.summary else float("nan")
            print(f"✅ {scenario.name}/{scenario.controller} seed {outcome.record.seed}: PercentObs {value:.2f}%")

        summaries = [o.summary for o in outcomes if o.summary is not None]
        if len(seeds) > 1:
            if summaries:
                self.write_aggregate(store, scenario, outcomes, summaries, stamp)
            else:
                logger.warning("⚠️ No seed produced a defined PercentObs; aggregate skipped")

        print(f"📁 {len(store.written)} file(s) written to {store.root}")
        return 0

    def write_aggregate(self, store: OutputStore, scenario: Scenario, outcomes, summaries, stamp: dict):
        stats = aggregate(summaries)
        controller = outcomes[0].record.controller
        m_total = outcomes[0].record.m_total
        document = {
            **stamp,
            "kind": "aggregate",
            "controller": controller,
            "seeds": [o.record.seed for o in outcomes],
            "m_total": m_total,
            "tau": outcomes[0].record.tau,
            "percent_obs": stats.to_dict(),
            "per_seed": [{"seed": s.seed, "percent_obs": s.percent_obs} for s in summaries],
        }
        prefix = f"{scenario.name}_{controller}_m{m_total}"
        store.write_json(f"{prefix}_aggregate.json", document)
        report = report_exporter.create_summary_report(
            scenario.name, controller, stamp["scenario_hash"], stamp["version"], summaries,
            aggregate=stats, conflicts=sum(o.conflicts for o in outcomes),
        )
        store.write_text(f"{prefix}_report.md", report)
        print(f"📊 Mean PercentObs {stats.mean:.2f}% ± {stats.stddev:.2f} over {stats.count} seeds")

    # ==================== COMPARE ====================

    def handle_compare(self, args) -> int:
        """All five controllers on seed-matched trajectories, for every target count"""
        scenario = self.load(args)
        m_values = parse_int_list(args.targets, "--targets") if args.targets else [scenario.n_targets]
        seeds = self.seeds(args, scenario)
        reproducible = args.reproducible or config.REPRODUCIBLE
        store = OutputStore(args.out)

        if args.targets:
            variants = {m: scenario.replace(targets=m) for m in m_values}
        else:
            # scripted starts stay as written
            variants = {scenario.n_targets: scenario}
        jobs = [
            RunJob(scenario=variants[m], controller=name, seed=seed)
            for m in m_values
            for name in CONTROLLER_NAMES
            for seed in seeds
        ]
        logger.info(f"🔄 Comparing {len(CONTROLLER_NAMES)} controllers on {scenario.name}: "
                    f"m={m_values}, {len(seeds)} seed(s)")
        outcomes = self.execute(jobs, args.jobs, "Compare")

        self.check_seed_matched(outcomes)
        stamp = self.stamp(scenario, reproducible)
        if args.keep_runs:
            for outcome in outcomes:
                self.write_run(store, outcome, outcome.job.scenario, stamp)

        table: Dict[str, Dict[int, Optional[AggregateStats]]] = {name: {} for name in CONTROLLER_NAMES}
        rows = []
        for m in m_values:
            for name in CONTROLLER_NAMES:
                summaries = [
                    o.summary for o in outcomes
                    if o.record.controller == name and o.record.m_total == m and o.summary is not None
                ]
                if summaries:
                    stats = aggregate(summaries)
                    row_stats = stats.to_dict()
                else:
                    logger.warning(f"⚠️ m={m}, {name}: no seed produced a defined PercentObs")
                    stats, row_stats = None, AggregateStats.undefined_dict()
                table[name][m] = stats
                rows.append({"controller": name, "m": m, **row_stats, "seeds": len(summaries)})

        CSVGenerator.write_comparison(store, "comparison.csv", rows)
        store.write_json("comparison.json", {
            **stamp,
            "kind": "comparison",
            "seeds": seeds,
            "m_values": m_values,
            "tau": scenario.tau,
            "rows": rows,
        })
        store.write_text("comparison.md", report_exporter.create_comparison_report(
            scenario.name, stamp["scenario_hash"], stamp["version"], seeds, table,
            generated_at=stamp.get("generated_at"),
        ))

        for m in m_values:
            ranked = sorted((c for c in CONTROLLER_NAMES if table[c][m] is not None), key=lambda c: -table[c][m].mean)
            if ranked:
                print(f"📊 m={m}: " + ", ".join(f"{c} {table[c][m].mean:.1f}%" for c in ranked))
            else:
                print(f"⚠️ m={m}: PercentObs undefined")
        print(f"📁 {len(store.written)} file(s) written to {store.root}")
        return 0

    @staticmethod
    def check_seed_matched(outcomes: List[RunOutcome]):
        """Ground truth for a (m, seed) pair must not depend on the controller"""
        digests = {}
        for o in outcomes:
            key = (o.record.m_total, o.record.seed)
            digest = o.record.truth_digest()
            if digests.setdefault(key, digest) != digest:
                raise SimulationError(
                    f"ground truth for m={key[0]} seed {key[1]} differs under controller {o.record.controller}"
                )

    # ==================== BENCH ====================

    def handle_bench(self, args) -> int:
        """Median plan() runtime per target count and a least-squares line"""
        scenario = self.load(args)
        m_values = parse_int_list(args.m_values, "--m-values") if args.m_values else list(config.BENCH_M_VALUES)
        repeats = args.repeats if args.repeats is not None else config.BENCH_REPEATS
        reproducible = args.reproducible or config.REPRODUCIBLE
        store = OutputStore(args.out)

        report = scaling_bench(
            scenario, m_values, repeats, stub=args.stub,
            progress=lambda i, n: progress_bar(i, n, "Bench"),
        )
        document = {
            **self.stamp(scenario, reproducible),
            "kind": "scaling",
            "seed": scenario.seed,
            "seeds": [scenario.seed],
            **report.to_dict(),
        }
        store.write_json("bench.json", document)

        for m, t in zip(report.m_values, report.runtimes):
            print(f"   m={m:>4}: {t * 1000:.3f} ms")
        print(f"📈 slope {report.slope * 1000:.4f} ms/target, intercept {report.intercept * 1000:.3f} ms, "
              f"R² {report.r_squared:.4f}, endpoint ratio {report.endpoint_ratio:.2f}")
        print(f"📁 {len(store.written)} file(s) written to {store.root}")
        return 0
