"""
Experiment Services

Batch front-end behind the management commands and the API: builds one
config per sweep cell, runs the Monte Carlo trials and writes the result
files (summary.json, sweep.csv and the optional dumps). Every file is
written to a temporary name first and renamed into place.
"""
import json
import math
import os
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

from django.core.exceptions import ValidationError

from core.cache import SimulationCache
from core.choices import Protocol
from core.models import Cell, ExperimentSpec, MonteCarloResult, RunSummary, SimConfig
from core.services.base import BaseService, ServiceResponse
from core.services.config_services import ConfigService
from core.services.engine_services import EngineService, SimulationRun
from core.utils import atomic_write_csv, atomic_write_text, format_sig

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ('nodes', 'fading', 'attack', 'snr_db', 'pdr', 'latency_ms', 'energy_j', 'hops')

EPOCH_COLUMNS = (
    'epoch', 'generated', 'delivered', 'mean_sinr_db', 'mean_latency_ms', 'energy_j',
    'mean_hops', 'high_priority_generated', 'high_priority_delivered', 'transmissions',
    'relay_transmissions', 'jam_active',
)

HOP_COLUMNS = ('cell', 'trial', 'epoch', 'node', 'h_k', 'channel', 'frequency_hz')

TOPOLOGY_COLUMNS = ('cell', 'trial', 'id', 'x', 'y', 'radios', 'is_gateway')

COMPARISON_COLUMNS = ('nodes', 'fading', 'attack', 'protocol', 'pdr', 'latency_ms')


class ExperimentService(BaseService):
    """Sweeps, comparisons and result emission"""

    # =========================================================================
    # CONFIG PER CELL
    # =========================================================================

    @staticmethod
    def cell_config(cell: Cell, overrides: Optional[Dict] = None, seeds: Optional[Sequence[int]] = None) -> SimConfig:
        """Defaults for the cell, file overrides on top, cell and seed choices last"""
        config = ConfigService.default_config(cell.node_count, cell.fading, cell.attack)
        if overrides:
            config = ConfigService.from_dict(overrides, base=config)
            config = replace(config, node_count=cell.node_count, fading_model=cell.fading, attack=cell.attack)
        if seeds:
            config = ConfigService.with_seeds(config, seeds)
        return config

    @staticmethod
    def _check_spec(spec: ExperimentSpec) -> None:
        if not spec.cells:
            raise ValidationError({'cells': ['at least one (nodes, fading, attack) cell is required']})
        out_dir = Path(spec.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise PermissionError(f"output directory {out_dir} is not writable")

    # =========================================================================
    # SERIALISATION
    # =========================================================================

    @staticmethod
    def summary_metrics(summary: RunSummary) -> Dict[str, Any]:
        """Aggregate values of a summary; NaN becomes None"""
        values = {
            'generated': summary.generated,
            'delivered': summary.delivered,
            'pdr': summary.pdr,
            'mean_snr_db': summary.mean_snr_db,
            'mean_latency_ms': summary.mean_latency_ms,
            'mean_energy_per_delivered_j': summary.mean_energy_per_delivered_j,
            'mean_hops': summary.mean_hops,
            'total_energy_j': summary.total_energy_j,
            'high_priority_pdr': summary.high_priority_pdr,
            'relay_share': summary.relay_share,
            'connected': summary.connected,
            'window_pdr': summary.window_pdr,
            'window_energy_per_delivered_j': summary.window_energy_per_delivered_j,
            'window_mean_hops': summary.window_mean_hops,
        }
        metrics = {key: _json_number(value) for key, value in values.items()}
        metrics['component_sizes'] = list(summary.component_sizes)
        return metrics

    @classmethod
    def result_to_dict(cls, cell: Cell, config: SimConfig, result: MonteCarloResult) -> Dict[str, Any]:
        return {
            'cell': {'nodes': cell.node_count, 'fading': cell.fading.value, 'attack': cell.attack.value},
            'protocol': result.aggregate.protocol.value,
            'config': ConfigService.to_dict(config),
            'aggregate': cls.summary_metrics(result.aggregate),
            'trials': [
                {'seed': trial.seed, **cls.summary_metrics(trial)}
                for trial in result.trials
            ],
        }

    @staticmethod
    def sweep_row(cell: Cell, summary: RunSummary) -> Tuple[str, ...]:
        return (
            str(cell.node_count),
            cell.fading.value,
            cell.attack.value,
            format_sig(summary.mean_snr_db),
            format_sig(summary.pdr),
            format_sig(summary.mean_latency_ms),
            format_sig(summary.mean_energy_per_delivered_j),
            format_sig(summary.mean_hops),
        )

    @staticmethod
    def epoch_rows(summary: RunSummary) -> List[Tuple]:
        rows = []
        for metrics in summary.epochs:
            rows.append((
                metrics.epoch,
                metrics.generated,
                metrics.delivered,
                format_sig(metrics.mean_sinr_db),
                format_sig(metrics.mean_latency_ms),
                format_sig(metrics.energy_j),
                format_sig(metrics.mean_hops),
                metrics.high_priority_generated,
                metrics.high_priority_delivered,
                metrics.transmissions,
                metrics.relay_transmissions,
                int(metrics.jam_active),
            ))
        return rows

    @staticmethod
    def hop_rows(cell: Cell, runs: Sequence[SimulationRun]) -> List[Tuple]:
        rows = []
        for trial, run in enumerate(runs, start=1):
            for sample in run.state.hop_samples:
                rows.append((
                    cell.slug, trial, sample.epoch, sample.node, repr(sample.state),
                    sample.channel, format_sig(sample.frequency_hz, 10),
                ))
        return rows

    @staticmethod
    def topology_rows(cell: Cell, runs: Sequence[SimulationRun]) -> List[Tuple]:
        rows = []
        for trial, run in enumerate(runs, start=1):
            for node in run.state.topology.nodes:
                rows.append((
                    cell.slug, trial, node.id, format_sig(node.x), format_sig(node.y),
                    node.radio_label, int(node.is_gateway),
                ))
        return rows

    # =========================================================================
    # OPERATIONS
    # =========================================================================

    @classmethod
    def run_experiment(cls, spec: ExperimentSpec) -> ServiceResponse:
        """
        Run every cell, then write summary.json, sweep.csv and the requested
        dumps. Nothing is written unless every cell ran.
        """
        try:
            cls._check_spec(spec)
            protocol = Protocol.BASELINE if spec.baseline else Protocol.DAMCR
            configs = [cls.cell_config(cell, spec.overrides, spec.seeds) for cell in spec.cells]
            keep_runs = spec.dump_hops or spec.dump_topology

            entries, sweep, epoch_tables, hops, topology = [], [], {}, [], []
            for cell, config in zip(spec.cells, configs):
                logger.info(f"Running cell {cell.slug} ({protocol.label}, seeds {list(config.seeds)})")
                runs: Optional[List[SimulationRun]] = [] if keep_runs else None
                result = EngineService.run_monte_carlo(
                    config, protocol=protocol, runs=runs, record_hops=spec.dump_hops
                )
                entries.append(cls.result_to_dict(cell, config, result))
                sweep.append(cls.sweep_row(cell, result.aggregate))
                if spec.emit_epochs:
                    epoch_tables[cell.slug] = cls.epoch_rows(result.trials[0])
                if spec.dump_hops:
                    hops.extend(cls.hop_rows(cell, runs))
                if spec.dump_topology:
                    topology.extend(cls.topology_rows(cell, runs))

            out_dir = Path(spec.out_dir)
            files = [
                atomic_write_text(
                    out_dir / 'summary.json',
                    json.dumps({'protocol': protocol.value, 'cells': entries}, indent=2, allow_nan=False) + '\n',
                ),
                atomic_write_csv(out_dir / 'sweep.csv', SWEEP_COLUMNS, sweep),
            ]
            for slug, rows in epoch_tables.items():
                files.append(atomic_write_csv(out_dir / f'epochs_{slug}.csv', EPOCH_COLUMNS, rows))
            if spec.dump_hops:
                files.append(atomic_write_csv(out_dir / 'hops.csv', HOP_COLUMNS, hops))
            if spec.dump_topology:
                files.append(atomic_write_csv(out_dir / 'topology.csv', TOPOLOGY_COLUMNS, topology))

            return cls.success(
                data={'files': files, 'cells': entries, 'sweep': sweep},
                message=f"{len(spec.cells)} cell(s) written to {out_dir}",
            )
        except Exception as e:
            return cls.handle_exception(e, 'run_experiment')

    @classmethod
    def compare_baseline(cls, spec: ExperimentSpec, reference: Protocol = Protocol.BASELINE) -> ServiceResponse:
        """
        Run DAMCR and the reference protocol on identical cells and seeds and
        report (pdr, latency) per protocol plus DAMCR-minus-reference deltas.
        """
        try:
            cls._check_spec(spec)
            rows, report = [], []
            for cell in spec.cells:
                config = cls.cell_config(cell, spec.overrides, spec.seeds)
                damcr = EngineService.run_monte_carlo(config, protocol=Protocol.DAMCR).aggregate
                other = EngineService.run_monte_carlo(config, protocol=reference).aggregate
                delta_pdr = damcr.pdr - other.pdr
                delta_latency = damcr.mean_latency_ms - other.mean_latency_ms
                key = (str(cell.node_count), cell.fading.value, cell.attack.value)
                rows.append(key + (Protocol.DAMCR.value, format_sig(damcr.pdr), format_sig(damcr.mean_latency_ms)))
                rows.append(key + (reference.value, format_sig(other.pdr), format_sig(other.mean_latency_ms)))
                rows.append(key + ('delta', format_sig(delta_pdr), format_sig(delta_latency)))
                report.append({
                    'cell': {'nodes': cell.node_count, 'fading': cell.fading.value, 'attack': cell.attack.value},
                    'damcr': cls.summary_metrics(damcr),
                    'reference': {'protocol': reference.value, **cls.summary_metrics(other)},
                    'delta': {'pdr': _json_number(delta_pdr), 'latency_ms': _json_number(delta_latency)},
                })

            out_dir = Path(spec.out_dir)
            files = [
                atomic_write_csv(out_dir / 'comparison.csv', COMPARISON_COLUMNS, rows),
                atomic_write_text(
                    out_dir / 'comparison.json',
                    json.dumps({'comparisons': report}, indent=2, allow_nan=False) + '\n',
                ),
            ]
            return cls.success(data={'files': files, 'rows': rows, 'comparisons': report},
                               message=f"Compared {len(spec.cells)} cell(s)")
        except Exception as e:
            return cls.handle_exception(e, 'compare_baseline')

    @classmethod
    def simulate_cell(cls, config: SimConfig, protocol: Protocol = Protocol.DAMCR) -> ServiceResponse:
        """Monte Carlo result for one config as plain data, served from cache when possible"""
        try:
            digest = ConfigService.digest(config)
            cached = SimulationCache.get_result(digest, protocol.value)
            if cached is not None:
                return cls.success(data=cached, message='cached')
            result = EngineService.run_monte_carlo(config, protocol=protocol)
            cell = Cell(config.node_count, config.fading_model, config.attack)
            data = cls.result_to_dict(cell, config, result)
            SimulationCache.set_result(digest, protocol.value, data)
            return cls.success(data=data, message='computed')
        except Exception as e:
            return cls.handle_exception(e, 'simulate_cell')


def _json_number(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value
