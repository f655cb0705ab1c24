"""
This module reads and writes run directories.

A run directory holds config.json, summary.json, trace.csv, snapshots/snapshot_NNN.csv with a
JSON sidecar each, and fit.json once a fit was made.
"""
import csv
import json
import logging
import re
from pathlib import Path
from typing import List, Optional

import numpy as np
from django.conf import settings

from meshsim.config import SimConfig
from meshsim.fitting import FitResult
from meshsim.serializers import FitResultSerializer, SimConfigSerializer
from meshsim.solver import MeshState, RunTrace, Snapshot

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ['t', 'lag', 'dr_u0', 'sup_grad', 'energy', 'min_dx', 'layer_nodes']


def output_root() -> Path:
    """Return the root of every run directory."""
    return Path(settings.BLOWUPLAB['OUTPUT_ROOT'])


def directory_name(config: SimConfig) -> str:
    """Return a stable directory name for a configuration."""
    stem = config.label or config.initial
    stem = re.sub(r'[^A-Za-z0-9]+', '-', stem).strip('-') or 'run'
    return f"{stem}-d{config.d:g}-k{config.k}-{config.digest()[:12]}"


def write_json(path: Path, data) -> None:
    """Write JSON with sorted keys."""
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + '\n', encoding='utf-8')


def read_json(path: Path):
    """Read JSON."""
    return json.loads(Path(path).read_text(encoding='utf-8'))


def write_csv(path: Path, header, rows) -> None:
    """Write rows under a header, floats in their shortest exact form."""
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(value)) if isinstance(value, (float, np.floating)) else value
                             for value in row])


def read_csv(path: Path) -> dict:
    """Read a numeric CSV into one array per column."""
    with open(path, newline='', encoding='utf-8') as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [[float(value) for value in row] for row in reader if row]
    values = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: values[:, column] for column, name in enumerate(header)}


def load_config(path: Path) -> SimConfig:
    """
    Read and validate a configuration file.

    Raises:
        ValueError: the file is not JSON.
        rest_framework.exceptions.ValidationError: the content is not a valid configuration.
    """
    serializer = SimConfigSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


class RunDirectory:
    """
    This class defines the files of one run.

    Attributes:
        path (Path): The directory.
    """

    def __init__(self, path):
        """Point at an existing or future run directory."""
        self.path = Path(path)

    @classmethod
    def create(cls, config: SimConfig, root: Optional[Path] = None) -> 'RunDirectory':
        """Create the directory of a configuration and write its config.json."""
        root = output_root() if root is None else Path(root)
        directory = cls(root / directory_name(config))
        (directory.path / 'snapshots').mkdir(parents=True, exist_ok=True)
        write_json(directory.config_path, config.as_dict())
        return directory

    @property
    def config_path(self) -> Path:
        """Return the path of config.json."""
        return self.path / 'config.json'

    @property
    def trace_path(self) -> Path:
        """Return the path of trace.csv."""
        return self.path / 'trace.csv'

    @property
    def fit_path(self) -> Path:
        """Return the path of fit.json."""
        return self.path / 'fit.json'

    def write_trace(self, trace: RunTrace) -> None:
        """Write the trace, its summary and its snapshots."""
        columns = [trace.t, trace.lag, trace.dr_u0, trace.sup_grad, trace.energy, trace.min_dx]
        rows = (list(values) + [int(nodes)] for *values, nodes in zip(*columns, trace.layer_nodes))
        write_csv(self.trace_path, TRACE_COLUMNS, rows)
        write_json(self.path / 'summary.json', {
            'status': trace.status,
            'steps': int(trace.t.size - 1),
            'restarts': trace.restarts,
            'energy_violations': trace.energy_violations,
            'min_layer_nodes': int(np.min(trace.layer_nodes)) if trace.layer_nodes.size else 0,
        })
        snapshots = self.path / 'snapshots'
        snapshots.mkdir(parents=True, exist_ok=True)
        for number, snapshot in enumerate(trace.snapshots):
            name = f'snapshot_{number:03d}'
            write_csv(snapshots / f'{name}.csv', ['r', 'u'], zip(snapshot.state.r, snapshot.state.u))
            write_json(snapshots / f'{name}.json', {
                'index': snapshot.index,
                'level': snapshot.level,
                't': snapshot.state.t,
                'lag': float(trace.lag[snapshot.index]),
                'dr_u0': snapshot.dr_u0,
                'sup_gradient': snapshot.sup_gradient,
                'origin_ratio': snapshot.origin_ratio,
            })
        logger.info("trace with %d rows and %d snapshots written to %s", trace.t.size, len(trace.snapshots),
                    self.path)

    def write_fit(self, result: FitResult) -> None:
        """Write fit.json."""
        write_json(self.fit_path, FitResultSerializer(result).data)

    def read_config(self) -> SimConfig:
        """Return the configuration of the run."""
        return load_config(self.config_path)

    def read_snapshots(self) -> List[Snapshot]:
        """Return the stored snapshots in order."""
        snapshots = []
        for sidecar in sorted((self.path / 'snapshots').glob('snapshot_*.json')):
            meta = read_json(sidecar)
            values = read_csv(sidecar.with_suffix('.csv'))
            snapshots.append(Snapshot(index=meta['index'], level=meta['level'],
                                      state=MeshState(t=meta['t'], r=values['r'], u=values['u']),
                                      dr_u0=meta['dr_u0'], sup_gradient=meta['sup_gradient'],
                                      origin_ratio=meta['origin_ratio']))
        return snapshots

    def read_trace(self) -> RunTrace:
        """
        Return the stored trace.

        Raises:
            FileNotFoundError: the directory holds no trace.
        """
        if not self.trace_path.exists():
            raise FileNotFoundError(f"{self.path} holds no trace.csv")
        columns = read_csv(self.trace_path)
        summary = read_json(self.path / 'summary.json')
        return RunTrace(
            config=self.read_config(),
            t=columns['t'],
            lag=columns['lag'],
            dr_u0=columns['dr_u0'],
            sup_grad=columns['sup_grad'],
            energy=columns['energy'],
            min_dx=columns['min_dx'],
            layer_nodes=columns['layer_nodes'].astype(int),
            status=summary['status'],
            snapshots=self.read_snapshots(),
            restarts=summary['restarts'],
            energy_violations=summary['energy_violations'],
        )

    def read_fit(self) -> Optional[FitResult]:
        """Return the stored fit, None before any fit."""
        if not self.fit_path.exists():
            return None
        serializer = FitResultSerializer(data=read_json(self.fit_path))
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def artifacts(self) -> List[str]:
        """Return every file of the run, relative to its directory."""
        return sorted(str(path.relative_to(self.path)) for path in self.path.rglob('*') if path.is_file())
