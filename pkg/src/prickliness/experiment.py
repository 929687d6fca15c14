"""Corpus experiment: prickliness against median viewshed complexity."""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .prickliness2d import prickliness_2d
from .terrain import Terrain2D
from .viewshed import Scene, select_viewpoints, viewshed_vertices_2d


@dataclass
class ExperimentRow:
    terrain_id: str
    n: int
    pi: Optional[int]
    complexities: List[int] = field(default_factory=list)
    error: str = ""

    @property
    def median(self) -> Optional[float]:
        return statistics.median(self.complexities) if self.complexities else None

    CSV_HEADER = "terrain_id,n,pi,complexities,median,error"

    def csv_row(self) -> str:
        med = "" if self.median is None else f"{self.median:g}"
        pi = "" if self.pi is None else str(self.pi)
        err = self.error.replace(",", ";").replace("\n", " ")
        return (f"{self.terrain_id},{self.n},{pi},"
                f"{';'.join(map(str, self.complexities))},{med},{err}")


def measure_terrain(terrain_id: str, T: Terrain2D, k: int = 9) -> ExperimentRow:
    pi = prickliness_2d(T).value
    sc = Scene(T)
    comps = [viewshed_vertices_2d(T, vp, sc).total for vp in select_viewpoints(T, k)]
    return ExperimentRow(terrain_id, T.n, pi, comps)


def run_experiment(corpus: Path, k: int = 9) -> List[ExperimentRow]:
    """One row per terrain file in ``corpus``; failures become diagnostic rows."""
    from .io import load_terrain

    rows = []
    for path in sorted(Path(corpus).iterdir()):
        if not path.is_file():
            continue
        try:
            T = load_terrain(path)
            if not isinstance(T, Terrain2D):
                raise ValueError("not a 2.5D terrain")
            rows.append(measure_terrain(path.stem, T, k))
        except Exception as e:  # recorded, the run goes on
            rows.append(ExperimentRow(path.stem, 0, None, [], f"{type(e).__name__}: {e}"))
    rows.sort(key=lambda r: (r.n, r.terrain_id))
    return rows


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    return "\n".join([ExperimentRow.CSV_HEADER] + [r.csv_row() for r in rows]) + "\n"
