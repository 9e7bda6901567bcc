from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .config import CSV_FLOAT_FORMAT, TERMS


@dataclass
class TrainingReport:
    """Rows logged at every interval: iteration, phase, raw and weighted terms, validation scores."""
    rows: List[Dict] = field(default_factory=list)

    def append(self, row: Dict) -> None:
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def columns(self) -> List[str]:
        base = ["iteration", "phase"]
        base += [f"raw_{t}" for t in TERMS] + [f"weighted_{t}" for t in TERMS]
        base += ["total", "d_loss", "val_miou", "val_rmse"]
        return base

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns())

    def term(self, name: str) -> np.ndarray:
        return self.to_frame()[f"raw_{name}"].to_numpy(dtype=np.float64)

    def save_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)

    @classmethod
    def load_csv(cls, path: Union[str, Path]) -> "TrainingReport":
        frame = pd.read_csv(path)
        rows = [{k: v for k, v in row.items() if not (isinstance(v, float) and np.isnan(v))}
                for row in frame.to_dict(orient="records")]
        return cls(rows=rows)

    def last(self) -> Optional[Dict]:
        return self.rows[-1] if self.rows else None
