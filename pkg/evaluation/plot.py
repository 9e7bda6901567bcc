from pathlib import Path
from typing import Union

import pandas as pd
from matplotlib import pyplot as plt

from tensorcore import DatasetFormatError

from .config import PLOT_COLORS

REQUIRED_COLUMNS = ("index_source", "alpha", "miou")


def read_curve(curve_csv: Union[str, Path]) -> pd.DataFrame:
    try:
        curve = pd.read_csv(curve_csv)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise DatasetFormatError(f"cannot read curve file {curve_csv}: {exc}") from exc
    missing = [c for c in REQUIRED_COLUMNS if c not in curve.columns]
    if missing:
        raise DatasetFormatError(f"curve file {curve_csv} lacks columns {missing}")
    if curve.empty:
        raise DatasetFormatError(f"curve file {curve_csv} has no rows")
    return curve


class SweepPlot:
    """mIoU against alpha, one line per index source."""

    def __init__(self, curve: pd.DataFrame):
        self.curve = curve
        self.fig = None
        self.ax = None
        self.setup_page()
        self.plot_curves()

    def setup_page(self):
        self.fig = plt.figure(figsize=(6.0, 4.0), dpi=80)
        self.ax = self.fig.add_subplot(1, 1, 1)
        self.ax.set_xlabel("alpha (0 = RGB only, 1 = depth only)")
        self.ax.set_ylabel("mIoU")
        self.ax.set_title("Fused (RGB, depth) to segmentation", color="#1e3769")
        self.ax.grid(True, alpha=0.3)

    def plot_curves(self):
        for source, group in self.curve.groupby("index_source", sort=True):
            group = group.sort_values("alpha")
            self.ax.plot(group["alpha"].to_numpy(), group["miou"].to_numpy(), marker="o",
                         color=PLOT_COLORS.get(source), label=f"indices from {source}")
        self.ax.set_xlim(-0.02, 1.02)
        self.ax.legend(loc="lower center")

    def get_figure(self):
        return self.fig

    def savesvg(self, file_name: Union[str, Path]):
        self.fig.savefig(file_name, format="svg")

    def close(self):
        plt.close(self.fig)


def emit_plot(curve_csv: Union[str, Path], out_path: Union[str, Path]) -> Path:
    plot = SweepPlot(read_curve(curve_csv))
    try:
        plot.savesvg(out_path)
    finally:
        plot.close()
    return Path(out_path)
