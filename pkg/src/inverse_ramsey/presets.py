"""Parameterizations of the four illustrative economies."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Economy


@dataclass(frozen=True)
class Preset:
    name: str
    economy: Economy
    revenue: float


FIGURES = {
    "figure1": Preset("figure1", Economy.from_params(0.60, 2.50, 0.55), 0.50),
    "figure2": Preset("figure2", Economy.from_params(0.60, 4.00, 0.45), 0.20),
    "figure3": Preset("figure3", Economy.from_params(0.20, 1.10, 0.53), 0.30),
    "figure4": Preset("figure4", Economy.from_params(0.80, 1.90, 0.45), 0.12),
}
