"""Pressure line shifts of impurities in superfluid helium, relative form.

The fixture lists published transitions with the wavelength at saturated
vapour pressure and the measured slope; the relative shift column is
recomputed as 100 * slope / lambda_svp and compared with the printed one.
"""

from __future__ import annotations

from dataclasses import dataclass


def relative_shift(slope: float, lambda_svp: float) -> float:
    """Relative pressure shift in %/bar for a slope in nm/bar."""
    if not lambda_svp > 0:
        raise ValueError("lambda_svp must be positive")
    return 100.0 * slope / lambda_svp


@dataclass(frozen=True)
class ComparisonRow:
    species: str
    transition: str
    lambda_free: float | None  # nm
    lambda_svp: float  # nm
    slope: float  # nm/bar
    printed_relative_shift: float  # %/bar
    slope_sigma: float | None = None

    @property
    def relative_shift(self) -> float:
        return relative_shift(self.slope, self.lambda_svp)

    @property
    def tolerance(self) -> float:
        # electron-bubble rows are printed with larger shifts and coarser rounding
        return 0.01 if self.species == "e-" else 0.001

    @property
    def matches_printed(self) -> bool:
        return abs(self.relative_shift - self.printed_relative_shift) <= self.tolerance

    def to_dict(self):
        return {
            "species": self.species, "transition": self.transition,
            "lambda_free_nm": self.lambda_free, "lambda_svp_nm": self.lambda_svp,
            "slope_nm_per_bar": self.slope, "slope_sigma_nm_per_bar": self.slope_sigma,
            "relative_shift_pct_per_bar": self.relative_shift,
            "printed_relative_shift_pct_per_bar": self.printed_relative_shift,
            "matches_printed": self.matches_printed,
        }


_TM_LOWER = "-> 4f13(2F7/2)6s2"
_ROWS = (
    ComparisonRow("e-", "1s-2p", None, 11270.0, 61.0, 0.541),
    ComparisonRow("e-", "1s-1p", None, 2480.0, 252.0, 10.161),
    ComparisonRow("e-", "1s-1p", None, 2480.0, 300.0, 12.097),
    ComparisonRow("He2", "2 3S -> 2 3P", 1083.0, 1083.2, -0.11, -0.010),
    ComparisonRow("He2", "2 3P -> 2 3S", 1083.0, 1091.1, -0.3, -0.027),
    ComparisonRow("Rb", "5 2S1/2 -> 5 2P1/2", 794.76, 777.96, -0.26, -0.033),
    ComparisonRow("Ba", "6s2 1S0 -> 6s6p 1P1", 553.55, 547.05, -0.11, -0.020),
    ComparisonRow("Cs", "6 2P1/2 -> 6 2S1/2", 894.35, 875.95, -0.26, -0.030),
    ComparisonRow("Cs", "6 2S1/2 -> 6 2P1/2", 894.35, 892.25, -0.67, -0.075),
    ComparisonRow("Tm", "4f12(3H5)5d5/2 6s2 (5,5/2)7/2 " + _TM_LOWER, 590.11, 596.21, -0.06, -0.01),
    ComparisonRow("Tm", "4f13(2F7/2)6s6p(3P1)(7/2,1)J " + _TM_LOWER, 589.73, 596.21, -0.06, -0.01),
    ComparisonRow("Mg", "3s4s 3S1 -> 3s3p 3P0", 516.73, 517.11, -0.09, -0.017, 0.01),
    ComparisonRow("Mg", "3s4s 3S1 -> 3s3p 3P1", 517.27, 517.51, -0.06, -0.012, 0.01),
    ComparisonRow("Mg", "3s4s 3S1 -> 3s3p 3P2", 518.36, 518.52, -0.06, -0.012, 0.01),
)


def comparison_table() -> list[ComparisonRow]:
    return list(_ROWS)
