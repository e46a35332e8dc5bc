"""
Analytic error rates and efficiencies for KMB09 and its three-basis variant.
"""

from .kmb09 import (
    Kmb09Params,
    RateQuartet,
    kmb09_iter,
    kmb09_qber,
    kmb09_eta,
    kmb09_eta_evan,
    kmb09_rates,
)
from .variant import (
    VariantParams,
    VariantRates,
    variant_iter,
    variant_qb,
    variant_qber,
    variant_eta,
    variant_eta_evan,
    variant_rates,
)

__all__ = [
    "Kmb09Params",
    "RateQuartet",
    "kmb09_iter",
    "kmb09_qber",
    "kmb09_eta",
    "kmb09_eta_evan",
    "kmb09_rates",
    "VariantParams",
    "VariantRates",
    "variant_iter",
    "variant_qb",
    "variant_qber",
    "variant_eta",
    "variant_eta_evan",
    "variant_rates",
]
