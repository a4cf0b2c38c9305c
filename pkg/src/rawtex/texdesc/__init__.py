"""Traditional descriptor registry.

Names match the benchmark report rows; every entry maps a 200x200 Patch to
a FeatureVector with the declared dimensionality.
"""

from __future__ import annotations

from ..features import FeatureVector
from ..imgcore import Patch
from .cooccurrence import cooccurrence_l, cooccurrence_rgb
from .dtcwt import dtcwt
from .gaborbank import gabor_l, gabor_rgb, opponent_gabor
from .gist import gist
from .granulometry import granulometry
from .histograms import (chromaticity_moments, hist_chrom_rgb, hist_hv,
                         hist_l, hist_rgb)
from .hog import hog
from .lbp import lbp, lcc, oclbp

DESCRIPTORS = {
    "hist-l": hist_l,
    "hist-hv": hist_hv,
    "hist-rgb": hist_rgb,
    "hist-chrom-rgb": hist_chrom_rgb,
    "chrom-moments": chromaticity_moments,
    "coocc-rgb": cooccurrence_rgb,
    "coocc-l": cooccurrence_l,
    "dtcwt": dtcwt,
    "gabor-rgb": gabor_rgb,
    "gabor-l": gabor_l,
    "opp-gabor": opponent_gabor,
    "gist": gist,
    "granulometry": granulometry,
    "hog": hog,
    "lbp-l": lambda p: lbp(p, "l"),
    "lbp-rgb": lambda p: lbp(p, "rgb"),
    "lbp-lab": lambda p: lbp(p, "lab"),
    "lbp-ohta": lambda p: lbp(p, "ohta"),
    "oclbp": oclbp,
    "lcc": lcc,
}

# declared output dimensionality per descriptor; dtcwt, granulometry and
# gist carry config-declared dims (see the project notes on their sources)
DECLARED_DIMS = {
    "hist-l": 256, "hist-hv": 512, "hist-rgb": 768, "hist-chrom-rgb": 768,
    "chrom-moments": 10, "coocc-rgb": 15, "coocc-l": 5,
    "dtcwt": 144, "gabor-rgb": 144, "gabor-l": 48, "opp-gabor": 264,
    "gist": 512, "granulometry": 24, "hog": 81,
    "lbp-l": 243, "lbp-rgb": 729, "lbp-lab": 729, "lbp-ohta": 729,
    "oclbp": 1458, "lcc": 499,
}


def extract(name: str, patch: Patch) -> FeatureVector:
    if name not in DESCRIPTORS:
        raise KeyError(f"unknown descriptor {name!r}")
    return DESCRIPTORS[name](patch)
