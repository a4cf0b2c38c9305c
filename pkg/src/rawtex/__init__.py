"""rawtex: color-texture descriptors and an illumination-robustness benchmark."""

__version__ = "0.1.0"
