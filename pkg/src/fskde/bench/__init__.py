"""Patch-matching benchmark: datasets, baseline descriptors, ROC/AUC scoring."""

from .dataset import Dataset, DatasetError, PatchPair, load_dataset, save_dataset
from .descriptors import HistogramDescriptor, canonical_hist, hist_descriptor, intensity_descriptor
from .roc import roc_auc, roc_curve
from .runner import METHODS, BenchmarkReport, PreparedPatches, prepare_patches, run_benchmark
from .synthetic import SyntheticConfig, generate_synthetic

__all__ = [
    "Dataset", "DatasetError", "PatchPair", "load_dataset", "save_dataset",
    "HistogramDescriptor", "canonical_hist", "hist_descriptor", "intensity_descriptor",
    "roc_auc", "roc_curve",
    "METHODS", "BenchmarkReport", "PreparedPatches", "prepare_patches", "run_benchmark",
    "SyntheticConfig", "generate_synthetic",
]
