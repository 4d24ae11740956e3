"""Fourier-series kernel density estimation of angular distributions."""

__version__ = "0.1.0"

from .canonical import (
    CanonicalDescriptor,
    canonical_distance_f1,
    canonical_distance_fk,
    canonicalize_f1,
    canonicalize_fk,
    min_distance_search,
)
from .descriptor import AngleWeightSet, Descriptor, distance, estimate, evaluate, rotate, truncate
from .image_field import (
    AngularImage,
    DescriptorField,
    Window,
    box_window,
    gaussian_window,
    gradient_field,
    local_fskde,
    patch_descriptor,
)
from .kernel import Kernel, KernelMode, TruncationMask, derivative_coeffs, kernel_eval, make_kernel, truncation_mask
