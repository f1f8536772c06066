"""Fourier eigenfunctions on R^4 built from modular forms, with exact and
numeric certificates (q-series identities, Hankel transforms, D4 lattice checks)."""

from .eigenfunctions import EigenEval, EigenfunctionId, a_direct, f_minus, f_plus, forced_zeros
from .lattice import enumerate_norms, poisson_residual, sign_scan, theta_crosscheck
from .modular import eval_form, eval_g, eval_phi_imag_axis, transform_residual
from .precision import PrecisionCtx, UpperHalfPoint
from .qseries import HalfStepSeries, SeriesId, build_series, identity_residual
from .radial_fourier import HankelQuadSpec, eigen_residual, hankel4

__version__ = "0.1.0"
