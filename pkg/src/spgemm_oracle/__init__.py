"""Predict the output structure of sparse matrix products C = AB.

The sampled-compression-ratio estimator divides the exact FLOP of C by the
FLOP/NNZ ratio of a small sample of output rows. An exact hash-based symbolic
pass serves as ground truth, and the classic scaled-sample estimator is kept
for comparison.
"""

from .csr import AssemblyError, CsrMatrix, Triplet, from_coo, from_dense, from_triplets, identity, validate
from .flop import FlopProfile, compute_flop, sampled_flop
from .predict import (ErrorReport, PredictionReport, SamplePlan, SampleStats, error_report,
                      exhaustive_plan, make_sample_plan, predict_proposed, predict_reference,
                      predict_row_structure, run_prediction)
from .symbolic import HashAccumulator, RowNnzResult, exact_symbolic, row_nnz, sampled_symbolic

__version__ = "0.1.0"
