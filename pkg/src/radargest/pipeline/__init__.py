from .dataset import (
    BuildConfig,
    Dataset,
    FeatureConfig,
    build_dataset,
    effective_snr,
    featurize,
    fit_normalization,
    load_dataset,
    normalize_sample,
    save_dataset,
    split,
    tf_maps,
)
from .experiment import ExperimentResult, run_experiment, sweep, sweep_distance, sweep_scale
from .export import export_heatmap
from .metrics import Metrics, confusion_matrix
