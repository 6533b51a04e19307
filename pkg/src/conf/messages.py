BUDGET_EXCEEDS_CLASS_SIZE = "budget exceeds class size"
BUDGET_MUST_BE_POSITIVE = "budget must be positive"
BUDGET_CLAMPED = "Budget for class {label} clamped from {budget} to class size {size}"
BWT_UNDEFINED = "BWT undefined for a single task"
CLASS_TOO_SMALL_TO_SPLIT = "Class {label} has {size} records, at least 3 are needed for a train/val/test split"
CONFIG_FILE_NOT_FOUND = "The config file {path} could not be found"
DANGLING_EDGE = "Edge ({src}, {dst}) on line {line} references a node outside [0, {n})"
DATASET_FILE_NOT_FOUND = "The dataset file {path} could not be found"
EMPTY_DATASET = "Dataset is empty"
EMPTY_SAMPLE = "empty sample"
FEATURE_COUNT_MISMATCH = "Feature count mismatch: {left} != {right}"
INVALID_LAYER_DIMS = "Layer dims must list at least two positive widths, got {dims}"
INVALID_MAGIC = "Not an LQMD file: bad magic {magic!r}"
INVALID_RUN_CONFIG = "Invalid run config {path}: {errors}"
LABEL_OUT_OF_RANGE = "Label {label} outside [0, {num_classes})"
LAYER_DIMS_MISMATCH = "layer_dims[0]={width} does not match {n_features} input features"
LABELS_REMAPPED = "Labels {original} remapped to contiguous range 0..{last}"
LABELS_OUTSIDE_REFERENCE = "Labels {labels} in {path} do not occur in the reference label set {known}"
MISSING_CELL = "Missing value in column {column!r} on line {line}"
MISSING_LABEL_COLUMN = "CSV header must contain a 'label' column"
NEGATIVE_LABEL = "Label {value!r} on line {line} is not a non-negative integer"
NON_CONVERGENCE = "Fixed-point iteration did not converge within {max_iters} iterations (last eps={eps:.3e})"
NON_FINITE_LOSS = "Non-finite loss {loss} at iteration {iteration} for class {label}"
NON_FINITE_VALUES = "Non-finite values are not allowed"
NOT_A_NUMBER = "Value {value!r} in column {column!r} on line {line} is not a number"
QUANTILE_COUNT_MISMATCH = "Quantile set has {k} points but budget is {budget}"
QUANTILE_OUT_OF_RANGE = "quantile out of range"
REAL_BATCH_SMALLER_THAN_BUDGET = "real_batch_size={batch} is smaller than budget {budget} of class {label}"
REMAINDER_TASK = "{classes} classes do not divide into tasks of {per_task}; last task has {rest}"
ROW_LENGTH_MISMATCH = "Line {line} has {got} cells, header has {expected}"
SHAPE_MISMATCH = "Shape mismatch: expected {expected}, got {got}"
TASK_INDEX_OUT_OF_RANGE = "Stage {k} outside [{low}, {high}]"
TRUNCATED_FILE = "LQMD file is truncated: expected {expected} bytes, got {got}"
UNSORTED_POINTS = "Points must be sorted ascending"
UNSUPPORTED_VERSION = "Unsupported LQMD version {version}"
UNKNOWN_CLASS = "Class {label} not present in dataset"
WRITTEN = "Wrote {path}"
