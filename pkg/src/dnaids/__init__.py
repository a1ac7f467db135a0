"""Offline signature-based intrusion detection over nucleotide-encoded NSL-KDD records."""

from .dataset import (
    AttackTaxonomy,
    ConnectionRecord,
    FeatureStats,
    LabelClass,
    RecordSchema,
    feature_stats,
    load_schema,
    load_taxonomy,
    normalize_label,
    parse_records,
    prefix,
    read_records,
)
from .detection import (
    DetectionConfig,
    MatchEngine,
    Verdict,
    WeightTable,
    build_engine,
    classify,
    detect_stream,
    weight_distance,
    weight_profile,
)
from .encoding import EncoderModel, encode_record, fit_encoder, load_model, save_model
from .reporting import ConfusionCounts, SeriesPoint, fp_series, score_run, write_alert_log, write_series_csv
from .signatures import (
    ConflictPolicy,
    Signature,
    SignatureDatabase,
    build_database,
    load_database,
    merge_databases,
    save_database,
)

__version__ = "0.1.0"
