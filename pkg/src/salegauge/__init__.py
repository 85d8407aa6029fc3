"""salegauge: quantify how significant sale-season discounts really are.

Pipeline: HTML snapshot extraction -> catalog cleaning -> price-band stats ->
one-vs-rest SVM band prediction -> sigma-fold significance verdicts.
"""

from .catalog import (
    CleanReport,
    CommodityRecord,
    Dataset,
    FeatureVector,
    clean,
    load_catalog_csv,
    stratified_split,
    write_catalog_csv,
)
from .errors import (
    BandAssignmentError,
    ConfigError,
    ContractError,
    DataError,
    NumericError,
    ParseError,
    PersistenceError,
    SaleGaugeError,
    SchemaError,
)
from .extract import ExtractionRule, RawRecord, extract_corpus, load_rules, parse_snapshot
from .pricebands import (
    BandRow,
    PriceBand,
    PriceBandSpec,
    PriceBandStats,
    assign_band,
    band_stats,
    default_band_spec,
)
from .significance import (
    SignificancePolicy,
    SignificanceVerdict,
    classify_dataset,
    classify_discount,
    default_policy,
)
from .svm import (
    BinarySvmModel,
    KernelConfig,
    MulticlassSvmModel,
    ScalerParams,
    cross_validate,
    fit_scaler,
    apply_scaler,
    kernel_eval,
    load_model,
    predict_band,
    predict_decision,
    save_model,
    solve_binary,
    train_multiclass,
)
from .synth import SynthConfig, generate_catalogs

__version__ = "0.1.0"
