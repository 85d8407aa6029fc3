"""Exception hierarchy shared by all salegauge modules.

Exit-code mapping (see cli.main): ConfigError/SchemaError -> 2,
data/contract errors -> 3, NumericError -> 4.
"""


class SaleGaugeError(Exception):
    """Base class for all salegauge errors."""


class ConfigError(SaleGaugeError):
    """Malformed rule sets, policies, band specs, or mismatched components."""


class SchemaError(ConfigError):
    """CSV/JSON document does not match its declared schema."""


class DataError(SaleGaugeError):
    """A record violates a data contract (bad value, missing field)."""


class ParseError(DataError):
    """Unparseable cell or row in an input file."""


class BandAssignmentError(DataError):
    """Price cannot be assigned to any band."""


class ContractError(SaleGaugeError):
    """An operation precondition was violated by the caller."""


class NumericError(SaleGaugeError):
    """Non-finite values or numeric breakdown inside the solver."""


class PersistenceError(SaleGaugeError):
    """Model or report file cannot be read back (version/schema/truncation)."""
