from shadowpy.common.utils import *

from shadowpy.common.errors import ConfigError, DataError, FailureRateExceeded, ShadowpyError
from shadowpy.common.logging import make_new_logger
from shadowpy.common.seeding import derive_seed, make_rng
