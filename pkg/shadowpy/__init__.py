__version__ = '0.1.0'

from shadowpy.common.logging import make_new_logger
from shadowpy.common.errors import ConfigError, DataError, FailureRateExceeded, ShadowpyError

from shadowpy.maskgen.register import make_mask
from shadowpy.shadowsynth.synth import synth_foreign
from shadowpy.olat.pairs import make_pair
from shadowpy.symmetry.warp import mirror_warp
