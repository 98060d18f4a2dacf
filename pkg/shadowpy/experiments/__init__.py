from shadowpy.experiments.blocks import (
    gen_ablations, gen_facial, gen_foreign, gen_mirrors, holdout_split, setup_expt)
from shadowpy.experiments.config import DEFAULT_CONFIG, make_config
