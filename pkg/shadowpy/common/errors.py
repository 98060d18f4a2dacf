""" exceptions raised across shadowpy """


class ShadowpyError(Exception):
    """ base class for shadowpy errors """


class ConfigError(ShadowpyError, ValueError):
    """ bad or inconsistent configuration - CLI exit code 2 """
    exit_code = 2


class DataError(ShadowpyError, ValueError):
    """ input data violates a precondition - CLI exit code 3 """
    exit_code = 3


class FailureRateExceeded(ShadowpyError):
    """ too many samples failed during a batch run - CLI exit code 4 """
    exit_code = 4

    def __init__(self, failed, total, threshold):
        self.failed = failed
        self.total = total
        self.threshold = threshold
        super().__init__(
            '{} of {} samples failed, above the {:.2%} threshold'.format(
                failed, total, threshold)
        )
