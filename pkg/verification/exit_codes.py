"""Exit codes shared by every CLI command."""


class ExitCodes:
    """
    0: every computation succeeded and every check passed
    1: a verification check failed
    2: the command line or a group literal was rejected
    3: a configured size or search bound was exceeded
    """

    SUCCESS = 0
    VERIFICATION_FAILED = 1
    USAGE_ERROR = 2
    RESOURCE_BOUND = 3

    @classmethod
    def get_description(cls, code: int) -> str:
        descriptions = {
            cls.SUCCESS: "Success - all checks passed",
            cls.VERIFICATION_FAILED: "At least one verification check failed",
            cls.USAGE_ERROR: "Invalid arguments or group literal",
            cls.RESOURCE_BOUND: "A size or search bound was exceeded",
        }
        return descriptions.get(code, f"Unknown exit code: {code}")
