class CeeError(ValueError):
    """Input or validation failure. `code` names the violated invariant."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class UnreachableStateError(CeeError):
    """The mechanism state has zero likelihood under every past state."""

    def __init__(self, message: str = ""):
        super().__init__("unreachable-state", message)
