from __future__ import annotations


class GuardExceeded(RuntimeError):
    """An enumeration or search would exceed its configured size guard."""

    def __init__(self, what: str, required, guard) -> None:
        self.what = what
        self.required = required
        self.guard = guard
        super().__init__(
            f"{what}: needs {required} but the guard is {guard}; "
            "raise the guard explicitly or shrink the instance"
        )


class GrowthError(ValueError):
    """A growth function violates the branching inequality."""
