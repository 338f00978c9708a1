from typing import Callable, Generic, TypeVar

from pydantic import BaseModel, ConfigDict

T = TypeVar("T")
E = TypeVar("E", bound=Exception)


class Result(BaseModel, Generic[T, E]):
    """A value, or the error that prevented it.

    Returned at file and validation boundaries; numerical code raises instead.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    success: bool
    value: T | None = None
    error: E | None = None

    @classmethod
    def ok(cls, value: T) -> "Result[T, E]":
        return cls(success=True, value=value)

    @classmethod
    def err(cls, error: E) -> "Result[T, E]":
        return cls(success=False, error=error)

    def unwrap(self) -> T:
        if not self.success:
            raise self.error
        return self.value

    def expect(self, wrap: Callable[[str], Exception]) -> T:
        """The value, or `wrap(message)` raised from the stored error."""
        if not self.success:
            raise wrap(str(self.error)) from self.error
        return self.value
