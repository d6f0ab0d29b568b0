"""Decorators for declaring contract entrypoints and relayer strategies"""

import functools
import inspect
from typing import Any, Callable, Dict, Optional, Type


def entrypoint(
    func: Optional[Callable] = None,
    *,
    kind: Optional[str] = None,
    description: Optional[str] = None,
):
    """
    Decorator to mark a contract method as callable by a transaction payload.

    The payload `kind` defaults to the method name without a leading underscore
    and an `on_` prefix.

    Example:
        class Coordinator:
            @entrypoint(kind="register")
            def on_register(self, ctx, call):
                ...
    """

    def decorator(f: Callable) -> Callable:
        name = kind or f.__name__.lstrip("_")
        if name.startswith("on_"):
            name = name[3:]

        @functools.wraps(f)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            return f(*args, **kwargs)

        wrapper._entrypoint_kind = name  # type: ignore[attr-defined]
        wrapper._entrypoint_description = (  # type: ignore[attr-defined]
            description or inspect.getdoc(f) or name
        )
        return wrapper

    if func is None:
        # Called with arguments: @entrypoint(kind="...")
        return decorator
    else:
        # Called without arguments: @entrypoint
        return decorator(func)


STRATEGIES: Dict[str, Type[Any]] = {}


def register_strategy(name: str) -> Callable[[Type[Any]], Type[Any]]:
    """
    Class decorator adding a relayer strategy to the registry under `name`.
    The class must declare the same name as its `variant`.

    Example:
        @register_strategy("coordinated")
        class Coordinated(Strategy):
            variant: ClassVar[str] = "coordinated"
    """

    def decorator(cls: Type[Any]) -> Type[Any]:
        if name in STRATEGIES and STRATEGIES[name] is not cls:
            raise ValueError(f"Strategy {name} is already registered")
        if getattr(cls, "variant", name) != name:
            raise ValueError(f"{cls.__name__} declares variant {cls.variant}, not {name}")
        STRATEGIES[name] = cls
        return cls

    return decorator
