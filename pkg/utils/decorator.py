from functools import wraps
import time
from typing import Any, Callable
import logging


class DecoratorUtils:
    @staticmethod
    def profile(func: Callable) -> Callable:
        """
        Decorator to profile numerical operations.
        Measures execution time and logs it together with the method and module.
        """
        module_name = func.__module__
        line_number = func.__code__.co_firstlineno

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                elapsed = time.perf_counter() - start_time
                logging.error(f"PROFILE: Error in {func.__name__} - module={module_name}:{line_number}, "
                              f"elapsed={elapsed:.4f}s, error={str(e)}")
                raise
            elapsed = time.perf_counter() - start_time
            logging.info(f"PROFILE: {func.__name__} - module={module_name}:{line_number}, elapsed={elapsed:.4f}s")
            return result

        return wrapper
