import logging
import re
from functools import wraps

logger = logging.getLogger(__name__)


def cache_result(cache_func, get_cache_func):
    """
    Decorator factory for write-through caching of deterministic results

    Args:
        cache_func: Stores a result, called as cache_func(*args, result) (e.g., db.cache_cohomology)
        get_cache_func: Looks a result up, returning None on a miss (e.g., db.get_cached_cohomology)

    Stored entries never expire.
    """
    def decorator(f):
        @wraps(f)
        def wrapped(*args, **kwargs):
            stored = get_cache_func(*args)
            if stored is not None:
                logger.debug("Store hit for %s%s", f.__name__, args)
                return stored

            result = f(*args, **kwargs)
            if result is not None:
                cache_func(*args, result)
            return result

        return wrapped
    return decorator


def format_dims(dims):
    """Format a cohomology or homology vector as space-separated integers"""
    return ' '.join(str(d) for d in dims)


def format_coefficients(coeffs):
    """Format a divisor coefficient vector"""
    return '(' + ', '.join(str(c) for c in coeffs) + ')'


def parse_coefficients(text):
    """Parse '0 0 2', '0,0,2', '(0, 0, 2)' or '[0, 0, 2]' into a tuple of integers"""
    tokens = re.sub(r'[,()\[\]]', ' ', text).split()
    try:
        return tuple(int(token) for token in tokens)
    except ValueError:
        raise ValueError(f"'{text}' is not a list of integers")
