"""Lightweight call registry so the verification suite can assert coverage."""

import functools

_CALLS: dict[str, int] = {}


def registered_op(name):
    """Register ``fn`` under ``name`` and count its invocations."""

    def deco(fn):
        _CALLS.setdefault(name, 0)

        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            _CALLS[name] += 1
            return fn(*args, **kwargs)

        wrapper.op_name = name
        return wrapper

    return deco


def registered_names():
    return sorted(_CALLS)


def uncovered():
    """Names registered but never called so far."""
    return sorted(name for name, count in _CALLS.items() if count == 0)


def reset_counts():
    for name in _CALLS:
        _CALLS[name] = 0


def mark(name: str):
    _CALLS[name] = _CALLS.get(name, 0) + 1
