r"""
A Google-style logging wrapper for kgman.

Log lines look like ``I1018 12:00:00.000123 4242 integrator.py:88] message``.
The threshold follows glog's ``GLOG_minloglevel`` (0=INFO .. 3=FATAL).
The ``check_*`` helpers emulate glog's CHECK macros and are what experiments
use for their in-run acceptance checks.
"""

import logging
import os
import sys
import time
import traceback

logger = logging.getLogger("kgman")
handler = logging.StreamHandler(sys.stderr)

_log_level_mapping = dict(
    zip(range(4), [logging.INFO, logging.WARNING, logging.ERROR, logging.FATAL])
)


def _level_from_env() -> int:
    try:
        level = int(os.environ.get("GLOG_minloglevel", 0))
    except ValueError:
        level = 0
    return _log_level_mapping[min(max(level, 0), 3)]


logger.setLevel(_level_from_env())
logger.propagate = False


def format_message(record):
    try:
        record_message = "%s" % (record.msg % record.args)
    except TypeError:
        record_message = record.msg
    return record_message


class GlogFormatter(logging.Formatter):
    LEVEL_MAP = {
        logging.FATAL: "F",
        logging.ERROR: "E",
        logging.WARN: "W",
        logging.INFO: "I",
        logging.DEBUG: "D",
    }

    def format(self, record):
        level = self.LEVEL_MAP.get(record.levelno, "?")
        stamp = time.strftime("%m%d %H:%M:%S", time.localtime(record.created))
        usec = int((record.created % 1) * 1e6)
        pid = record.process if record.process is not None else "?????"
        message = (
            f"{level}{stamp}.{usec:06d} {pid} {record.filename}:{record.lineno}] "
            f"{format_message(record)}"
        )
        record.getMessage = lambda: message
        return logging.Formatter.format(self, record)


handler.setFormatter(GlogFormatter())
logger.addHandler(handler)

DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING
ERROR = logging.ERROR
FATAL = logging.FATAL


def set_verbosity(level: int):
    r"""Sets the logger threshold with a glog level (0=INFO .. 3=FATAL)"""
    logger.setLevel(_log_level_mapping[min(max(int(level), 0), 3)])


def format_stacktrace(stack):
    lines = []
    for frame in stack:
        fname = os.path.basename(frame[0])
        lines.append("\t%s:%d\t%s" % (fname + "::" + frame[2], frame[1], frame[3]))
    return lines


class FailedCheckException(AssertionError):
    """Exception with message indicating check-failure location and values."""


def check_failed(message):
    stack = traceback.extract_stack()[0:-2]
    filename, line_num, _, _ = stack[-1]

    try:
        raise FailedCheckException(message)
    except FailedCheckException:
        log_record = logger.makeRecord(
            "CRITICAL", FATAL, filename, line_num, message, None, None
        )
        handler.handle(log_record)
        if logger.isEnabledFor(DEBUG):
            for line in format_stacktrace(stack):
                log_record = logger.makeRecord(
                    "DEBUG", DEBUG, filename, line_num, line, None, None
                )
                handler.handle(log_record)
        raise


def _describe(name, text):
    return f"Check '{name}' failed: {text}" if name else f"Check failed: {text}"


def check(condition, message=None):
    """Raise exception with message if condition is False."""
    if not condition:
        check_failed("Check failed." if message is None else message)


def check_eq(obj1, obj2, name=None):
    """Raise exception if obj1 != obj2."""
    if obj1 != obj2:
        check_failed(_describe(name, f"{obj1!r} != {obj2!r}"))


def check_le(obj1, obj2, name=None):
    """Raise exception if not (obj1 <= obj2). NaN never passes."""
    if not obj1 <= obj2:
        check_failed(_describe(name, f"{obj1!r} > {obj2!r}"))


def check_lt(obj1, obj2, name=None):
    """Raise exception unless (obj1 < obj2)."""
    if not obj1 < obj2:
        check_failed(_describe(name, f"{obj1!r} >= {obj2!r}"))


def check_ge(obj1, obj2, name=None):
    """Raise exception unless (obj1 >= obj2)."""
    if not obj1 >= obj2:
        check_failed(_describe(name, f"{obj1!r} < {obj2!r}"))


def check_gt(obj1, obj2, name=None):
    """Raise exception unless (obj1 > obj2)."""
    if not obj1 > obj2:
        check_failed(_describe(name, f"{obj1!r} <= {obj2!r}"))
