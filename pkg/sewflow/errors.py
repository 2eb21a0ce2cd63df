#!/usr/bin/env python
# _*_ coding:utf-8 _*_
from sewflow import const


class SewflowError(Exception):
    """Base error of the sewing toolkit"""

    def __init__(self, error_type, message, details=None):
        self.error_type = error_type
        self.message = message
        self.details = details or {}
        super().__init__(self.__str__())

    def __str__(self):
        error_msg = '[{0}] {1}'.format(self.error_type, self.message)
        if self.details:
            details_str = ', '.join(['{0}={1}'.format(k, v) for k, v in self.details.items()])
            error_msg += ' ({0})'.format(details_str)
        return error_msg


class InvalidArgument(SewflowError, ValueError):

    def __init__(self, message, details=None):
        super().__init__(const.ERROR_INVALID_ARGUMENT, message, details)


class UnsupportedOperation(SewflowError):

    def __init__(self, message, details=None):
        super().__init__(const.ERROR_UNSUPPORTED_OPERATION, message, details)


class DivergenceError(SewflowError):
    """Raised when the Cauchy gaps keep growing; `history` holds the level records seen so far"""

    def __init__(self, message, history=None, details=None):
        self.history = history or []
        super().__init__(const.ERROR_DIVERGENCE, message, details)


class InsufficientData(SewflowError):

    def __init__(self, message, details=None):
        super().__init__(const.ERROR_INSUFFICIENT_DATA, message, details)


class ConfigError(SewflowError):

    def __init__(self, message, details=None):
        super().__init__(const.ERROR_CONFIG, message, details)
