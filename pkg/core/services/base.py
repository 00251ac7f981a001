"""
Base service with a standardized response format
"""
from typing import Any, Dict, Optional
from django.core.exceptions import ValidationError
import logging

logger = logging.getLogger(__name__)

CONFIG_ERROR = 'config'
IO_ERROR = 'io'
INTERNAL_ERROR = 'internal'


class ServiceResponse:
    """Standardized service response object"""

    def __init__(self, success: bool, data: Any = None, message: str = "", errors: Dict = None):
        self.success = success
        self.data = data
        self.message = message
        self.errors = errors or {}

    @property
    def error_kind(self) -> Optional[str]:
        return self.errors.get('kind')

    def __bool__(self):
        return self.success


class BaseService:
    """Shared response helpers for outward-facing services"""

    @staticmethod
    def success(data: Any = None, message: str = "") -> ServiceResponse:
        return ServiceResponse(success=True, data=data, message=message)

    @staticmethod
    def error(message: str, data: Any = None, errors: Dict = None) -> ServiceResponse:
        return ServiceResponse(success=False, data=data, message=message, errors=errors)

    @classmethod
    def handle_exception(cls, exception: Exception, context: str = "") -> ServiceResponse:
        """Map an exception to an error response, logging at a level that fits it"""
        error_context = f"{context}: " if context else ""

        if isinstance(exception, ValidationError):
            error_msg = f"{error_context}Configuration error - {format_validation_error(exception)}"
            logger.warning(error_msg)
            kind = CONFIG_ERROR
        elif isinstance(exception, OSError):
            error_msg = f"{error_context}I/O error - {str(exception)}"
            logger.error(error_msg, exc_info=True)
            kind = IO_ERROR
        else:
            error_msg = f"{error_context}Unexpected error - {str(exception)}"
            logger.exception(error_msg)
            kind = INTERNAL_ERROR

        return cls.error(error_msg, errors={'kind': kind})


def format_validation_error(exception: ValidationError) -> str:
    """Flatten a ValidationError into 'field: message' pairs"""
    if hasattr(exception, 'error_dict'):
        parts = []
        for field, errors in sorted(exception.message_dict.items()):
            parts.append(f"{field}: {'; '.join(errors)}")
        return ', '.join(parts)
    return '; '.join(exception.messages)
