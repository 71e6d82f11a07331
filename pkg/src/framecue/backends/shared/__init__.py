from .base_http import DEFAULT_RETRY_POLICY, BaseHttpBackend, RetryPolicy

__all__ = ["DEFAULT_RETRY_POLICY", "BaseHttpBackend", "RetryPolicy"]
