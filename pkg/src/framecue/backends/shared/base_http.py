import logging
import time
from typing import Any, Callable

import httpx
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt
from tenacity import (
    RetryError,
    Retrying,
    before_sleep_log,
    retry_if_exception,
    stop_after_attempt,
    wait_exponential,
)

from framecue.errors import BackendError

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({408, 429, 500, 502, 503, 504})


class RetryPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    initial_interval: PositiveFloat = 0.25
    backoff_coefficient: float = Field(default=2.0, ge=1.0)
    maximum_interval: PositiveFloat = 8.0
    maximum_attempts: PositiveInt = 3


DEFAULT_RETRY_POLICY = RetryPolicy()


def _is_transient(error: BaseException) -> bool:
    if isinstance(error, httpx.TransportError):
        return True
    return isinstance(error, httpx.HTTPStatusError) and error.response.status_code in RETRYABLE_STATUS


class BaseHttpBackend:
    """
    Shared plumbing for backends that talk to a JSON endpoint over httpx:

      - owns the `httpx.Client` (use the backend as a context manager, or call `close()`),
      - retries transport errors and 408/429/5xx answers with exponential backoff,
      - turns every remaining failure into a `BackendError`.

    Tests pass `transport=httpx.MockTransport(...)` and a no-op `sleep`.
    """

    name: str = "http"

    def __init__(
        self,
        endpoint_url: str,
        auth_token: str | None = None,
        *,
        timeout_s: float = 60.0,
        retry: RetryPolicy = DEFAULT_RETRY_POLICY,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        headers = {"Content-Type": "application/json"}
        if auth_token:
            headers["Authorization"] = f"Bearer {auth_token}"
        self.endpoint_url = endpoint_url
        self.retry = retry
        self._sleep = sleep
        self._client = httpx.Client(headers=headers, timeout=timeout_s, transport=transport)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def close(self) -> None:
        self._client.close()

    def _post_once(self, payload: dict[str, Any]) -> dict[str, Any]:
        response = self._client.post(self.endpoint_url, json=payload)
        response.raise_for_status()
        return response.json()

    def post_json(self, payload: dict[str, Any]) -> dict[str, Any]:
        retrying = Retrying(
            stop=stop_after_attempt(self.retry.maximum_attempts),
            wait=wait_exponential(
                multiplier=self.retry.initial_interval,
                exp_base=self.retry.backoff_coefficient,
                max=self.retry.maximum_interval,
            ),
            retry=retry_if_exception(_is_transient),
            before_sleep=before_sleep_log(logger, logging.WARNING),
            sleep=self._sleep,
            reraise=True,
        )
        try:
            body = retrying(self._post_once, payload)
        except httpx.HTTPStatusError as e:
            raise BackendError(
                f"{self.name}: {self.endpoint_url} answered {e.response.status_code}: {e.response.text[:200]}"
            ) from e
        except (httpx.HTTPError, RetryError) as e:
            raise BackendError(f"{self.name}: request to {self.endpoint_url} failed: {e}") from e
        except ValueError as e:
            raise BackendError(f"{self.name}: {self.endpoint_url} did not return JSON: {e}") from e
        if not isinstance(body, dict):
            raise BackendError(f"{self.name}: expected a JSON object, got {type(body).__name__}")
        return body
