import inspect
import json
import logging

import httpx
import numpy as np
import pytest

from framecue.backends import EmbedderBackend, ExtractorBackend, VideoLlmBackend, backends_config
from framecue.backends.default import ChatVideoLlm, HashEmbedder, HttpEmbedder, LlmExtractor, MockDecoder, RuleExtractor
from framecue.backends.default.llm_extractor import parse_keyword_list
from framecue.backends.shared import BaseHttpBackend, RetryPolicy
from framecue.errors import BackendError, EmbeddingError, LabelDecodeError, PayloadTooLargeError
from framecue.prompter.config import VpConfig
from framecue.prompter.render import insert_vp, unlabeled_frame
from framecue.prompting import PromptProfile, extractor_prompt
from framecue.utils import base64_to_image
from tests.helpers import ReplayTransport, load_fixture, textured_frame

PROTOCOLS = {"embedder": EmbedderBackend, "extractor": ExtractorBackend, "model": VideoLlmBackend}


def get_required_attrs(protocol):
    members = [
        name
        for name, member in inspect.getmembers(protocol)
        if not name.startswith("_") and (inspect.isfunction(member) or isinstance(member, property))
    ]
    return ["name", *members]


registered = [(role, cls) for role, classes in backends_config.items() for cls in classes.values()]


@pytest.mark.parametrize("role, backend_class", registered, ids=lambda value: getattr(value, "__name__", value))
def test_backend_implements_interface(role, backend_class):
    for attr in get_required_attrs(PROTOCOLS[role]):
        assert hasattr(backend_class, attr), f"{backend_class.__name__} is missing required attribute '{attr}'"


def test_local_backends_satisfy_protocols():
    assert isinstance(HashEmbedder(), EmbedderBackend)
    assert isinstance(RuleExtractor(), ExtractorBackend)
    assert isinstance(MockDecoder(), VideoLlmBackend)


# ############################################################
# HTTP plumbing
# ############################################################


def _backend(transport, **kwargs) -> BaseHttpBackend:
    return BaseHttpBackend("http://test/endpoint", "secret", transport=transport, **kwargs)


def test_post_json_sends_bearer_token():
    seen = []

    def handler(request: httpx.Request) -> httpx.Response:
        seen.append(request.headers.get("Authorization"))
        return httpx.Response(200, json={"ok": True})

    with _backend(httpx.MockTransport(handler)) as backend:
        assert backend.post_json({"x": 1}) == {"ok": True}
    assert seen == ["Bearer secret"]


def test_transient_failures_are_retried_with_backoff(caplog):
    sleeps: list[float] = []
    transport = ReplayTransport([(503, {}), (429, {}), (200, {"ok": 1})])
    backend = _backend(transport, sleep=sleeps.append, retry=RetryPolicy(initial_interval=0.25, maximum_attempts=3))
    with caplog.at_level(logging.WARNING):
        assert backend.post_json({"q": 1}) == {"ok": 1}
    assert sleeps == [0.25, 0.5]
    assert len(transport.requests) == 3
    assert "Retrying" in caplog.text


def test_backoff_is_capped():
    sleeps: list[float] = []
    transport = ReplayTransport([(500, {})] * 4 + [(200, {})])
    policy = RetryPolicy(initial_interval=1.0, backoff_coefficient=3.0, maximum_interval=4.0, maximum_attempts=5)
    _backend(transport, sleep=sleeps.append, retry=policy).post_json({})
    assert sleeps == [1.0, 3.0, 4.0, 4.0]


def test_retries_exhausted_raise_backend_error():
    transport = ReplayTransport([(503, {"error": "busy"})] * 3)
    with pytest.raises(BackendError, match="503"):
        _backend(transport, sleep=lambda _: None).post_json({})
    assert len(transport.requests) == 3


def test_client_errors_are_not_retried():
    transport = ReplayTransport([(400, {"error": "bad request"})])
    with pytest.raises(BackendError, match="400"):
        _backend(transport, sleep=lambda _: None).post_json({})
    assert len(transport.requests) == 1


def test_connection_errors_are_retried_then_reported():
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        raise httpx.ConnectError("connection refused", request=request)

    with pytest.raises(BackendError, match="failed"):
        _backend(httpx.MockTransport(handler), sleep=lambda _: None).post_json({})
    assert len(calls) == 3


def test_non_object_json_is_a_protocol_error():
    with pytest.raises(BackendError, match="JSON object"):
        _backend(httpx.MockTransport(lambda request: httpx.Response(200, json=[1, 2]))).post_json({})


# ############################################################
# Embedders
# ############################################################


def test_hash_embedder_is_deterministic():
    embedder = HashEmbedder(dim=16, seed=1)
    a, b, c = embedder.embed_texts(["a dog", "a dog", "a cat"])
    assert a == b and a != c
    assert a.dim == 16 and a.norm == pytest.approx(1.0)
    assert HashEmbedder(dim=16, seed=2).embed_texts(["a dog"])[0] != a

    frame = textured_frame(32, 24)
    assert embedder.embed_images([frame])[0] == embedder.embed_images([frame.copy()])[0]
    with pytest.raises(EmbeddingError):
        HashEmbedder(dim=1)


def test_http_embedder_reads_vectors():
    transport = ReplayTransport([(200, load_fixture("http", "embed_texts.json"))])
    embedder = HttpEmbedder("http://test/embed", transport=transport)
    vectors = embedder.embed_texts(["the dog", "the cat", "the bird"])
    assert transport.requests == [{"texts": ["the dog", "the cat", "the bird"]}]
    assert [v.tolist() for v in vectors][1] == [1.0, 0.0, 0.0, 0.0]
    assert embedder.dim == 4


def test_http_embedder_batches_requests():
    batches = []

    def handler(request: httpx.Request) -> httpx.Response:
        texts = json.loads(request.content)["texts"]
        batches.append(len(texts))
        return httpx.Response(200, json={"dim": 3, "vectors": [[1.0, float(len(t)), 0.0] for t in texts]})

    embedder = HttpEmbedder("http://test/embed", batch_size=32, transport=httpx.MockTransport(handler))
    vectors = embedder.embed_texts([f"keyword {i}" for i in range(100)])
    assert batches == [32, 32, 32, 4]
    assert len(vectors) == 100


def test_http_embedder_sends_png_images():
    sent = []

    def handler(request: httpx.Request) -> httpx.Response:
        images = json.loads(request.content)["images"]
        sent.extend(images)
        return httpx.Response(200, json={"dim": 2, "vectors": [[1.0, 0.0]] * len(images)})

    frame = textured_frame(16, 12)
    HttpEmbedder("http://test/embed", transport=httpx.MockTransport(handler)).embed_images([frame])
    assert np.array_equal(np.asarray(base64_to_image(sent[0])), np.asarray(frame))


@pytest.mark.parametrize(
    "body, error, match",
    [
        ({"dim": 2, "vectors": [[1.0, 0.0]]}, BackendError, "expected 2 vectors"),
        ({"dim": 2, "vectors": [[1.0, 0.0], [1.0]]}, EmbeddingError, "text 1 'b'"),
        ({"vectors": "nope"}, BackendError, "expected 2 vectors"),
        ({"vectors": [0.5, 0.5]}, BackendError, "text 0 'a' is not a non-empty list of numbers"),
        ({"vectors": [[1.0, 0.0], None]}, BackendError, "text 1 'b' is not a non-empty list of numbers"),
        ({"vectors": [[1.0, 0.0], []]}, BackendError, "text 1 'b' is not a non-empty list of numbers"),
        ({"vectors": [[1.0, "0"], [1.0, 0.0]]}, BackendError, "text 0 'a'"),
        ({"dim": "2", "vectors": [[1.0, 0.0], [0.0, 1.0]]}, BackendError, "'dim' must be a positive integer, got '2'"),
        ({"dim": True, "vectors": [[1.0], [0.0]]}, BackendError, "'dim' must be a positive integer"),
    ],
)
def test_http_embedder_protocol_errors(body, error, match):
    embedder = HttpEmbedder("http://test/embed", transport=ReplayTransport([(200, body)]))
    with pytest.raises(error, match=match):
        embedder.embed_texts(["a", "b"])


def test_http_embedder_rejects_dimension_drift():
    transport = ReplayTransport([(200, {"dim": 2, "vectors": [[1.0, 0.0]]}), (200, {"dim": 3, "vectors": [[1.0, 0.0, 0.0]]})])
    embedder = HttpEmbedder("http://test/embed", batch_size=1, transport=transport)
    with pytest.raises(EmbeddingError, match="declares dim 3"):
        embedder.embed_texts(["a", "b"])


def test_http_embedder_dim_unknown_before_first_call():
    with pytest.raises(BackendError):
        _ = HttpEmbedder("http://test/embed").dim


# ############################################################
# Extractors
# ############################################################


@pytest.mark.parametrize(
    "question, expected",
    [
        ("What happened after the person took the food?", ["the person took the food"]),
        ("What did he do between the dog barking and the door closing?", ["the dog barking", "the door closing"]),
        ('Which frame shows "a red car"?', ["a red car"]),
        (
            "What happens right before the scene where Mr. Bean picks up the broom in a room?",
            ["the scene where Mr. Bean picks up the broom in a room"],
        ),
        ("Before the rain starts, who opens the umbrella?", ["the rain starts"]),
        ("Which sentence better captures the essence of the video?", []),
    ],
)
def test_rule_extractor(question, expected):
    keywords = RuleExtractor().extract(question, "generic")
    assert [k.text for k in keywords] == expected
    assert all(question[k.span[0] : k.span[1]] == k.text for k in keywords)


@pytest.mark.parametrize(
    "text, expected",
    [
        ('["a", "b"]', ["a", "b"]),
        ("['the dog', 'the ball']", ["the dog", "the ball"]),
        ("```json\n[]\n```", []),
        ("Keywords: ['x']", ["x"]),
        ("[1, 2]", None),
        ("no list here", None),
        ("[unclosed", None),
    ],
)
def test_parse_keyword_list(text, expected):
    assert parse_keyword_list(text) == expected


def test_llm_extractor_keeps_exact_substrings(caplog):
    question = "What happened after the person took the food?"
    transport = ReplayTransport([(200, load_fixture("http", "extractor_fenced.json"))])
    extractor = LlmExtractor("http://test/chat", "extractor-model", transport=transport)
    with caplog.at_level(logging.WARNING):
        keywords = extractor.extract(question, "mvbench")

    assert [(k.text, k.span) for k in keywords] == [("the person took the food", (20, 44))]
    assert "Dropping keyword 'the person ate the food'" in caplog.text

    system, user = extractor_prompt(PromptProfile(dataset_style="mvbench"), question)
    messages = transport.requests[0]["messages"]
    assert messages[0]["content"] == [{"type": "text", "text": system}]
    assert messages[1]["content"] == [{"type": "text", "text": user}]
    assert transport.requests[0]["temperature"] == 0.0


def test_llm_extractor_unparseable_response_gives_no_keywords(caplog):
    transport = ReplayTransport([(200, load_fixture("http", "extractor_garbage.json"))])
    with caplog.at_level(logging.WARNING):
        keywords = LlmExtractor("http://test/chat", "m", transport=transport).extract("Where is the food?", "unknown-set")
    assert keywords == []
    assert "Unparseable extractor response" in caplog.text


# ############################################################
# VideoLLMs
# ############################################################


def _frames(count: int = 3):
    return [insert_vp(textured_frame(64, 48, seed=i), i, VpConfig(), pad_width=1) for i in range(1, count + 1)]


def test_chat_videollm_request_layout():
    transport = ReplayTransport([(200, load_fixture("http", "chat_answer.json"))])
    model = ChatVideoLlm("http://test/chat", "video-model", "token", max_tokens=32, transport=transport)
    frames = _frames()
    answer = model.answer("system text", "user text", list(reversed(frames)))

    assert answer.startswith("The best answer is: B")
    request = transport.requests[0]
    assert (request["model"], request["max_tokens"], request["temperature"]) == ("video-model", 32, 0.0)
    system, user = request["messages"]
    assert system == {"role": "system", "content": [{"type": "text", "text": "system text"}]}
    assert [part["type"] for part in user["content"]] == ["image", "image", "image", "text"]
    assert user["content"][-1]["text"] == "user text"
    first = base64_to_image(user["content"][0]["image_base64"])
    assert np.array_equal(np.asarray(first), np.asarray(frames[0].pixels))


def test_chat_videollm_interleaves_frame_text():
    model = ChatVideoLlm("http://test/chat", "m", frame_text="interleaved")
    payload = model.build_payload("s", "u", _frames(2))
    parts = payload["messages"][1]["content"]
    assert [p.get("text", p["type"]) for p in parts] == ["frame #1", "image", "frame #2", "image", "u"]


def test_chat_videollm_payload_limit():
    transport = ReplayTransport([])
    model = ChatVideoLlm("http://test/chat", "m", max_payload_bytes=1000, transport=transport)
    with pytest.raises(PayloadTooLargeError) as info:
        model.answer("s", "u", _frames(2))
    assert info.value.frame_count == 2 and info.value.total_bytes > 1000
    assert transport.requests == []


def test_chat_videollm_needs_frames_and_text():
    with pytest.raises(BackendError, match="at least one frame"):
        ChatVideoLlm("http://test/chat", "m").build_payload("s", "u", [])
    model = ChatVideoLlm("http://test/chat", "m", transport=ReplayTransport([(200, {"answer": "B"})]))
    with pytest.raises(BackendError, match="'text'"):
        model.answer("s", "u", _frames(1))


def test_mock_decoder_without_labels():
    frames = [unlabeled_frame(textured_frame(64, 48), 1)]
    assert MockDecoder().answer("s", "Describe the content of frame #1.", frames) == "unknown"
    with pytest.raises(LabelDecodeError):
        MockDecoder(strict=True).answer("s", "Describe the content of frame #1.", frames)


def test_mock_decoder_reads_labels():
    decoder = MockDecoder()
    frames = _frames(3)
    assert [decoder.read_index(frame) for frame in frames] == [1, 2, 3]
    assert decoder.answer("s", "Describe the content of frame #2.", frames) == "The frame shows a plain textured background."
    assert decoder.answer("s", "Describe the content of frame #9.", frames) == "There is no frame #9."
    assert decoder.answer("s", "Which frame number contains the panda?", frames) == "No frame contains the panda."
    assert decoder.answer("s", "What color is the sky?", frames) == "unknown"
