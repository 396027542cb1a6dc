"""Sidecar test fixtures: a tiny deterministic encoder built on the fly.

No model downloads: a small WordPiece vocabulary and a seeded random-weight
encoder are materialized into a temp directory once per session. Inference
with random weights is still deterministic, which is all the protocol
contract needs.
"""
import pytest
import torch
from fastapi.testclient import TestClient
from transformers import BertConfig, BertModel, BertTokenizer

from navscore_sidecar import SidecarConfig, TokenEmbedder, create_app

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "turn", "left", "right", "walk", "forward", "go", "straight", "back",
    "up", "down", "stop", "around", "ahead", "behind",
    "the", "at", "and", "then", "to", "a", "of", "past", "near",
    "table", "door", "stairs", "counter", "window", "bar", "shelf",
    "pillar", "hall", "exit",
    "##ing", "##s", "##ed", "##er",
]


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("tiny_encoder")
    (path / "vocab.txt").write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(str(path / "vocab.txt"))
    torch.manual_seed(20260819)
    config = BertConfig(
        vocab_size=len(VOCAB), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64,
        max_position_embeddings=64,
    )
    model = BertModel(config)
    model.eval()
    tokenizer.save_pretrained(path)
    model.save_pretrained(path)
    return path


@pytest.fixture(scope="session")
def config(model_dir):
    return SidecarConfig(model=str(model_dir), batch_size=4, max_tokens=16)


@pytest.fixture(scope="session")
def embedder(config):
    return TokenEmbedder(config.model, batch_size=config.batch_size,
                         max_tokens=config.max_tokens)


@pytest.fixture(scope="session")
def client(config, embedder):
    with TestClient(create_app(config, embedder)) as client:
        yield client


_criterion_lines: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion verdict and fail the test if unmet."""

    def _report(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _criterion_lines.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
