import json
from pathlib import Path

import pytest

import codemark

TEMPLATES = sorted((Path(__file__).resolve().parents[2] / "data" / "templates").glob("*.py"))


@pytest.fixture(scope="module")
def vocab():
    return codemark.default_vocab()


def test_vocab_round_trip(vocab):
    code = "def f(x):\n    return x\n"
    ids = vocab.tokenize(code)
    assert vocab.detokenize(ids) == code
    assert vocab.find("\n") is not None
    assert vocab.find("no such token here") is None


def test_embed_then_detect(vocab):
    cfg = codemark.EmbedConfig()
    hits = 0
    for seed, path in enumerate(TEMPLATES):
        r = codemark.embed_mock(vocab, "1234", cfg, kind="code-template", provider_seed=seed + 1,
                                template_code=path.read_text())
        if r["status"] != "complete":
            continue
        d = codemark.detect(r["code"], vocab, cfg)
        assert d["detected"]
        assert d["user_id"] == 1234
        hits += 1
    assert hits > 0


def test_python_callable_as_model(vocab):
    nl = vocab.find("\n")
    x = vocab.find("x")

    def next_probs(generated):
        if len(generated) >= 40:
            return None
        p = [0.1 / (len(vocab) - 1)] * len(vocab)
        p[nl if len(generated) % 5 == 4 else x] = 0.9
        return p

    cfg = codemark.EmbedConfig()
    r = codemark.embed(vocab, "7", cfg, next_probs)
    assert len(r["tokens"]) == 40
    cfg.watermark = False
    plain = codemark.embed(vocab, "7", cfg, next_probs)
    assert plain["status"] == "none"


def test_bad_config_raises(vocab):
    cfg = codemark.EmbedConfig()
    cfg.gamma = 1.5
    with pytest.raises(codemark.Error):
        cfg.validate(len(vocab))
    with pytest.raises(ValueError):
        cfg.hash_mode = "spinning"


def test_attack_and_protocol(vocab):
    out, noop = codemark.attack("x = 1\ny = 2  # two\n", "modify-comments", 3)
    assert not noop and out != "x = 1\ny = 2  # two\n"

    server = codemark.ProtocolServer(vocab)
    ack = json.loads(server.handle(json.dumps(
        {"type": "hello", "version": codemark.PROTOCOL_VERSION, "vocab_size": len(vocab), "payload": 5})))
    assert ack["type"] == "hello-ack" and server.in_session
    bad = json.loads(server.handle("not json"))
    assert bad["type"] == "error" and bad["code"] == "malformed"
    fin = json.loads(server.handle(json.dumps({"type": "finish", "version": 1})))
    assert fin["status"] == "none" and not server.in_session
