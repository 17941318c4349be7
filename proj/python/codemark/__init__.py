"""Python bindings for the codemark watermarking core."""

from pathlib import Path

from ._codemark import (
    PROTOCOL_VERSION,
    EmbedConfig,
    Error,
    ProtocolServer,
    Vocabulary,
    attack,
    detect,
    embed,
    embed_mock,
    encode_user_id,
)

_DATA = Path(__file__).parent / "data"


def default_vocab() -> Vocabulary:
    """The bundled Python-flavoured vocabulary."""
    return Vocabulary.load(str(_DATA / "python_vocab.tsv"))


__all__ = [
    "PROTOCOL_VERSION",
    "EmbedConfig",
    "Error",
    "ProtocolServer",
    "Vocabulary",
    "attack",
    "default_vocab",
    "detect",
    "embed",
    "embed_mock",
    "encode_user_id",
]
