"""Python access to the smart house remote-control core."""

from ._smarthouse import (
    AuthRefused,
    Client,
    CodecError,
    HomeServer,
    IconRecord,
    MapScene,
    NetworkError,
    Point,
    Polyline,
    RecordError,
    Rgb,
    StoreError,
    ValidationError,
    WireError,
    compute_credential_hash,
    decode_scene,
    demo_store,
    encode_scene,
    hit_test,
    is_magic_hex,
    pack_header,
    render_ascii,
    seal_magic,
    unpack_header,
    unseal_magic,
    validate_device,
)

__all__ = [name for name in dir() if not name.startswith("_")]
