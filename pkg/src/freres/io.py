"""Bit-exact serialization: latent files, weight files, token-stream text.

File formats (all little-endian, float32 payloads):

``.frl`` latent file
    8-byte magic ``FRERESL1``, then T, H, W, d as uint32, then fps as
    float32 (28-byte header), then T*H*W*d floats in row-major
    [t][row][col][dim] order.

``.frw`` weights file
    8-byte magic ``FRERESW1``, then version (uint32, currently 1) and d
    (uint32), then float32 arrays in this exact order: W_Q, W_K, W_V and
    the adapter matrix (each d*d, row-major), four type-embedding vectors
    (raw_anchor, dynamic_p, summary, static; d each), the two branch gates
    (g_raw, g_freq), layer-norm scale and shift (d each), and ln_eps.

Token-stream export
    One record per line: ``kind gop frame row col coeff e0 e1 ...`` with
    -1 for fields that do not apply to the token kind. Floats are printed
    with 9 significant digits, which round-trips float32 exactly.

Seeded weight generation uses xorshift64* (pure 64-bit shift/xor state
update with a multiplicative output mix), filling W_Q, W_K, W_V and the
adapter in file order, row-major, with uniform(-1, 1)/sqrt(d) draws. The
fill is specified to the bit so independently written readers agree.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadMagic, IoFailure, ShapeMismatch, TruncatedFile
from .model import LatentSequence, Token, TokenKind, TokenStream, validate

__all__ = [
    "LATENT_MAGIC",
    "WEIGHTS_MAGIC",
    "CodecWeights",
    "XorShift64Star",
    "read_latents",
    "write_latents",
    "load_weights",
    "write_weights",
    "seeded_weights",
    "identity_weights",
    "write_tokens",
    "read_tokens",
    "format_tokens",
]

LATENT_MAGIC = b"FRERESL1"
WEIGHTS_MAGIC = b"FRERESW1"
WEIGHTS_VERSION = 1

_MASK64 = (1 << 64) - 1
# Substituted for a zero seed; xorshift state must be nonzero.
_ZERO_SEED_SUB = 0x9E3779B97F4A7C15


class XorShift64Star:
    """Deterministic 64-bit PRNG: xorshift64* (shifts 12/25/27, odd multiplier)."""

    MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self._s = seed & _MASK64
        if self._s == 0:
            self._s = _ZERO_SEED_SUB

    def next_u64(self) -> int:
        s = self._s
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self._s = s
        return (s * self.MULT) & _MASK64

    def uniform_signed(self) -> float:
        """Uniform draw in [-1, 1), from the top 53 bits."""
        return (self.next_u64() >> 11) / float(1 << 53) * 2.0 - 1.0

    def fill(self, shape, scale: float) -> np.ndarray:
        out = np.empty(int(np.prod(shape)), dtype=np.float32)
        for i in range(out.size):
            out[i] = np.float32(self.uniform_signed() * scale)
        return out.reshape(shape)


@dataclass(frozen=True)
class CodecWeights:
    """Full weight bundle: projections, adapter, type embeddings, gates, layer norm."""

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    adapter: np.ndarray
    type_embeddings: np.ndarray  # (4, d), in TokenKind declaration order
    g_raw: float
    g_freq: float
    ln_scale: np.ndarray
    ln_shift: np.ndarray
    ln_eps: float

    def __post_init__(self):
        d = self.w_q.shape[0]
        for name in ("w_q", "w_k", "w_v", "adapter"):
            m = getattr(self, name)
            if m.shape != (d, d):
                raise ShapeMismatch(f"{name} must be ({d}, {d}), got {m.shape}")
        if self.type_embeddings.shape != (len(TokenKind), d):
            raise ShapeMismatch(
                f"type embeddings must be ({len(TokenKind)}, {d}), got {self.type_embeddings.shape}"
            )
        if self.ln_scale.shape != (d,) or self.ln_shift.shape != (d,):
            raise ShapeMismatch("layer-norm vectors must have length d")
        # Scalars live as float32 on disk; normalize now so a bundle equals
        # its own round trip bit for bit.
        for name in ("g_raw", "g_freq", "ln_eps"):
            object.__setattr__(self, name, float(np.float32(getattr(self, name))))

    @property
    def dim(self) -> int:
        return self.w_q.shape[0]

    def type_embedding(self, kind: TokenKind) -> np.ndarray:
        return self.type_embeddings[list(TokenKind).index(kind)]


def _f32(x) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(x, dtype="<f4"))


def write_latents(seq: LatentSequence, path) -> None:
    """Serialize a validated sequence; read_latents(write_latents(s)) == s bit-exactly."""
    validate(seq)
    t, d = seq.num_frames, seq.dim
    h, w = seq.grid
    header = LATENT_MAGIC + struct.pack("<IIIIf", t, h, w, d, float(seq.fps))
    try:
        with open(path, "wb") as f:
            f.write(header)
            f.write(_f32(seq.frames).tobytes())
    except OSError as e:
        raise IoFailure(str(e)) from e


def read_latents(path) -> LatentSequence:
    """Read and validate a .frl latent file."""
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise IoFailure(str(e)) from e
    if len(raw) < 28:
        raise TruncatedFile(f"{path}: only {len(raw)} bytes, header needs 28")
    if raw[:8] != LATENT_MAGIC:
        raise BadMagic(f"{path}: expected {LATENT_MAGIC!r}, got {raw[:8]!r}")
    t, h, w, d, fps = struct.unpack("<IIIIf", raw[8:28])
    if min(t, h, w, d) == 0:
        raise ShapeMismatch(f"{path}: zero dimension in header (T={t}, H={h}, W={w}, d={d})")
    need = 28 + 4 * t * h * w * d
    if len(raw) < need:
        raise TruncatedFile(f"{path}: {len(raw)} bytes, header declares {need}")
    frames = np.frombuffer(raw[28:need], dtype="<f4").reshape(t, h, w, d)
    seq = LatentSequence(frames=frames, fps=fps)
    validate(seq)
    return seq


def write_weights(w: CodecWeights, path) -> None:
    d = w.dim
    header = WEIGHTS_MAGIC + struct.pack("<II", WEIGHTS_VERSION, d)
    parts = [
        _f32(w.w_q), _f32(w.w_k), _f32(w.w_v), _f32(w.adapter),
        _f32(w.type_embeddings),
        _f32([w.g_raw, w.g_freq]),
        _f32(w.ln_scale), _f32(w.ln_shift),
        _f32([w.ln_eps]),
    ]
    try:
        with open(path, "wb") as f:
            f.write(header)
            for p in parts:
                f.write(p.tobytes())
    except OSError as e:
        raise IoFailure(str(e)) from e


def load_weights(path, dim: int | None = None) -> CodecWeights:
    """Load a .frw file; if ``dim`` is given, mismatched width raises ShapeMismatch."""
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise IoFailure(str(e)) from e
    if len(raw) < 16:
        raise TruncatedFile(f"{path}: only {len(raw)} bytes, header needs 16")
    if raw[:8] != WEIGHTS_MAGIC:
        raise BadMagic(f"{path}: expected {WEIGHTS_MAGIC!r}, got {raw[:8]!r}")
    version, d = struct.unpack("<II", raw[8:16])
    if version != WEIGHTS_VERSION:
        raise BadMagic(f"{path}: unsupported weights version {version}")
    if d == 0:
        raise ShapeMismatch(f"{path}: zero embedding width in header")
    if dim is not None and d != dim:
        raise ShapeMismatch(f"{path}: weights are for d={d}, sequence has d={dim}")
    nk = len(TokenKind)
    count = 4 * d * d + nk * d + 2 + 2 * d + 1
    need = 16 + 4 * count
    if len(raw) < need:
        raise TruncatedFile(f"{path}: {len(raw)} bytes, header declares {need}")
    flat = np.frombuffer(raw[16:need], dtype="<f4")
    pos = 0

    def take(n, shape):
        nonlocal pos
        out = flat[pos:pos + n].reshape(shape)
        pos += n
        return out

    w_q = take(d * d, (d, d))
    w_k = take(d * d, (d, d))
    w_v = take(d * d, (d, d))
    adapter = take(d * d, (d, d))
    type_emb = take(nk * d, (nk, d))
    gates = take(2, (2,))
    ln_scale = take(d, (d,))
    ln_shift = take(d, (d,))
    ln_eps = float(take(1, (1,))[0])
    return CodecWeights(
        w_q=w_q, w_k=w_k, w_v=w_v, adapter=adapter, type_embeddings=type_emb,
        g_raw=float(gates[0]), g_freq=float(gates[1]),
        ln_scale=ln_scale, ln_shift=ln_shift, ln_eps=ln_eps,
    )


def seeded_weights(seed: int, dim: int) -> CodecWeights:
    """Deterministic weights from a 64-bit seed, identical on every platform.

    Projections and the adapter are filled row-major, in file order, with
    uniform(-1, 1)/sqrt(d) draws from xorshift64*. Type embeddings start at
    zero and the gates at 1 so an untrained codec passes content through
    unscaled and analyzable.
    """
    rng = XorShift64Star(seed)
    scale = 1.0 / float(np.sqrt(dim))
    w_q = rng.fill((dim, dim), scale)
    w_k = rng.fill((dim, dim), scale)
    w_v = rng.fill((dim, dim), scale)
    adapter = rng.fill((dim, dim), scale)
    return CodecWeights(
        w_q=w_q, w_k=w_k, w_v=w_v, adapter=adapter,
        type_embeddings=np.zeros((len(TokenKind), dim), dtype=np.float32),
        g_raw=1.0, g_freq=1.0,
        ln_scale=np.ones(dim, dtype=np.float32),
        ln_shift=np.zeros(dim, dtype=np.float32),
        ln_eps=1e-5,
    )


def identity_weights(dim: int) -> CodecWeights:
    """Identity projections/adapter, zero type embeddings, unit gates."""
    eye = np.eye(dim, dtype=np.float32)
    return CodecWeights(
        w_q=eye, w_k=eye.copy(), w_v=eye.copy(), adapter=eye.copy(),
        type_embeddings=np.zeros((len(TokenKind), dim), dtype=np.float32),
        g_raw=1.0, g_freq=1.0,
        ln_scale=np.ones(dim, dtype=np.float32),
        ln_shift=np.zeros(dim, dtype=np.float32),
        ln_eps=1e-5,
    )


def _fmt_f32(x: np.float32) -> str:
    # 9 significant digits uniquely identify a float32.
    return format(float(x), ".9g")


def format_tokens(stream: TokenStream, dim: int) -> str:
    """Render a token stream as line-delimited text records."""
    lines = [
        "# freres tokens v1",
        f"# dim={dim}",
        "# counts "
        + " ".join(f"{k.value}={stream.count(k)}" for k in TokenKind),
        "# schema: kind gop frame row col coeff e0 e1 ...",
    ]
    for t in stream.tokens:
        head = f"{t.kind.value} {t.gop} {t.frame} {t.row} {t.col} {t.coeff}"
        emb = " ".join(_fmt_f32(v) for v in t.embedding)
        lines.append(f"{head} {emb}")
    return "\n".join(lines) + "\n"


def write_tokens(stream: TokenStream, dim: int, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_tokens(stream, dim))
    except OSError as e:
        raise IoFailure(str(e)) from e


def read_tokens(path) -> TokenStream:
    """Parse a token-stream text file back into a TokenStream."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise IoFailure(str(e)) from e
    kinds = {k.value: k for k in TokenKind}
    tokens = []
    for line in lines:
        if not line or line.startswith("#"):
            continue
        parts = line.split(" ")
        if len(parts) < 7:
            raise TruncatedFile(f"token record too short: {line!r}")
        kind = kinds.get(parts[0])
        if kind is None:
            raise BadMagic(f"unknown token kind {parts[0]!r}")
        gop, frame, row, col, coeff = (int(p) for p in parts[1:6])
        emb = np.array([np.float32(p) for p in parts[6:]], dtype=np.float32)
        tokens.append(
            Token(kind=kind, embedding=emb, gop=gop, frame=frame, row=row, col=col, coeff=coeff)
        )
    return TokenStream.from_tokens(tokens)
