"""One-shot BLAKE3 (plain hash mode) with extendable output.

Vendored because no compiled binding is installable in the target
environment. Correctness is pinned by tests/data/blake3_vectors.json,
generated with the reference Rust implementation; the test suite fails
loudly if this file ever drifts from it.

The compression function is vectorized with numpy across whatever is
independent at each stage: all full chunks advance together one block at a
time, each parent level is compressed as one batch, and all requested
output blocks are produced in a single call. Only the final (possibly
partial) chunk runs with a single lane.
"""

from __future__ import annotations

import numpy as np

_IV = np.array(
    [0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A,
     0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19],
    dtype=np.uint32,
)
_PERM = np.array([2, 6, 3, 10, 7, 0, 4, 13, 1, 11, 12, 5, 9, 14, 15, 8],
                 dtype=np.intp)

_CHUNK_LEN = 1024
_BLOCK_LEN = 64

_CHUNK_START = 1
_CHUNK_END = 2
_PARENT = 4
_ROOT = 8


def _rotr(x, r: int):
    # uint32 lanes; numpy drops the overflowed bits of the left shift
    return (x >> r) | (x << (32 - r))


def _g(v, a: int, b: int, c: int, d: int, mx, my) -> None:
    v[a] += v[b] + mx
    v[d] = _rotr(v[d] ^ v[a], 16)
    v[c] += v[d]
    v[b] = _rotr(v[b] ^ v[c], 12)
    v[a] += v[b] + my
    v[d] = _rotr(v[d] ^ v[a], 8)
    v[c] += v[d]
    v[b] = _rotr(v[b] ^ v[c], 7)


def _compress(h, m, counter, block_len, flags):
    """Full 16-word compression output for a batch of lanes.

    h: (8, L) input chaining values; m: (16, L) message words;
    counter: scalar or (L,) uint64; block_len, flags: scalar or (L,).
    """
    lanes = m.shape[1]
    v = np.empty((16, lanes), dtype=np.uint32)
    v[0:8] = h
    v[8:12] = _IV[0:4, None]
    counter = np.asarray(counter, dtype=np.uint64)
    v[12] = (counter & np.uint64(0xFFFFFFFF)).astype(np.uint32)
    v[13] = (counter >> np.uint64(32)).astype(np.uint32)
    v[14] = block_len
    v[15] = flags
    msg = m
    for rnd in range(7):
        _g(v, 0, 4, 8, 12, msg[0], msg[1])
        _g(v, 1, 5, 9, 13, msg[2], msg[3])
        _g(v, 2, 6, 10, 14, msg[4], msg[5])
        _g(v, 3, 7, 11, 15, msg[6], msg[7])
        _g(v, 0, 5, 10, 15, msg[8], msg[9])
        _g(v, 1, 6, 11, 12, msg[10], msg[11])
        _g(v, 2, 7, 8, 13, msg[12], msg[13])
        _g(v, 3, 4, 9, 14, msg[14], msg[15])
        if rnd < 6:
            msg = msg[_PERM]
    out = np.empty((16, lanes), dtype=np.uint32)
    out[0:8] = v[0:8] ^ v[8:16]
    out[8:16] = v[8:16] ^ h
    return out


def _full_chunk_cvs(data: bytes, nchunks: int):
    """Chain values for nchunks consecutive full chunks starting at index 0."""
    words = np.frombuffer(data, dtype="<u4").astype(np.uint32, copy=False)
    words = words.reshape(nchunks, 256)
    h = np.broadcast_to(_IV[:, None], (8, nchunks))
    counter = np.arange(nchunks, dtype=np.uint64)
    for b in range(16):
        m = np.ascontiguousarray(words[:, 16 * b:16 * b + 16].T)
        flags = _CHUNK_START if b == 0 else 0
        if b == 15:
            flags |= _CHUNK_END
        h = _compress(h, m, counter, _BLOCK_LEN, flags)[0:8]
    return h


def _final_chunk(data: bytes, chunk_index: int, is_root: bool):
    """Process the last chunk (0..1024 bytes).

    Returns its chaining value, or, when this chunk is the whole tree, the
    root output node (h, m, block_len, flags) left unfinalized for the XOF.
    """
    n = len(data)
    nblocks = max(1, -(-n // _BLOCK_LEN))
    padded = data.ljust(nblocks * _BLOCK_LEN, b"\x00")
    words = np.frombuffer(padded, dtype="<u4").astype(np.uint32, copy=False)
    words = words.reshape(nblocks, 16)
    h = _IV[:, None].copy()
    for b in range(nblocks):
        m = np.ascontiguousarray(words[b][:, None])
        flags = _CHUNK_START if b == 0 else 0
        if b == nblocks - 1:
            block_len = n - _BLOCK_LEN * (nblocks - 1)
            flags |= _CHUNK_END
            if is_root:
                return h, m, block_len, flags | _ROOT
        else:
            block_len = _BLOCK_LEN
        h = _compress(h, m, np.uint64(chunk_index), block_len, flags)[0:8]
    return h


def _root_node(cvs):
    """Reduce chunk chain values pairwise to the root parent node.

    Odd leftovers are promoted to the next level unchanged, which yields the
    same tree shape as the reference left-subtree splitting rule.
    """
    while cvs.shape[1] > 2:
        pairs = cvs.shape[1] // 2
        m = np.empty((16, pairs), dtype=np.uint32)
        m[0:8] = cvs[:, 0:2 * pairs:2]
        m[8:16] = cvs[:, 1:2 * pairs:2]
        h = np.broadcast_to(_IV[:, None], (8, pairs))
        out = _compress(h, m, 0, _BLOCK_LEN, _PARENT)[0:8]
        if cvs.shape[1] % 2:
            out = np.concatenate([out, cvs[:, -1:]], axis=1)
        cvs = out
    m = np.empty((16, 1), dtype=np.uint32)
    m[0:8] = cvs[:, 0:1]
    m[8:16] = cvs[:, 1:2]
    return _IV[:, None].copy(), m, _BLOCK_LEN, _PARENT | _ROOT


def _extend(node, out_len: int) -> bytes:
    """Run the root compression once per 64-byte output block."""
    h, m, block_len, flags = node
    nblocks = -(-out_len // _BLOCK_LEN)
    counter = np.arange(nblocks, dtype=np.uint64)
    out = _compress(
        np.broadcast_to(h, (8, nblocks)),
        np.broadcast_to(m, (16, nblocks)),
        counter, block_len, flags,
    )
    return out.T.astype("<u4").tobytes()[:out_len]


def blake3_digest(data: bytes, out_len: int = 32) -> bytes:
    """BLAKE3 hash of data, extended to out_len bytes."""
    if out_len < 1:
        raise ValueError("out_len must be at least 1")
    n = len(data)
    nchunks = max(1, -(-n // _CHUNK_LEN))
    if nchunks == 1:
        return _extend(_final_chunk(data, 0, True), out_len)
    boundary = (nchunks - 1) * _CHUNK_LEN
    cvs = _full_chunk_cvs(data[:boundary], nchunks - 1)
    last = _final_chunk(data[boundary:], nchunks - 1, False)
    return _extend(_root_node(np.concatenate([cvs, last], axis=1)), out_len)
