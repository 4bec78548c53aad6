"""Pure-Python Keccak-256 (original pad10*1 with 0x01 domain byte).

This is the legacy Keccak used for Ethereum address checksums, NOT the
NIST SHA-3 variant exposed by hashlib (which pads with 0x06). Implemented
here so wallet validation has no native or network dependency.
"""

_MASK = (1 << 64) - 1

_ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
    0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
    0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
    0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
    0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
    0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
    0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# Rotation offset for flat lane index x + 5y.
_ROTC = (
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
)

# Destination index of the pi step for flat lane index x + 5y.
def _pi_dest(i: int) -> int:
    x, y = i % 5, i // 5
    return ((2 * x + 3 * y) % 5) * 5 + y


_PI = tuple(_pi_dest(i) for i in range(25))

_RATE = 136  # 1088-bit rate / 512-bit capacity


def _permute(state: list[int]) -> None:
    for rc in _ROUND_CONSTANTS:
        # theta
        c = [state[x] ^ state[x + 5] ^ state[x + 10] ^ state[x + 15] ^ state[x + 20]
             for x in range(5)]
        for x in range(5):
            t = c[(x - 1) % 5] ^ (((c[(x + 1) % 5] << 1) | (c[(x + 1) % 5] >> 63)) & _MASK)
            for y in range(0, 25, 5):
                state[x + y] ^= t
        # rho + pi
        b = [0] * 25
        for i in range(25):
            lane = state[i]
            r = _ROTC[i]
            b[_PI[i]] = ((lane << r) | (lane >> (64 - r))) & _MASK if r else lane
        # chi
        for y in range(0, 25, 5):
            row = b[y:y + 5]
            for x in range(5):
                state[y + x] = row[x] ^ ((~row[(x + 1) % 5]) & row[(x + 2) % 5])
        # iota
        state[0] ^= rc


def keccak256(data: bytes) -> bytes:
    """Digest `data` with Keccak-256 and return the 32-byte hash."""
    buf = bytearray(data)
    buf.append(0x01)
    buf.extend(b"\x00" * (-len(buf) % _RATE))
    buf[-1] |= 0x80

    state = [0] * 25
    for offset in range(0, len(buf), _RATE):
        for lane in range(_RATE // 8):
            pos = offset + lane * 8
            state[lane] ^= int.from_bytes(buf[pos:pos + 8], "little")
        _permute(state)
    return b"".join(state[i].to_bytes(8, "little") for i in range(4))
