"""Independent reference decoders used only to cross-check the package.

Deliberately written as a second implementation: big-int base58 decode,
5x5-matrix Keccak, and the textbook bech32 routine. Keep these free of any
imports from anansi.
"""

import hashlib

_B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def ref_base58check(addr: str) -> tuple[bool, str]:
    n = 0
    for ch in addr:
        if ch not in _B58:
            return False, "alphabet"
        n = n * 58 + _B58.index(ch)
    raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    pad = 0
    for ch in addr:
        if ch != "1":
            break
        pad += 1
    raw = b"\x00" * pad + raw
    if len(raw) != 25:
        return False, "length"
    if hashlib.sha256(hashlib.sha256(raw[:21]).digest()).digest()[:4] != raw[21:]:
        return False, "checksum"
    if raw[0] not in (0x00, 0x05):
        return False, "version"
    return True, "ok"


_CHARSET = "qpzry9x8gf2tvdw0s3jn54khce6mua7l"


def _polymod(values):
    gen = [0x3B6A57B2, 0x26508E6D, 0x1EA119FA, 0x3D4233DD, 0x2A1462B3]
    chk = 1
    for v in values:
        b = chk >> 25
        chk = (chk & 0x1FFFFFF) << 5 ^ v
        for i in range(5):
            chk ^= gen[i] if ((b >> i) & 1) else 0
    return chk


def _hrp_expand(hrp):
    return [ord(x) >> 5 for x in hrp] + [0] + [ord(x) & 31 for x in hrp]


def ref_bech32(addr: str) -> tuple[bool, str]:
    if addr.lower() != addr and addr.upper() != addr:
        return False, "mixed-case"
    a = addr.lower()
    pos = a.rfind("1")
    if pos < 1 or pos + 7 > len(a) or len(a) > 90:
        return False, "format"
    hrp, data_part = a[:pos], a[pos + 1:]
    if hrp != "bc":
        return False, "hrp"
    if any(c not in _CHARSET for c in data_part):
        return False, "charset"
    data = [_CHARSET.index(c) for c in data_part]
    const = _polymod(_hrp_expand(hrp) + data)
    if const == 1:
        enc = "bech32"
    elif const == 0x2BC830A3:
        enc = "bech32m"
    else:
        return False, "checksum"
    if len(data) < 7:
        return False, "short"
    ver, rest = data[0], data[1:-6]
    acc = bits = 0
    prog = []
    for v in rest:
        acc = (acc << 5) | v
        bits += 5
        if bits >= 8:
            bits -= 8
            prog.append((acc >> bits) & 255)
    if bits >= 5 or (bits and (acc << (8 - bits)) & 255):
        return False, "padding"
    if ver > 16 or not 2 <= len(prog) <= 40:
        return False, "program"
    if ver == 0 and len(prog) not in (20, 32):
        return False, "v0-length"
    if ver == 0 and enc != "bech32":
        return False, "v0-encoding"
    if ver > 0 and enc != "bech32m":
        return False, "v1-encoding"
    return True, "ok"


# 5x5 matrix Keccak-256, structured per the permutation's step functions.

_RC = [
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
]
_ROT = [
    [0, 36, 3, 41, 18],
    [1, 44, 10, 45, 2],
    [62, 6, 43, 15, 61],
    [28, 55, 25, 21, 56],
    [27, 20, 39, 8, 14],
]
_M64 = (1 << 64) - 1


def _rol(v, n):
    n %= 64
    return ((v << n) | (v >> (64 - n))) & _M64 if n else v


def _keccak_f(a):
    for rc in _RC:
        c = [a[x][0] ^ a[x][1] ^ a[x][2] ^ a[x][3] ^ a[x][4] for x in range(5)]
        d = [c[(x - 1) % 5] ^ _rol(c[(x + 1) % 5], 1) for x in range(5)]
        a = [[a[x][y] ^ d[x] for y in range(5)] for x in range(5)]
        b = [[0] * 5 for _ in range(5)]
        for x in range(5):
            for y in range(5):
                b[y][(2 * x + 3 * y) % 5] = _rol(a[x][y], _ROT[x][y])
        a = [[b[x][y] ^ ((~b[(x + 1) % 5][y]) & b[(x + 2) % 5][y]) for y in range(5)]
             for x in range(5)]
        a[0][0] ^= rc
    return a


def ref_keccak256(data: bytes) -> bytes:
    rate = 136
    padded = bytearray(data)
    padded.append(0x01)
    while len(padded) % rate:
        padded.append(0x00)
    padded[-1] |= 0x80
    a = [[0] * 5 for _ in range(5)]
    for off in range(0, len(padded), rate):
        block = padded[off:off + rate]
        for i in range(rate // 8):
            a[i % 5][i // 5] ^= int.from_bytes(block[i * 8:(i + 1) * 8], "little")
        a = _keccak_f(a)
    return b"".join(a[i % 5][i // 5].to_bytes(8, "little") for i in range(4))


def ref_eip55(addr: str) -> tuple[bool, str]:
    if not addr.startswith("0x") or len(addr) != 42:
        return False, "shape"
    body = addr[2:]
    try:
        int(body, 16)
    except ValueError:
        return False, "hex"
    if body == body.lower() or body == body.upper():
        return True, "uncased"
    digest = ref_keccak256(body.lower().encode()).hex()
    for i, ch in enumerate(body):
        if ch.isalpha():
            want_upper = int(digest[i], 16) >= 8
            if ch.isupper() != want_upper:
                return False, "checksum"
    return True, "eip55"


def ref_validate(addr: str) -> bool:
    """Combined reference verdict for any supported address family."""
    if addr.startswith("0x") or addr.startswith("0X"):
        return ref_eip55("0x" + addr[2:])[0]
    if addr.lower().startswith("bc1"):
        return ref_bech32(addr)[0]
    if addr[:1] in ("1", "3"):
        return ref_base58check(addr)[0]
    return False
