"""Cryptocurrency wallet address validation and encoding.

Supports the address families seen in scam payment instructions: Bitcoin
base58check (P2PKH / P2SH), Bitcoin bech32/bech32m segwit, and Ethereum
hex addresses with optional mixed-case checksum. Every checksummed scheme
is verified, never pattern-matched only — a wallet indicator is worthless
if a single typo'd character passes.

Encoders are included so fixtures and simulations can mint valid addresses.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

from anansi.extract.keccak import keccak256

B58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"
_B58_INDEX = {c: i for i, c in enumerate(B58_ALPHABET)}

BECH32_CHARSET = "qpzry9x8gf2tvdw0s3jn54khce6mua7l"
_BECH32_INDEX = {c: i for i, c in enumerate(BECH32_CHARSET)}
_BECH32M_CONST = 0x2BC830A3

# Mainnet pay-to-pubkey-hash and pay-to-script-hash version bytes.
BASE58_VERSIONS = frozenset({0x00, 0x05})


class WalletScheme(enum.Enum):
    BTC_BASE58CHECK = "btc_base58check"
    BTC_BECH32 = "btc_bech32"
    ETH_HEX = "eth_hex"
    ETH_EIP55 = "eth_eip55"


@dataclass(frozen=True)
class WalletValidity:
    valid: bool
    scheme: WalletScheme | None
    reason: str | None = None

    @classmethod
    def ok(cls, scheme: WalletScheme) -> "WalletValidity":
        return cls(True, scheme)

    @classmethod
    def bad(cls, reason: str, scheme: WalletScheme | None = None) -> "WalletValidity":
        return cls(False, scheme, reason)


# --- base58check ------------------------------------------------------------

def base58_decode(text: str) -> bytes:
    """Decode base58 text to bytes, preserving leading-'1' zero bytes."""
    acc = 0
    for ch in text:
        try:
            acc = acc * 58 + _B58_INDEX[ch]
        except KeyError:
            raise ValueError(f"character {ch!r} not in base58 alphabet") from None
    body = acc.to_bytes((acc.bit_length() + 7) // 8, "big") if acc else b""
    pad = len(text) - len(text.lstrip("1"))
    return b"\x00" * pad + body


def base58_encode(raw: bytes) -> str:
    acc = int.from_bytes(raw, "big")
    out: list[str] = []
    while acc:
        acc, rem = divmod(acc, 58)
        out.append(B58_ALPHABET[rem])
    pad = len(raw) - len(raw.lstrip(b"\x00"))
    return "1" * pad + "".join(reversed(out))


def _checksum4(payload: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(payload).digest()).digest()[:4]


def validate_base58check(candidate: str) -> WalletValidity:
    scheme = WalletScheme.BTC_BASE58CHECK
    try:
        raw = base58_decode(candidate)
    except ValueError:
        return WalletValidity.bad("not base58", scheme)
    if len(raw) != 25:
        return WalletValidity.bad(f"decoded length {len(raw)} != 25", scheme)
    if _checksum4(raw[:21]) != raw[21:]:
        return WalletValidity.bad("checksum mismatch", scheme)
    if raw[0] not in BASE58_VERSIONS:
        return WalletValidity.bad(f"unknown version byte 0x{raw[0]:02x}", scheme)
    return WalletValidity.ok(scheme)


def base58check_encode(version: int, payload: bytes) -> str:
    body = bytes([version]) + payload
    return base58_encode(body + _checksum4(body))


# --- bech32 / bech32m -------------------------------------------------------

def _bech32_polymod(values: list[int]) -> int:
    generator = (0x3B6A57B2, 0x26508E6D, 0x1EA119FA, 0x3D4233DD, 0x2A1462B3)
    chk = 1
    for value in values:
        top = chk >> 25
        chk = (chk & 0x1FFFFFF) << 5 ^ value
        for i in range(5):
            if (top >> i) & 1:
                chk ^= generator[i]
    return chk


def _bech32_hrp_expand(hrp: str) -> list[int]:
    return [ord(c) >> 5 for c in hrp] + [0] + [ord(c) & 31 for c in hrp]


def _convert_bits(data: list[int], from_bits: int, to_bits: int, pad: bool) -> list[int] | None:
    acc = 0
    bits = 0
    out: list[int] = []
    max_val = (1 << to_bits) - 1
    for value in data:
        if value < 0 or value >> from_bits:
            return None
        acc = (acc << from_bits) | value
        bits += from_bits
        while bits >= to_bits:
            bits -= to_bits
            out.append((acc >> bits) & max_val)
    if pad:
        if bits:
            out.append((acc << (to_bits - bits)) & max_val)
    elif bits >= from_bits or ((acc << (to_bits - bits)) & max_val):
        return None
    return out


def validate_bech32(candidate: str, hrp: str = "bc") -> WalletValidity:
    scheme = WalletScheme.BTC_BECH32
    if candidate.lower() != candidate and candidate.upper() != candidate:
        return WalletValidity.bad("mixed case", scheme)
    text = candidate.lower()
    if len(text) > 90:
        return WalletValidity.bad("too long", scheme)
    sep = text.rfind("1")
    if sep < 1 or sep + 7 > len(text):
        return WalletValidity.bad("missing or misplaced separator", scheme)
    got_hrp, data_part = text[:sep], text[sep + 1:]
    if got_hrp != hrp:
        return WalletValidity.bad(f"hrp {got_hrp!r} != {hrp!r}", scheme)
    try:
        data = [_BECH32_INDEX[c] for c in data_part]
    except KeyError:
        return WalletValidity.bad("character outside bech32 charset", scheme)
    const = _bech32_polymod(_bech32_hrp_expand(got_hrp) + data)
    if const == 1:
        encoding = "bech32"
    elif const == _BECH32M_CONST:
        encoding = "bech32m"
    else:
        return WalletValidity.bad("checksum mismatch", scheme)
    payload = data[:-6]
    if not payload:
        return WalletValidity.bad("empty payload", scheme)
    version, program5 = payload[0], payload[1:]
    program = _convert_bits(program5, 5, 8, pad=False)
    if program is None:
        return WalletValidity.bad("invalid program padding", scheme)
    if version > 16:
        return WalletValidity.bad("witness version > 16", scheme)
    if not 2 <= len(program) <= 40:
        return WalletValidity.bad(f"program length {len(program)} outside [2,40]", scheme)
    if version == 0:
        if len(program) not in (20, 32):
            return WalletValidity.bad("v0 program must be 20 or 32 bytes", scheme)
        if encoding != "bech32":
            return WalletValidity.bad("v0 requires bech32 checksum", scheme)
    elif encoding != "bech32m":
        return WalletValidity.bad("v1+ requires bech32m checksum", scheme)
    return WalletValidity.ok(scheme)


def bech32_encode(witness_version: int, program: bytes, hrp: str = "bc") -> str:
    data5 = _convert_bits(list(program), 8, 5, pad=True)
    assert data5 is not None
    payload = [witness_version] + data5
    const = 1 if witness_version == 0 else _BECH32M_CONST
    poly = _bech32_polymod(_bech32_hrp_expand(hrp) + payload + [0] * 6) ^ const
    checksum = [(poly >> 5 * (5 - i)) & 31 for i in range(6)]
    return hrp + "1" + "".join(BECH32_CHARSET[d] for d in payload + checksum)


# --- Ethereum ---------------------------------------------------------------

_HEX_DIGITS = set("0123456789abcdefABCDEF")


def eip55_checksum(hex40: str) -> str:
    """Apply the mixed-case checksum to a 40-char hex address body."""
    lower = hex40.lower()
    digest = keccak256(lower.encode("ascii")).hex()
    chars = [
        c.upper() if c.isalpha() and int(digest[i], 16) >= 8 else c
        for i, c in enumerate(lower)
    ]
    return "".join(chars)


def validate_eth(candidate: str) -> WalletValidity:
    if not candidate.startswith("0x"):
        return WalletValidity.bad("missing 0x prefix", WalletScheme.ETH_HEX)
    body = candidate[2:]
    if len(body) != 40 or any(c not in _HEX_DIGITS for c in body):
        return WalletValidity.bad("not 40 hex characters", WalletScheme.ETH_HEX)
    if body == body.lower() or body == body.upper():
        return WalletValidity.ok(WalletScheme.ETH_HEX)
    if eip55_checksum(body) == body:
        return WalletValidity.ok(WalletScheme.ETH_EIP55)
    return WalletValidity.bad("mixed-case checksum mismatch", WalletScheme.ETH_EIP55)


# --- dispatch ---------------------------------------------------------------

def validate_wallet_address(candidate: str) -> WalletValidity:
    """Classify and checksum-validate a wallet address candidate.

    The verdict never raises; malformed input returns an invalid verdict
    with the rejection reason.
    """
    if not candidate:
        return WalletValidity.bad("empty candidate")
    if candidate[:2] in ("0x", "0X"):
        return validate_eth("0x" + candidate[2:])
    if candidate.lower().startswith("bc1"):
        return validate_bech32(candidate)
    if candidate[0] in "13":
        return validate_base58check(candidate)
    return WalletValidity.bad("unrecognized address shape")
