"""Wallet ledger tracing and USD loss attribution.

Inbound transfers are bucketed so nothing is double counted: transfers
between dataset wallets are internal, inbounds matched by a same-day
outbound of similar amount to a different address are refunds, and the
remainder is kept as revenue. Amounts stay exact integers in smallest
units (satoshi / wei); USD conversion happens in Decimal and rounds
half-even to cents only at the end.

Refund matching maximizes the number of matched pairs per UTC day (ties:
smallest total amount difference, then earliest outbound), so the result
agrees with an exhaustive matcher on small ledgers instead of depending
on greedy scan order.
"""

from __future__ import annotations

import enum
import json
import statistics
from dataclasses import dataclass
from datetime import date, datetime, timezone
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Protocol

from anansi.extract.wallets import validate_wallet_address


class FinanceError(Exception):
    pass


class ProviderUnavailable(FinanceError):
    pass


class UnknownWallet(FinanceError):
    pass


class MissingRate(FinanceError):
    pass


class Asset(str, enum.Enum):
    BTC = "BTC"
    ETH = "ETH"


UNIT_SCALE = {Asset.BTC: 10**8, Asset.ETH: 10**18}


class Direction(str, enum.Enum):
    INBOUND = "inbound"
    OUTBOUND = "outbound"


@dataclass(frozen=True)
class ChainTx:
    txid: str
    wallet: str
    direction: Direction
    counterparty: str
    amount: int                    # smallest units, > 0
    timestamp: datetime            # UTC
    asset: Asset

    def __post_init__(self):
        if self.amount <= 0:
            raise ValueError("amount must be positive")
        if self.counterparty == self.wallet:
            raise ValueError("counterparty must differ from wallet")

    @property
    def day(self) -> date:
        return self.timestamp.astimezone(timezone.utc).date()

    def to_dict(self) -> dict:
        return {
            "txid": self.txid,
            "wallet": self.wallet,
            "direction": self.direction.value,
            "counterparty": self.counterparty,
            "amount": str(self.amount),
            "timestamp": self.timestamp.astimezone(timezone.utc).isoformat(),
            "asset": self.asset.value,
        }

    @classmethod
    def from_dict(cls, row: dict) -> "ChainTx":
        stamp = datetime.fromisoformat(str(row["timestamp"]).replace("Z", "+00:00"))
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        return cls(
            txid=row["txid"],
            wallet=row["wallet"],
            direction=Direction(row["direction"]),
            counterparty=row["counterparty"],
            amount=int(row["amount"]),
            timestamp=stamp.astimezone(timezone.utc),
            asset=Asset(row["asset"]),
        )


class LedgerProvider(Protocol):
    def transactions(self, wallet: str) -> list[ChainTx]: ...


class FixtureLedgerProvider:
    """Chain data from JSON-lines files (one ChainTx per line)."""

    def __init__(self, path: str | Path):
        root = Path(path)
        if not root.exists():
            raise ProviderUnavailable(str(root))
        files = sorted(root.glob("*.jsonl")) if root.is_dir() else [root]
        self._by_wallet: dict[str, list[ChainTx]] = {}
        for file in files:
            for line in file.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                tx = ChainTx.from_dict(json.loads(line))
                self._by_wallet.setdefault(tx.wallet, []).append(tx)

    def wallets(self) -> list[str]:
        return sorted(self._by_wallet)

    def transactions(self, wallet: str) -> list[ChainTx]:
        try:
            return list(self._by_wallet[wallet])
        except KeyError:
            raise UnknownWallet(wallet) from None


@dataclass(frozen=True)
class TimeWindow:
    start: datetime | None = None
    end: datetime | None = None

    def contains(self, when: datetime) -> bool:
        if self.start and when < self.start:
            return False
        if self.end and when > self.end:
            return False
        return True


def fetch_ledger(
    wallet: str,
    provider: LedgerProvider,
    window: TimeWindow | None = None,
) -> list[ChainTx]:
    """All transfers touching `wallet` inside the window, time-ordered."""
    verdict = validate_wallet_address(wallet)
    if not verdict.valid:
        raise ValueError(f"invalid wallet address {wallet!r}: {verdict.reason}")
    txs = provider.transactions(wallet)
    if window is not None:
        txs = [tx for tx in txs if window.contains(tx.timestamp)]
    return sorted(txs, key=lambda tx: (tx.timestamp, tx.txid))


# --- refund matching ----------------------------------------------------------

@dataclass(frozen=True)
class RefundPair:
    inbound: ChainTx
    outbound: ChainTx


@dataclass
class NetResult:
    kept: list[ChainTx]
    refunds: list[RefundPair]
    internal: list[ChainTx]
    residual_outbound: list[ChainTx]

    def all_buckets(self) -> list[ChainTx]:
        out = list(self.kept) + list(self.internal) + list(self.residual_outbound)
        for pair in self.refunds:
            out.extend((pair.inbound, pair.outbound))
        return out


def _within_tolerance(inbound: ChainTx, outbound: ChainTx, tolerance: Fraction) -> bool:
    diff = abs(inbound.amount - outbound.amount)
    return diff * tolerance.denominator <= inbound.amount * tolerance.numerator


# Days larger than this fall back to greedy closest-amount matching; the
# exact search's memo is bounded by C(|outbounds|, |inbounds|) states, tiny
# at 20 transfers but explosive for pathological hundred-transfer days.
# Must stay >= 20 so any ledger of 20 transfers takes the exact path.
EXACT_COMPONENT_LIMIT = 20


def _match_component(
    inbounds: list[ChainTx],
    outbounds: list[ChainTx],
    edges: dict[int, list[int]],
) -> list[tuple[int, int]]:
    """Best matching for one feasibility component.

    Objective: most pairs, then smallest total |amount difference|, then
    lexicographically earliest (inbound, outbound) index pairs.
    """
    if len(inbounds) + len(outbounds) <= EXACT_COMPONENT_LIMIT:
        best: dict = {}

        def search(idx: int, used: frozenset[int]) -> tuple[int, int, tuple]:
            if idx == len(inbounds):
                return (0, 0, ())
            state = (idx, used)
            if state in best:
                return best[state]
            # skip this inbound
            count, diff, chosen = search(idx + 1, used)
            result = (count, diff, chosen)
            for o_idx in edges.get(idx, ()):
                if o_idx in used:
                    continue
                sub = search(idx + 1, used | {o_idx})
                pair_diff = abs(inbounds[idx].amount - outbounds[o_idx].amount)
                cand = (sub[0] + 1, sub[1] + pair_diff, ((idx, o_idx),) + sub[2])
                if (-cand[0], cand[1], cand[2]) < (-result[0], result[1], result[2]):
                    result = cand
            best[state] = result
            return result

        return list(search(0, frozenset())[2])

    # greedy fallback: closest amount first, earlier outbound wins ties
    candidates = sorted(
        (abs(inbounds[i].amount - outbounds[o].amount), o, i)
        for i, outs in edges.items() for o in outs
    )
    used_in: set[int] = set()
    used_out: set[int] = set()
    pairs = []
    for _, o_idx, i_idx in candidates:
        if i_idx in used_in or o_idx in used_out:
            continue
        used_in.add(i_idx)
        used_out.add(o_idx)
        pairs.append((i_idx, o_idx))
    return sorted(pairs)


def net_inbound(
    txs: Iterable[ChainTx],
    dataset_wallets: set[str],
    refund_tolerance: Fraction | float = Fraction(1, 100),
    match_refunds: bool = True,
) -> NetResult:
    """Partition a wallet ledger into kept / refund / internal buckets.

    Inbounds whose counterparty is a dataset wallet are internal (so a
    transfer between two tracked wallets contributes revenue exactly
    zero times). Remaining inbounds pair with at most one same-UTC-day
    outbound to a different address within the amount tolerance.
    """
    if not isinstance(refund_tolerance, Fraction):
        refund_tolerance = Fraction(refund_tolerance).limit_denominator(10**6)
    ordered = sorted(txs, key=lambda tx: (tx.timestamp, tx.txid))

    internal = [tx for tx in ordered if tx.counterparty in dataset_wallets]
    external = [tx for tx in ordered if tx.counterparty not in dataset_wallets]
    inbounds = [tx for tx in external if tx.direction == Direction.INBOUND]
    outbounds = [tx for tx in external if tx.direction == Direction.OUTBOUND]

    refunds: list[RefundPair] = []
    matched_in: set[str] = set()
    matched_out: set[str] = set()
    if not match_refunds:
        return NetResult(kept=inbounds, refunds=[], internal=internal,
                         residual_outbound=outbounds)

    by_day_in: dict[date, list[ChainTx]] = {}
    for tx in inbounds:
        by_day_in.setdefault(tx.day, []).append(tx)
    by_day_out: dict[date, list[ChainTx]] = {}
    for tx in outbounds:
        by_day_out.setdefault(tx.day, []).append(tx)

    for day in sorted(by_day_in):
        day_in = by_day_in[day]
        day_out = by_day_out.get(day, [])
        if not day_out:
            continue
        edges: dict[int, list[int]] = {}
        for i, tx_in in enumerate(day_in):
            feasible = [
                o for o, tx_out in enumerate(day_out)
                if tx_out.counterparty != tx_in.counterparty
                and _within_tolerance(tx_in, tx_out, refund_tolerance)
            ]
            if feasible:
                edges[i] = feasible
        if not edges:
            continue
        for i_idx, o_idx in _match_component(day_in, day_out, edges):
            refunds.append(RefundPair(day_in[i_idx], day_out[o_idx]))
            matched_in.add(day_in[i_idx].txid)
            matched_out.add(day_out[o_idx].txid)

    kept = [tx for tx in inbounds if tx.txid not in matched_in]
    residual = [tx for tx in outbounds if tx.txid not in matched_out]
    return NetResult(kept=kept, refunds=refunds, internal=internal,
                     residual_outbound=residual)


# --- USD conversion -------------------------------------------------------------

class RateTable:
    """Daily close rates keyed by (UTC date, asset)."""

    def __init__(self, rows: Iterable[tuple[date, Asset, Decimal]] = ()):
        self._rates: dict[tuple[date, Asset], Decimal] = {}
        for day, asset, close in rows:
            key = (day, asset)
            if key in self._rates:
                raise ValueError(f"duplicate rate row for {key}")
            if close <= 0:
                raise ValueError("usd_close must be positive")
            self._rates[key] = close

    @classmethod
    def from_csv(cls, path: str | Path) -> "RateTable":
        rows = []
        for line in Path(path).read_text("utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("date,"):
                continue
            day_s, asset_s, close_s = (p.strip() for p in line.split(",", 2))
            rows.append((date.fromisoformat(day_s), Asset(asset_s), Decimal(close_s)))
        return cls(rows)

    def get(self, day: date, asset: Asset) -> Decimal:
        try:
            return self._rates[(day, asset)]
        except KeyError:
            raise MissingRate(f"no {asset.value} rate for {day.isoformat()}") from None


CENT = Decimal("0.01")


def convert_usd(amount: int, asset: Asset, day: date, rates: RateTable) -> Decimal:
    """amount (smallest units) x daily close, rounded half-even to cents."""
    rate = rates.get(day, asset)
    with localcontext() as ctx:
        ctx.prec = 60
        exact = Decimal(amount) * rate / Decimal(UNIT_SCALE[asset])
        return exact.quantize(CENT, rounding=ROUND_HALF_EVEN)


def _usd_total(txs: Iterable[ChainTx], rates: RateTable) -> Decimal:
    total = Decimal("0.00")
    for tx in txs:
        total += convert_usd(tx.amount, tx.asset, tx.day, rates)
    return total


# --- revenue reporting -------------------------------------------------------------

@dataclass(frozen=True)
class RevenueRecord:
    wallet: str
    asset: Asset
    associated_domains: tuple[str, ...]
    gross_inbound_usd: Decimal
    refunds_usd: Decimal
    internal_usd: Decimal
    net_usd: Decimal
    tx_count: int                   # kept inbound transfers

    def __post_init__(self):
        if self.net_usd != self.gross_inbound_usd - self.refunds_usd - self.internal_usd:
            raise ValueError("net must equal gross - refunds - internal")


def build_revenue_record(
    wallet: str,
    txs: Iterable[ChainTx],
    dataset_wallets: set[str],
    rates: RateTable,
    refund_tolerance: Fraction | float = Fraction(1, 100),
    domains: Iterable[str] = (),
    match_refunds: bool = True,
) -> RevenueRecord:
    tx_list = sorted(txs, key=lambda tx: (tx.timestamp, tx.txid))
    assets = {tx.asset for tx in tx_list}
    if len(assets) > 1:
        raise ValueError("one record per (wallet, asset)")
    asset = assets.pop() if assets else Asset.BTC
    result = net_inbound(tx_list, dataset_wallets, refund_tolerance, match_refunds)
    kept_usd = _usd_total(result.kept, rates)
    refunds_usd = _usd_total((p.inbound for p in result.refunds), rates)
    internal_usd = _usd_total(
        (tx for tx in result.internal if tx.direction == Direction.INBOUND), rates)
    return RevenueRecord(
        wallet=wallet,
        asset=asset,
        associated_domains=tuple(sorted(domains)),
        gross_inbound_usd=kept_usd + refunds_usd + internal_usd,
        refunds_usd=refunds_usd,
        internal_usd=internal_usd,
        net_usd=kept_usd,
        tx_count=len(result.kept),
    )


@dataclass(frozen=True)
class AssetStats:
    median_tx_count: float
    mean_tx_count: float
    min_tx_count: int
    max_tx_count: int
    median_net_usd: Decimal
    mean_net_usd: Decimal
    min_net_usd: Decimal
    max_net_usd: Decimal


@dataclass
class RevenueReport:
    rows: list[RevenueRecord]               # ranked by net_usd descending
    stats: dict[Asset, AssetStats]
    total_usd: Decimal

    def to_csv(self) -> str:
        lines = ["domains,wallet,total_txns,revenue_usd"]
        for row in self.rows:
            domains = " ".join(row.associated_domains) if row.associated_domains else "-"
            lines.append(f"{domains},{row.wallet},{row.tx_count},{row.net_usd}")
        return "\n".join(lines) + "\n"


def revenue_report(records: list[RevenueRecord]) -> RevenueReport:
    """Rank revenue records and compute per-asset summary statistics."""
    ranked = sorted(records, key=lambda r: (-r.net_usd, r.wallet))
    stats: dict[Asset, AssetStats] = {}
    for asset in Asset:
        subset = [r for r in ranked if r.asset == asset]
        if not subset:
            continue
        counts = [r.tx_count for r in subset]
        nets = [r.net_usd for r in subset]
        stats[asset] = AssetStats(
            median_tx_count=float(statistics.median(counts)),
            mean_tx_count=float(statistics.mean(counts)),
            min_tx_count=min(counts),
            max_tx_count=max(counts),
            median_net_usd=Decimal(statistics.median(nets)).quantize(CENT),
            mean_net_usd=(sum(nets, Decimal(0)) / len(nets)).quantize(CENT),
            min_net_usd=min(nets),
            max_net_usd=max(nets),
        )
    total = sum((r.net_usd for r in ranked), Decimal("0.00"))
    return RevenueReport(rows=ranked, stats=stats, total_usd=total)
