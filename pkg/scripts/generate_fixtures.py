#!/usr/bin/env python3
"""Regenerate the bundled fixture tree (scenarios, ledgers, infra tables).

Deterministic: running it twice produces identical bytes. Wallet payloads
are minted with the package encoders so every embedded address passes
checksum validation.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from anansi.extract.wallets import base58check_encode, bech32_encode, eip55_checksum

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

NAMES = ["Jasmine Martine", "Judy", "Maya", "Linda Jackson", "Elowen", "Darlene",
         "Isabella", "Josh Blair", "Monica", "Elizabeth", "Adina"]
BRANDS = ["Target", "Amazon", "Costco", "Structube", "Qualtrics", "Warner Bros",
          "SSENSE Recruiting", "Sony Music Entertainment", "Wayfair", "Home Depot"]

DOMAIN_GROUPS = [
    "wpfm-taskhub.club", "tx11-tasks.vip", "ssense-jobs.cyou", "target-work.icu",
    "coswork-center.lat", "merit-review.com", "bonus-bench.top", "stark-tasks.xyz",
    "prime-workbench.vip", "lumine-jobs.club", "rapid-tasks.icu", "nova-bench.cc",
]

HANDLE_POOL = ["@task_trainer{:02d}".format(i) for i in range(20)]


def digest(label: str, n: int) -> bytes:
    return hashlib.sha256(f"fixture:{label}:{n}".encode()).digest()


def mint_wallet(i: int) -> str:
    kind = i % 5
    seed = digest("wallet", i)
    if kind == 0:
        return bech32_encode(0, seed[:20])
    if kind == 1:
        return bech32_encode(1, seed[:32])
    if kind == 2:
        return base58check_encode(0x00, seed[:20])
    if kind == 3:
        return base58check_encode(0x05, seed[:20])
    return "0x" + eip55_checksum(seed[:20].hex())


def pitch(name: str, brand: str) -> str:
    return (f"Hello! My name is {name} from {brand}. We were really impressed with "
            "your profile and would like to provide you the chance to take on a "
            "flexible remote role. In this position, you would assist merchants by "
            "updating their data. Earn $250 to $500 daily.")


def telegram_story(i: int, task_flavor: str) -> dict:
    name = NAMES[i % len(NAMES)]
    brand = BRANDS[i % len(BRANDS)]
    handle = HANDLE_POOL[i % len(HANDLE_POOL)]
    domain = DOMAIN_GROUPS[i % len(DOMAIN_GROUPS)]
    code = f"TB{i:03d}X"
    wallet = mint_wallet(i)
    asset = "ETH" if wallet.startswith("0x") else "BTC"
    task_text = {
        "product_review": ("Complete 40 product review tasks - rate and review the "
                           "products on the workbench."),
        "youtube": ("Your tasks are on YouTube: like the video and subscribe to the "
                    "channel, then send a screenshot."),
        "app_store": ("Take a screenshot of the app listing in the app store and "
                      "send it back to us."),
        "prepay": ("These are prepay tasks: you must deposit first to optimize "
                   "crypto value, returns arrive within hours."),
    }[task_flavor]
    return {
        "scenario_id": f"sc-{i:04d}",
        "phone": f"+1555{2_000_000 + i:07d}",
        "platform": "sms",
        "scam_type": "Employment",
        "bait_text": pitch(name, brand),
        "payloads": {
            "wallets": [wallet],
            "handles": [handle],
            "urls": [f"https://{domain}/signup"],
            "codes": [code],
        },
        "turns": [
            {"trigger": "*", "reply": pitch(name, brand), "stage": "initial_contact"},
            {"trigger": "interested|tell me more",
             "reply": (f"Great! May I ask your name and age? The salary is $250 to "
                       f"$500 daily plus commissions at {brand}."),
             "stage": "trust_building"},
            {"trigger": "name is|years old",
             "reply": (f"Perfect. Please add our trainer on Telegram {handle} to "
                       f"begin your training. Your invitation code is {code}."),
             "stage": "platform_handoff"},
            {"trigger": "added your trainer|looking forward",
             "reply": (f"Welcome! Now register your working account at "
                       f"https://{domain}/signup using invitation code {code}. "
                       f"New users get $10 bonus."),
             "stage": "registration_tasks", "platform": "telegram"},
            {"trigger": "registered",
             "reply": (f"Well done. {task_text} To withdraw earnings you must "
                       f"first deposit to upgrade your account."),
             "stage": "payment_extraction", "platform": "telegram"},
            {"trigger": "wallet address|send the deposit",
             "reply": (f"Send {asset} to {wallet} via Cash App or Coinbase. "
                       f"Each address is valid for 30 minutes only."),
             "stage": "payment_extraction", "platform": "telegram"},
        ],
    }


def whatsapp_story(i: int) -> dict:
    name = NAMES[(i + 3) % len(NAMES)]
    brand = BRANDS[(i + 5) % len(BRANDS)]
    domain = DOMAIN_GROUPS[(i + 7) % len(DOMAIN_GROUPS)]
    code = f"WA{i:03d}Z"
    trainer_phone = f"+1555{7_000_000 + i:07d}"
    wallet = mint_wallet(1000 + i)
    asset = "ETH" if wallet.startswith("0x") else "BTC"
    return {
        "scenario_id": f"sc-{i:04d}",
        "phone": f"+1555{2_000_000 + i:07d}",
        "platform": "sms",
        "scam_type": "Employment",
        "bait_text": pitch(name, brand),
        "payloads": {
            "wallets": [wallet],
            "urls": [f"https://{domain}/signup"],
            "codes": [code],
        },
        "turns": [
            {"trigger": "*", "reply": pitch(name, brand), "stage": "initial_contact"},
            {"trigger": "interested|tell me more",
             "reply": (f"To continue, add our trainer on WhatsApp {trainer_phone}. "
                       f"She will guide your paid training session."),
             "stage": "platform_handoff"},
            {"trigger": "message me first|Telegram alternative",
             "reply": ("Hello, this is the trainer contacting you first on WhatsApp "
                       "as requested. We start with YouTube tasks: like the video "
                       "and subscribe to the channel, then send a screenshot."),
             "stage": "platform_handoff", "platform": "whatsapp"},
            {"trigger": "what should i do next|okay",
             "reply": (f"First register your working account at https://{domain}/signup "
                       f"with invitation code {code}."),
             "stage": "registration_tasks", "platform": "whatsapp"},
            {"trigger": "registered",
             "reply": ("Great. After 40 tasks you can withdraw. A first deposit is "
                       "required to activate withdrawals. Minimum balance applies."),
             "stage": "payment_extraction", "platform": "whatsapp"},
            {"trigger": "wallet address|send the deposit",
             "reply": (f"Send {asset} to {wallet}. Confirm with a screenshot. "
                       f"PayPal also accepted for small top ups."),
             "stage": "payment_extraction", "platform": "whatsapp"},
        ],
    }


def wrong_number_story(i: int) -> dict:
    name = NAMES[(i + 1) % len(NAMES)]
    return {
        "scenario_id": f"sc-{i:04d}",
        "phone": f"+1555{2_000_000 + i:07d}",
        "platform": "sms",
        "scam_type": "Employment",
        "bait_text": "Hey Sarah, are we still meeting for dinner tonight?",
        "opener_template_id": "wrong_number",
        "payloads": {},
        "turns": [
            {"trigger": "*",
             "reply": "Hey Sarah, are we still meeting for dinner tonight?",
             "stage": "initial_contact"},
            {"trigger": ".*",
             "reply": (f"Oh I'm so sorry, wrong number! By the way, I'm {name}, I "
                       f"work in crypto investment. What do you do for work?"),
             "stage": "trust_building"},
            {"trigger": "work as",
             "reply": ("Nice to meet you! I could teach you how to earn with "
                       "part-time tasks sometime.")},
        ],
    }


def build_scenarios() -> list[dict]:
    scenarios = []
    for i in range(100):
        if i < 40:
            scenarios.append(telegram_story(i, "product_review"))
        elif i < 60:
            scenarios.append(telegram_story(i, "youtube"))
        elif i < 70:
            scenarios.append(telegram_story(i, "app_store"))
        elif i < 80:
            scenarios.append(telegram_story(i, "prepay"))
        elif i < 95:
            scenarios.append(whatsapp_story(i))
        else:
            scenarios.append(wrong_number_story(i))
    return scenarios


BTC_WALLET = "bc1qa6esq4c6wh6ahd6rmla69s32s7wzqkym7m2x77"
BTC_W2 = "bc1qk3q0kvlm69nufepd6pn6jz92g6ph8h8g6vfsz6"
BTC_W3 = "36x8XoD8Fu6y5VFk28Qn4tjSSViJ17BsE4"
ETH_WALLET = "0xF3d2554Cc074F52A80DC5115Ce635EBf39b1B26A"


def sats(btc: float) -> int:
    return round(btc * 100_000_000)


def tx_line(txid, wallet, direction, counterparty, amount, day, asset, hour=12):
    return {
        "txid": txid, "wallet": wallet, "direction": direction,
        "counterparty": counterparty, "amount": str(amount),
        "timestamp": datetime(2025, 6, day, hour, tzinfo=timezone.utc).isoformat(),
        "asset": asset,
    }


def btc_ledger() -> list[dict]:
    """20 transfers: 12 victim inbounds, 2 intra-dataset, 3 refund pairs,
    3 residual outbounds. Net kept: 1.40 BTC."""
    return [
        tx_line("i01", BTC_WALLET, "inbound", "victim-01", sats(0.010), 1, "BTC"),
        tx_line("i02", BTC_WALLET, "inbound", "victim-02", sats(0.020), 1, "BTC"),
        tx_line("i03", BTC_WALLET, "inbound", "victim-03", sats(0.500), 2, "BTC"),
        tx_line("o01", BTC_WALLET, "outbound", "refund-01", sats(0.495), 2, "BTC"),
        tx_line("i04", BTC_WALLET, "inbound", "victim-04", sats(0.030), 3, "BTC"),
        tx_line("n01", BTC_WALLET, "inbound", BTC_W2, sats(0.300), 3, "BTC"),
        tx_line("o06", BTC_WALLET, "outbound", "cashout-03", sats(0.350), 3, "BTC"),
        tx_line("i05", BTC_WALLET, "inbound", "victim-05", sats(0.100), 4, "BTC"),
        tx_line("o02", BTC_WALLET, "outbound", "refund-02", sats(0.100), 4, "BTC"),
        tx_line("i06", BTC_WALLET, "inbound", "victim-06", sats(0.040), 5, "BTC"),
        tx_line("n02", BTC_WALLET, "inbound", BTC_W3, sats(0.200), 5, "BTC"),
        tx_line("i07", BTC_WALLET, "inbound", "victim-07", sats(0.250), 6, "BTC"),
        tx_line("o03", BTC_WALLET, "outbound", "refund-03", sats(0.2525), 6, "BTC"),
        tx_line("i08", BTC_WALLET, "inbound", "victim-08", sats(0.060), 7, "BTC"),
        tx_line("i09", BTC_WALLET, "inbound", "victim-09", sats(0.070), 8, "BTC"),
        tx_line("i10", BTC_WALLET, "inbound", "victim-10", sats(0.080), 9, "BTC"),
        tx_line("i11", BTC_WALLET, "inbound", "victim-11", sats(1.000), 10, "BTC"),
        tx_line("o04", BTC_WALLET, "outbound", "cashout-01", sats(0.900), 11, "BTC"),
        tx_line("i12", BTC_WALLET, "inbound", "victim-12", sats(0.090), 12, "BTC"),
        tx_line("o05", BTC_WALLET, "outbound", "cashout-02", sats(2.000), 13, "BTC"),
    ]


def eth_ledger() -> list[dict]:
    """Net kept: 2.5 ETH (one same-day refund pair filtered)."""
    wei = 10**18
    return [
        tx_line("e01", ETH_WALLET, "inbound", "0x" + "11" * 20, 2 * wei, 1, "ETH"),
        tx_line("e02", ETH_WALLET, "inbound", "0x" + "22" * 20, 1 * wei, 2, "ETH"),
        tx_line("e03", ETH_WALLET, "outbound", "0x" + "33" * 20, 1 * wei, 2, "ETH", hour=18),
        tx_line("e04", ETH_WALLET, "inbound", "0x" + "44" * 20, wei // 2, 3, "ETH"),
    ]


def rates_csv() -> str:
    lines = ["date,asset,usd_close"]
    for day in range(1, 28):
        lines.append(f"2025-06-{day:02d},BTC,30000.00")
        lines.append(f"2025-06-{day:02d},ETH,2000.00")
    return "\n".join(lines) + "\n"


def page(title: str, cards: list[str], layout: str = "grid") -> str:
    items = "\n".join(
        f'<div class="card"><p>{text}</p></div>' for text in cards)
    return (f"<html><head><title>{title}</title></head>\n"
            f'<body><div class="hero banner"><h1>{title}</h1></div>\n'
            f'<div class="{layout}">{items}</div></body></html>\n')


def main() -> None:
    scen_dir = ROOT / "scenarios"
    scen_dir.mkdir(parents=True, exist_ok=True)
    for doc in build_scenarios():
        path = scen_dir / f"{doc['scenario_id']}.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", "utf-8")

    ledgers = ROOT / "ledgers"
    ledgers.mkdir(parents=True, exist_ok=True)
    (ledgers / "btc_case.jsonl").write_text(
        "\n".join(json.dumps(t, sort_keys=True) for t in btc_ledger()) + "\n", "utf-8")
    (ledgers / "eth_case.jsonl").write_text(
        "\n".join(json.dumps(t, sort_keys=True) for t in eth_ledger()) + "\n", "utf-8")

    (ROOT / "rates.csv").write_text(rates_csv(), "utf-8")

    (ROOT / "asn_table.csv").write_text(
        "cidr,asn,provider\n"
        "192.252.179.0/24,AS64500,INTEGEN-2\n"
        "104.16.0.0/13,AS13335,CLOUDFLARENET\n"
        "203.0.113.0/24,AS64501,HKUNITED-HK\n"
        "198.51.100.0/24,AS64502,ALIBABA-US\n", "utf-8")

    resolutions = {}
    for i, domain in enumerate(DOMAIN_GROUPS):
        if i < 4:
            resolutions[domain] = ["192.252.179.27"]       # one shared-IP cluster
        elif i < 10:
            resolutions[domain] = [f"104.17.{i}.10"]
        # last two stay unresolved (NXDOMAIN)
    (ROOT / "resolutions.json").write_text(
        json.dumps(resolutions, indent=2, sort_keys=True) + "\n", "utf-8")

    blocklists = ROOT / "blocklists"
    blocklists.mkdir(parents=True, exist_ok=True)
    registrable = DOMAIN_GROUPS
    (blocklists / "aggregator_a.txt").write_text(
        "\n".join(registrable[:4]) + "\n", "utf-8")
    (blocklists / "aggregator_b.txt").write_text(
        "\n".join(registrable[:2]) + "\n", "utf-8")
    (blocklists / "empty_vendor.txt").write_text("", "utf-8")

    pages = ROOT / "pages"
    pages.mkdir(parents=True, exist_ok=True)
    (pages / "template_a_1.html").write_text(
        page("SuperMall Tasks", ["Rate this blender", "Rate this lamp"]), "utf-8")
    (pages / "template_a_2.html").write_text(
        page("MegaShop Bench", ["Review these headphones", "Review this rug"]), "utf-8")
    (pages / "template_b.html").write_text(
        "<html><body><table><tr><td>different layout</td></tr></table></body></html>\n",
        "utf-8")

    (ROOT / "portal_reports.csv").write_text(
        "phone,message,scam_type,date\n"
        '+15552000001,"Hello! My name is Judy from Target. Flexible remote role, '
        'earn $250 to $500 daily.",Employment,2025-04-14\n'
        '+15552000002,"Hi, I\'m Maya from the Costco Recruiting team. Part-time '
        'remote job opportunity.",Employment,2025-04-15\n'
        '+15552000003,"Your package could not be delivered, click '
        'hxxp://bad.example",Delivery,2025-04-16\n', "utf-8")

    (ROOT / "transcripts.txt").write_text(
        "From: (555) 200-0004\n"
        "Date: 2025-04-20\n"
        "Type: Employment\n"
        "Hello! We found your resume on Indeed. Reply YES to start earning $500 "
        "daily with simple product review tasks.\n"
        "\n"
        "From: +1 555 200 0005\n"
        "Platform: whatsapp\n"
        "Type: Employment\n"
        "I am Adina from the Costco Recruiting team. Add our trainer on Telegram "
        "@task_trainer01 to begin.\n", "utf-8")

    config = {
        "scenario_dir": "scenarios",
        "rates_path": "rates.csv",
        "ledgers_path": "ledgers",
        "asn_table_path": "asn_table.csv",
        "blocklists_dir": "blocklists",
        "resolutions_path": "resolutions.json",
        "wallet_domains": {
            BTC_WALLET: ["wpfm-taskhub.club"],
            ETH_WALLET: ["tx11-tasks.vip"],
        },
        "dataset_wallets": [BTC_W2, BTC_W3],
    }
    (ROOT / "config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", "utf-8")

    print(f"wrote fixtures under {ROOT}")


if __name__ == "__main__":
    main()
