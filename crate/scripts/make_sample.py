#!/usr/bin/env python3
"""Regenerate the bundled sample dataset under sample/.

Prices are seeded random walks rescaled so each series ends on a fixed
close. Macro series are quoted on calendar days (including some weekends)
with random gaps. Headlines are hand-written.
"""

import datetime as dt
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "sample"
START = dt.date(2019, 6, 3)
END = dt.date(2021, 6, 28)

HOLIDAYS = {
    dt.date(2019, 8, 12), dt.date(2019, 10, 2), dt.date(2019, 10, 8),
    dt.date(2019, 10, 28), dt.date(2019, 12, 25), dt.date(2020, 2, 21),
    dt.date(2020, 3, 10), dt.date(2020, 4, 2), dt.date(2020, 4, 10),
    dt.date(2020, 4, 14), dt.date(2020, 5, 1), dt.date(2020, 10, 2),
    dt.date(2020, 11, 16), dt.date(2020, 11, 30), dt.date(2020, 12, 25),
    dt.date(2021, 1, 26), dt.date(2021, 3, 11), dt.date(2021, 3, 29),
    dt.date(2021, 4, 2), dt.date(2021, 4, 14), dt.date(2021, 4, 21),
    dt.date(2021, 5, 13),
}

# ticker -> (seed, last close, daily vol, seasonal amplitude)
TICKERS = {
    "RIL": (11, 2086.00, 0.016, 0.04),
    "HDFCBANK": (12, 1508.35, 0.013, 0.03),
    "TCS": (13, 3336.75, 0.012, 0.03),
    "SBIN": (14, 426.75, 0.019, 0.05),
}

# column -> (seed, start value, daily vol, decimals)
MACRO = {
    "gold": (21, 1310.0, 0.009, 2),
    "brent": (22, 62.0, 0.022, 2),
    "gsec": (23, 7.03, 0.004, 3),
    "usd_inr": (24, 69.4, 0.003, 4),
}


def trading_days():
    d = START
    out = []
    while d <= END:
        if d.weekday() < 5 and d not in HOLIDAYS:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def price_file(ticker, days):
    seed, last, vol, amp = TICKERS[ticker]
    rng = random.Random(seed)
    logp = [0.0]
    for i in range(1, len(days)):
        season = amp * 2 * math.pi / 63 * math.cos(2 * math.pi * i / 63) / 63 * 10
        logp.append(logp[-1] + 0.0004 + season + rng.gauss(0.0, vol))
    scale = last / math.exp(logp[-1])
    closes = [round(scale * math.exp(v), 2) for v in logp]
    closes[-1] = last
    rows = ["Date,Open,High,Low,Close,Adj Close,Volume"]
    prev = closes[0]
    for d, c in zip(days, closes):
        o = round(prev * (1 + rng.gauss(0.0, vol / 3)), 2)
        hi = round(max(o, c) * (1 + abs(rng.gauss(0.0, vol / 2))), 2)
        lo = round(min(o, c) * (1 - abs(rng.gauss(0.0, vol / 2))), 2)
        hi = max(hi, o, c)
        lo = min(lo, o, c)
        volume = int(rng.uniform(2e6, 9e6))
        rows.append(f"{d.isoformat()},{o:.2f},{hi:.2f},{lo:.2f},{c:.2f},{c:.2f},{volume}")
        prev = c
    return "\n".join(rows) + "\n"


def macro_file(column):
    seed, start, vol, decimals = MACRO[column]
    rng = random.Random(seed)
    d = START - dt.timedelta(days=7)
    v = start
    rows = ["Date,Value"]
    while d <= END:
        v *= math.exp(rng.gauss(0.0, vol))
        quoted = d.weekday() < 5 or rng.random() < 0.3
        if quoted and rng.random() > 0.04:
            rows.append(f"{d.isoformat()},{v:.{decimals}f}")
        d += dt.timedelta(days=1)
    return "\n".join(rows) + "\n"


NEWS = [
    ("2019-06-03", "RIL", "Reliance Jio adds record subscribers in April"),
    ("2019-06-03", "RIL", "Reliance shares rise as analysts upgrade target price"),
    ("2019-06-14", "HDFCBANK", "HDFC Bank loan growth remains strong"),
    ("2019-07-06", "TCS", "TCS wins large deal from European retailer"),
    ("2019-07-09", "TCS", "TCS Q1 profit beats estimates, margins improve"),
    ("2019-07-20", "HDFCBANK", "HDFC Bank posts steady quarterly profit growth"),
    ("2019-08-05", "SBIN", "SBI reports surprise loss on higher provisions"),
    ("2019-08-12", "RIL", "Reliance to sell 20% stake in oil-to-chemicals unit to Aramco"),
    ("2019-08-13", "RIL", "RIL's AGM announcement cheers investors"),
    ("2019-09-10", "SBIN", "SBI cuts lending rates again"),
    ("2019-10-10", "TCS", "TCS misses revenue estimates as banking clients slow spending"),
    ("2019-10-19", "RIL", "Reliance posts record quarterly profit"),
    ("2019-10-25", "SBIN", "SBI profit jumps threefold, bad loans decline"),
    ("2019-11-28", "RIL", "Reliance becomes first Indian firm to hit 10 lakh crore valuation"),
    ("2019-12-14", "HDFCBANK", "HDFC Bank faces regulatory scrutiny over digital outages"),
    ("2020-01-17", "TCS", "TCS reports weak deal wins in a difficult quarter"),
    ("2020-01-18", "HDFCBANK", "HDFC Bank Q3 profit rises 33%, asset quality stable"),
    ("2020-02-07", "SBIN", "SBI net profit surges, shares rally"),
    ("2020-03-09", "RIL", "Reliance shares crash as oil prices collapse"),
    ("2020-03-12", "SBIN", "SBI to invest in crisis-hit Yes Bank rescue plan"),
    ("2020-03-16", "HDFCBANK", "Banking stocks fall sharply on pandemic fears"),
    ("2020-03-23", "TCS", "IT stocks tumble as markets panic over lockdown"),
    ("2020-04-16", "TCS", "TCS holds guidance despite uncertainty, no layoffs planned"),
    ("2020-04-22", "RIL", "Facebook invests 5.7 billion dollars in Jio Platforms"),
    ("2020-04-23", "RIL", "Reliance surges on Facebook deal, analysts upbeat"),
    ("2020-05-04", "RIL", "Silver Lake invests in Jio Platforms"),
    ("2020-05-16", "RIL", "Reliance rights issue gets strong response"),
    ("2020-06-05", "SBIN", "SBI posts highest ever quarterly profit"),
    ("2020-06-19", "RIL", "Reliance becomes net debt free ahead of target"),
    ("2020-07-09", "TCS", "TCS profit falls but beats expectations"),
    ("2020-07-18", "HDFCBANK", "HDFC Bank profit grows, provisions rise"),
    ("2020-07-31", "SBIN", "SBI faces concerns over moratorium book stress"),
    ("2020-08-15", "RIL", "Reliance retail attracts strong global investor interest"),
    ("2020-09-09", "RIL", "Silver Lake to invest in Reliance Retail"),
    ("2020-09-10", "RIL", "Reliance shares hit record high"),
    ("2020-10-07", "TCS", "TCS announces share buyback, profit beats estimates"),
    ("2020-10-17", "HDFCBANK", "HDFC Bank Q2 profit up 18%, beats estimates"),
    ("2020-10-31", "RIL", "Reliance profit drops as refining weakens"),
    ("2020-11-04", "SBIN", "SBI Q2 profit jumps, asset quality improves"),
    ("2020-12-03", "HDFCBANK", "RBI bars HDFC Bank from new digital launches after outages"),
    ("2020-12-04", "HDFCBANK", "HDFC Bank shares slip on regulatory action"),
    ("2021-01-08", "TCS", "TCS wins multiple large deals, strong quarter"),
    ("2021-01-09", "TCS", "TCS becomes most valuable IT company globally"),
    ("2021-01-16", "HDFCBANK", "HDFC Bank profit rises on strong loan growth"),
    ("2021-01-22", "RIL", "Reliance quarterly profit rises, retail recovers"),
    ("2021-02-04", "SBIN", "SBI shares jump after stellar quarterly results"),
    ("2021-02-27", "SBIN", "SBI launches new home loan offers"),
    ("2021-03-12", "HDFCBANK", "RBI partially lifts curbs on HDFC Bank"),
    ("2021-04-03", "SBIN", "Rising Covid cases hurt bank stocks"),
    ("2021-04-12", "TCS", "TCS Q4 results meet estimates, strong deal pipeline"),
    ("2021-04-17", "HDFCBANK", "HDFC Bank Q4 profit up 18%, NPAs steady"),
    ("2021-04-30", "RIL", "Reliance profit beats estimates on retail and telecom"),
    ("2021-05-10", "RIL", "Reliance converts refinery capacity to produce medical oxygen"),
    ("2021-05-21", "SBIN", "SBI posts record profit, bad loans fall"),
    ("2021-05-22", "SBIN", "Analysts raise SBI target after strong quarter"),
    ("2021-06-08", "TCS", "TCS bags deal with UK pension scheme"),
    ("2021-06-12", "HDFCBANK", "HDFC Bank CEO says loan demand recovering"),
    ("2021-06-19", "RIL", "Reliance announces clean energy investments worth 75000 crore"),
    ("2021-06-24", "RIL", "Reliance AGM disappoints, shares fall"),
    ("2021-06-24", "RIL", "Investors sell Reliance after no listing timeline for Jio"),
    ("2021-06-25", "HDFCBANK", "HDFC Bank gets approval for new credit card issuance"),
    ("2021-06-25", "TCS", "TCS wins award for best employer"),
    ("2021-06-26", "SBIN", "SBI warns of weak loan demand amid second wave"),
    ("2021-06-28", "SBIN", "SBI shares steady as markets await cues"),
]


def news_file():
    rows = ["Date,Ticker,Headline"]
    for date, ticker, headline in NEWS:
        if "," in headline or '"' in headline:
            headline = '"' + headline.replace('"', '""') + '"'
        rows.append(f"{date},{ticker},{headline}")
    return "\n".join(rows) + "\n"


CONFIG = """\
# Bundled sample run. Paths are relative to this file.
seed = 42
out = "out"

[data]
tickers = ["RIL", "HDFCBANK", "TCS", "SBIN"]
news = "news.csv"
lexicon = "../crates/core/data/vader_lexicon.tsv"
stopwords = "../crates/core/data/stopwords_en.txt"
fill_policy = "forward_fill"

[data.prices]
RIL = "prices/RIL.csv"
HDFCBANK = "prices/HDFCBANK.csv"
TCS = "prices/TCS.csv"
SBIN = "prices/SBIN.csv"

[data.macro]
gold = "macro/gold.csv"
brent = "macro/brent.csv"
gsec = "macro/gsec.csv"
usd_inr = "macro/usd_inr.csv"

[sentiment]
remove_stopwords = true
remove_special_chars = true
aggregation = "concatenate"

[dataset]
window = 60
train_fraction = 0.95

# Few epochs keep the bundled end-to-end run short on one core.
[lstm]
layer_sizes = [128, 64]
dense_sizes = [25, 1]
epochs = 5
batch_size = 32
learning_rate = 0.001
patience = 10

[bilstm]
layer_sizes = [128, 64]
dense_sizes = [25, 1]
epochs = 5
batch_size = 32
learning_rate = 0.001
patience = 10

[forest]
n_trees = 100
min_samples_leaf = 1
bootstrap = true

[arima]
order = [0, 1, 1]
seasonal_order = [2, 1, 0, 12]
max_evals = 50

[gridsearch]
model = "lstm"
windows = [5, 20, 60]
epochs = 3
"""


def main():
    days = trading_days()
    (OUT / "prices").mkdir(parents=True, exist_ok=True)
    (OUT / "macro").mkdir(parents=True, exist_ok=True)
    for t in TICKERS:
        (OUT / "prices" / f"{t}.csv").write_text(price_file(t, days))
    for c in MACRO:
        (OUT / "macro" / f"{c}.csv").write_text(macro_file(c))
    (OUT / "news.csv").write_text(news_file())
    (OUT / "config.toml").write_text(CONFIG)
    print(f"{len(days)} trading days, {len(NEWS)} headlines")


if __name__ == "__main__":
    main()
