#!/usr/bin/env python3
"""Score the fixture sentences with the reference vaderSentiment package.

Rounding inside the package is disabled so the stored values are the raw
floats. Output: crates/core/tests/fixtures/vader_fixtures.tsv
"""

from pathlib import Path

import vaderSentiment.vaderSentiment as vs

vs.round = lambda x, n=None: x

SENTENCES = [
    "Reliance posts record quarterly profit",
    "SBI reports surprise loss on higher provisions",
    "TCS profit beats estimates, margins improve",
    "Markets crash as investors panic",
    "The stock is good",
    "The stock is not good",
    "The stock is very good",
    "The stock is extremely bad",
    "The results were GREAT for shareholders",
    "Great quarter for the bank!",
    "Terrible guidance from management!!!",
    "Shares rally on strong demand!!!!!!",
    "No growth in loan book",
    "Regulator bars bank from new launches after outages",
    "HDFC Bank gets approval for card issuance",
    "Company faces fraud allegations and lawsuits",
    "Analysts are not happy with the weak outlook",
    "Profit jumps, bad loans decline",
    "Investors cheer the buyback",
    "The deal is slightly positive for earnings",
    "Oil prices collapse amid fears of recession",
    "Steady performance with no surprises",
    "Board approves dividend",
    "Shares hit record high on optimism",
    "Weak demand hurts margins",
    "Quarterly numbers disappoint the street",
    "The bank is doing incredibly well",
    "Market closes flat",
    "Ratings agency upgrades outlook to positive",
    "Concerns grow over debt",
    "The merger was hardly a success",
    "A truly awful day for bank stocks",
    "Company wins award for best employer",
    "Strong growth, excellent margins, happy investors",
    "",
]


def main():
    analyzer = vs.SentimentIntensityAnalyzer()
    out = Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/vader_fixtures.tsv"
    lines = ["text\tpos\tneg\tneu\tcompound"]
    for s in SENTENCES:
        r = analyzer.polarity_scores(s)
        lines.append(f"{s}\t{r['pos']!r}\t{r['neg']!r}\t{r['neu']!r}\t{r['compound']!r}")
    out.write_text("\n".join(lines) + "\n")
    print(f"{len(SENTENCES)} sentences")


if __name__ == "__main__":
    main()
