"""Check the whole law catalog exhaustively and print the report table.

    python3 scripts/run_law_suite.py --max-events 4 --props 2
"""

import argparse
import time

from eptl.lawkit import all_models, check_laws, law_catalog, render_reports


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-events", type=int, default=4)
    ap.add_argument("--props", type=int, default=2)
    args = ap.parse_args()
    t0 = time.perf_counter()
    reports = check_laws(law_catalog(), all_models(args.max_events, args.props), props=args.props)
    print(render_reports(reports))
    bad = sum(not r.ok for r in reports)
    print(f"\n{len(reports)} laws, {bad} failing, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
