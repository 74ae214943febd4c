"""List the serializations of a trace with the MVR oracle value at every read.

Shows how totally ordering concurrent writes hides multi-valued reads.

    python3 scripts/serializations.py src/eptl/fixtures/concurrent_trace.json
"""

import argparse

from eptl.datatypes import mvr_get_oracle
from eptl.lawkit import serialize
from eptl.trace_io import load_trace
from eptl.values import format_value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("trace")
    args = ap.parse_args()
    A = load_trace(args.trace)
    reads = [e.id for e in A.events if e.op.name == "get"]
    print("concurrent: " + ", ".join(f"{g}={format_value(mvr_get_oracle(A, g))}" for g in reads))
    for order in A.linear_extensions():
        S = serialize(A, order)
        values = ", ".join(f"{g}={format_value(mvr_get_oracle(S, g))}" for g in reads)
        print(f"{','.join(order)}: {values}")


if __name__ == "__main__":
    main()
