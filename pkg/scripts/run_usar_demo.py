"""Print the three USAR outcomes (explanation cost 1, cost 100, penalty mode)."""

import argparse

from eaplan.usar import run_usar_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--time-limit", type=float, default=10.0)
    args = ap.parse_args()
    run_usar_demo(time_limit=args.time_limit)


if __name__ == "__main__":
    main()
