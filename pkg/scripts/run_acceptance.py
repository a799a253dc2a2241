"""Run every acceptance suite at its default size and print one line per suite."""

import sys

from specsite.verify import run_suite

CRITERIA = ["birkhoff", "factorization", "locality", "admissibility", "sheaf", "slice",
            "local-topos", "adjunction", "jm", "fibered", "hochster"]


def main():
    failed = 0
    for k, name in enumerate(CRITERIA, 1):
        r = run_suite(name, timed=True)
        failed += not r["passed"]
        print(f"{k:2d} {'PASS' if r['passed'] else 'FAIL'} {name:14s} "
              f"{r['instances']:4d} instances {r['seconds']:7.2f}s failures={r['failures']}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
