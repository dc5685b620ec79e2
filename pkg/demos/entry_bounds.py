"""Entry-specific error rates, upper and lower.

All absolute constants are set to 1, so only relative magnitudes and
scaling laws are meaningful. For the 2x2 block sampling pattern the
per-entry rates collapse to four closed forms, printed below next to
their grid-evaluated counterparts.
"""
from submc import make_block_P, lower_rate, upper_rate
from submc.bounds import block_rates, precondition_flags

n1 = n2 = 50
q = dict(q11=0.3, q12=0.3, q21=0.3, q22=0.05)
P = make_block_P(n1, n2, **q)
r, sigma, delta = 2, 0.1, 0.01

print("per-entry rates (constants = 1):")
for target, label in [((10, 10), "core"), ((10, 60), "top-right"),
                      ((60, 60), "bottom-right")]:
    up = upper_rate(P, *target, r, sigma, delta)
    lo = lower_rate(P, *target, r, sigma)
    print(f"  {label:>12s} {target}: upper {up:9.2f}   lower {lo:.4f}")

print("\nclosed-form block table (log factors omitted):")
table = block_rates(n1, n2, **q)
for name in ("top_left", "top_right", "bottom_left", "bottom_right"):
    e = table[name]
    print(f"  {name:>13s}: upper {e['upper']:.4f}   lower {e['lower']:.4f}")
print("  dominance conditions:", table["conditions_ok"])

ok, summary = precondition_flags(P, r, sigma, delta)
print(f"\nentries outside the guarantee regime: {summary['flagged_not_ok']} "
      f"of {summary['entries']}")
