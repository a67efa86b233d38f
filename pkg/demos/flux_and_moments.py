"""The stationary root law: flux distribution, occupancy, and moments.

For a non-supercritical arrival law the root of the infinite tree has a
well defined load distribution.  This prints it, then checks it against
the recursion load = arrivals + surplus(left) + surplus(right) term by
term, which is the strongest internal consistency test we have.
"""

import math

from parkcrit import (
    binary0k,
    flux_distribution,
    geometric,
    mean_identities,
    occupancy_self_consistency,
)

for law in (binary0k(0.05), geometric(0.05)):
    flux = flux_distribution(law, order=50)
    print(f"{law.describe()}:")
    print(f"  empty prob            {flux.empty_prob:.9f}")
    print(f"  occupied, no flux     {flux.occupied_no_flux_prob:.9f}")
    for k in range(5):
        print(f"  P(flux = {k})          {flux.probs[k]:.9f}")
    print(f"  total flux mass       {math.fsum(flux.probs):.15f}")
    print(f"  tail beyond order 50  {flux.tail_mass:.2e}")

    occ = flux.occupancy_probs(8)
    print(f"  P(load = 0..4)        " + " ".join(f"{q:.6f}" for q in occ[:5]))

    residuals = occupancy_self_consistency(law, flux, upto=40)
    print(f"  recursion residual    {max(abs(r) for r in residuals):.2e}")

    m = mean_identities(law)
    print(f"  mean load {m['mean_occupancy']:.9f} = 2(1 - p) - mean arrivals "
          f"({2 * (1 - m['empty_prob']) - m['mean_arrivals']:.9f})")
    print(f"  mean flux {m['mean_flux']:.9f}")
    print()
