"""How the interference factor rules the best VM count.

With identical users the whole scheduling problem collapses to one number:
how many VMs to run.  The answer is the integer neighborhood of
1 / ln(1 + d), independent of the radio and service rates.  Heterogeneous
populations keep the same flavor through two special-case solvers with
closed-form structure.
"""

import math

from mecoffload import (
    GenerationSpec,
    brute_force_rate_max,
    generate_instance,
    homogeneous_m_star,
    homogeneous_txrate_schedule,
    no_interference_schedule,
    solve_rate_max,
)
from mecoffload.model import Instance, UserProfile


def identical_users(n, r=1.5e7, a=8e-9, b=6e-9, gamma=0.1):
    return tuple(
        UserProfile(id=i, weight=1.0, uplink_time_per_bit=a, downlink_time_per_bit=b,
                    output_ratio=gamma, service_rate=r, task_bits=0.0, cycles_per_bit=750.0,
                    cpu_freq=4e8, energy_coeff=1e-28, tx_power=0.1)
        for i in range(n)
    )


print("identical users: best VM count vs interference (population 12)")
print("     d | 1/ln(1+d) | closed form | full solver")
for d in (0.02, 0.05, 0.1, 0.2, 0.3, 0.5):
    inst = Instance(deadline=0.035, degradation=d, users=identical_users(12))
    u = inst.users[0]
    m = homogeneous_m_star(d, 12, u.service_rate, u.roundtrip_time_per_bit)
    schedule, _ = solve_rate_max(inst)
    print(f"  {d:4.2f} | {1 / math.log1p(d):9.2f} | {m:11d} | {len(schedule.scheduled):11d}")
print("(at d = 1/m the neighbors m and m+1 tie exactly, so counts may differ by one)")

# Shared transmission rate, different service rates: keep adding the next
# fastest VM while its rate beats d times the rates already scheduled.
print("\nshared transmission rate: greedy service-rate prefix")
inst = Instance(
    deadline=0.035,
    degradation=0.4,
    users=tuple(
        UserProfile(id=i, weight=1.0, uplink_time_per_bit=8e-9, downlink_time_per_bit=6e-9,
                    output_ratio=0.1, service_rate=r, task_bits=0.0, cycles_per_bit=750.0,
                    cpu_freq=4e8, energy_coeff=1e-28, tx_power=0.1)
        for i, r in enumerate([2.0e7, 1.7e7, 1.2e7, 0.7e7, 0.4e7])
    ),
)
fast = homogeneous_txrate_schedule(inst)
oracle = brute_force_rate_max(inst)
print(f"  prefix rule schedules {sorted(fast.scheduled)}; "
      f"brute force confirms the rate to {abs(fast.sum_rate - oracle.sum_rate) / oracle.sum_rate:.0e}")

# No interference at all: a pure transmission-rate threshold.
print("\nzero interference: transmission-rate threshold")
inst0 = generate_instance(GenerationSpec(n_users=8, degradation=0.0), seed=3)
fast0 = no_interference_schedule(inst0)
oracle0 = brute_force_rate_max(inst0)
print(f"  threshold schedules {len(fast0.scheduled)}/8 users; "
      f"brute-force agreement {abs(fast0.sum_rate - oracle0.sum_rate) / oracle0.sum_rate:.0e}")
