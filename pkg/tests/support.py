"""Shared instance builders for the test suite."""

import math

from mecoffload import GenerationSpec, Instance, UserProfile, generate_instance
from mecoffload.lp import LpProblem, constraint
from mecoffload.rng import SplitMix64, mix64


def make_user(i=0, *, weight=1.0, a=1.0, b=1.0, gamma=1e-9, r=1.0, task=0.0,
              cycles=1.0, freq=1.0, kappa=1e-30, power=1.0):
    """Toy user with second/bit scales chosen for hand arithmetic."""
    return UserProfile(
        id=i,
        weight=weight,
        uplink_time_per_bit=a,
        downlink_time_per_bit=b,
        output_ratio=gamma,
        service_rate=r,
        task_bits=task,
        cycles_per_bit=cycles,
        cpu_freq=freq,
        energy_coeff=kappa,
        tx_power=power,
    )


def make_instance(users, *, deadline=1.0, degradation=0.0):
    return Instance(deadline=deadline, degradation=degradation, users=tuple(users))


def unit_roundtrip_user(i, *, r=1.0, weight=1.0, **kw):
    """User with a + b*gamma == 1 s/bit exactly."""
    return make_user(i, weight=weight, a=0.5, b=0.5, gamma=1.0, r=r, **kw)


def stock_instance(n_users, degradation, seed, deadline=0.035):
    """Instance drawn from the stock parameter distributions."""
    spec = GenerationSpec(n_users=n_users, deadline_s=deadline, degradation=degradation)
    return generate_instance(spec, seed)


def homogeneous_instance(n_users, degradation, seed, deadline=0.035):
    """Identical users; the shared parameters are drawn once from the stock ranges."""
    rng = SplitMix64(mix64(0x48, seed))
    a = 1.0 / (rng.uniform(100.0, 150.0) * 1e6)
    b = 1.0 / (rng.uniform(150.0, 200.0) * 1e6)
    gamma = 10.0 ** (-rng.uniform(0.5, 1.5))
    r = rng.uniform(1e7, 2e7)
    users = tuple(
        make_user(i, a=a, b=b, gamma=gamma, r=r, task=1.0, cycles=500.0, freq=2e8,
                  kappa=1e-28, power=0.1)
        for i in range(n_users)
    )
    return make_instance(users, deadline=deadline, degradation=degradation)


def homogeneous_txrate_instance(n_users, degradation, seed, deadline=0.035):
    """One shared transmission rate, per-user service rates."""
    rng = SplitMix64(mix64(0x54, seed))
    a = 1.0 / (rng.uniform(100.0, 150.0) * 1e6)
    b = 1.0 / (rng.uniform(150.0, 200.0) * 1e6)
    gamma = 10.0 ** (-rng.uniform(0.5, 1.5))
    users = tuple(
        make_user(i, a=a, b=b, gamma=gamma, r=rng.uniform(1e7, 2e7), task=1.0,
                  cycles=500.0, freq=2e8, kappa=1e-28, power=0.1)
        for i in range(n_users)
    )
    return make_instance(users, deadline=deadline, degradation=degradation)


def random_lp_problem(rng: SplitMix64, n_vars=4, n_rows=4) -> LpProblem:
    """Small integer-coefficient LP; lower bounds keep the region pointed."""
    objective = [float(int(rng.uniform(-3, 4))) for _ in range(n_vars)]
    constraints = []
    for _ in range(n_rows):
        coeffs = [float(int(rng.uniform(-3, 4))) for _ in range(n_vars)]
        relation = ("<=", ">=", "=")[int(rng.uniform(0, 3))]
        rhs = float(int(rng.uniform(-4, 9)))
        constraints.append(constraint(coeffs, relation, rhs))
    bounds = []
    for _ in range(n_vars):
        upper = 5.0 if rng.uniform() < 0.7 else math.inf
        bounds.append((0.0, upper))
    return LpProblem(tuple(objective), tuple(constraints), tuple(bounds))
