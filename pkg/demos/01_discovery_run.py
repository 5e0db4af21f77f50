"""
Discovery on one sampled network
================================

Sample a 100-user network over 256 channels, then let each of the six
hopping rules discover it. Sweep-family rules are guaranteed to finish
within N slots; the Pi-algorithm is not, so its horizon is 16 N.
"""
from topodisc import EngineConfig, ScenarioParams, generate_scenario, run_discovery
from topodisc.hopping import DEFAULT_ALGORITHMS
from topodisc.scenario import realized_intersection, scenario_seeds

params = ScenarioParams(n_common=4)
scenario = generate_scenario(params, *scenario_seeds(master_seed=1, index=0, n_common=4))

sizes = [len(cs) for cs in scenario.channel_sets]
print(f"{scenario.n_users} users, {len(scenario.topology.edges)} links")
print(f"channels per user: min {min(sizes)}, max {max(sizes)}")
print(f"common set {scenario.common_set.members}, realized intersection "
      f"{realized_intersection(scenario).members}")

for alg in DEFAULT_ALGORITHMS:
    res = run_discovery(scenario, EngineConfig(alg, run_seed=7))
    print(f"{alg.label:40s} TTD={res.ttd!s:>4}  TTR={res.ttr!s:>4}")
