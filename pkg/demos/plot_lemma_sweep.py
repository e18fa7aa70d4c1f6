"""
Randomized checks of the supporting inequalities
================================================

Every lemma in the security argument is checked on random instances.  The
theorem check can be tampered with to show that a failure is caught and
dumped as a scenario that replays exactly.
"""

from qpa import lemmas, pa, scenario

for summary in lemmas.verify_all(trials=25):
    print("%-24s %3d/%d  max violation %.2e" % (summary.name, summary.passed, summary.trials, summary.max_violation))

bad = lemmas.run_check("key_distance_bound", trials=3, tamper=True)
trial, outcome = bad.failures[0]
replayed = scenario.scenario_from_dict(outcome.instance["scenario"]).instance()
print("tampered trial %d, violation %.6f, replayed distance %.6f" % (trial, outcome.violation, pa.exact_key_distance(replayed)))
