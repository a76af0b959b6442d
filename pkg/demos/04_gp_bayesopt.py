# Gaussian-process surrogate and Expected-Improvement search
#
# A 15-evaluation budget (5 Latin-hypercube seeds + 10 EI acquisitions)
# locates the maximum of a noisy black box. The final answer is the
# argmax of the posterior mean, not the best noisy observation.

import numpy as np

from scdiff import BayesOptConfig, fit, posterior, run_bayes_opt

rng = np.random.default_rng(7)
true_optimum = 4.2
objective = lambda a: float(np.exp(-((a - true_optimum) ** 2) / 2) + rng.normal(0, 0.01))

# ## Run the optimizer

config = BayesOptConfig(bounds=(1.5, 8.0), n_init=5, n_iter=10, seed=1)
trace = run_bayes_opt(objective, config)

print("query trail (phase, alpha, observed value):")
for q in trace.queries:
    ei = f" EI={q.ei:.4f}" if q.ei is not None else ""
    print(f"  {q.phase:12s} alpha={q.alpha:.4f}  f={q.value:+.4f}{ei}")

print(f"\nposterior-mean argmax: {trace.alpha_star:.4f} (true optimum {true_optimum})")
print(f"evaluations spent: {trace.n_evaluations}")

# ## The surrogate in isolation

observations = [(q.alpha, q.value) for q in trace.queries]
model = fit(observations, input_range=config.bounds)
hp = model.hyperparams
print(f"\nfitted hyperparameters: length_scale={hp.length_scale:.3f} "
      f"signal_var={hp.signal_var:.3f} noise_var={hp.noise_var:.2e}")

print("\nposterior slice:")
for a in np.linspace(1.5, 8.0, 14):
    mu, sigma = posterior(model, float(a))
    bar = "#" * int(40 * max(mu, 0.0))
    print(f"  alpha={a:5.2f}  mu={mu:+.3f} +- {sigma:.3f}  {bar}")
