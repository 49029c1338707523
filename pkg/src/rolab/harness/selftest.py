"""Fast property suite behind the `selftest` CLI command (< 2 min).

Each check prints one pass/fail line; the command exits nonzero if any
check fails.
"""
import numpy as np

from ..dynamics import KsSpec, OdeSystemSpec, simulate_ks, simulate_ode
from ..enhance import attention_weight, train_observer
from ..infotheory import TeSpec, transfer_entropy
from ..numerics import centered_ridge_fit, ridge_objective, truncated_svd
from ..reservoir import ReservoirSpec, build_reservoir, drive
from .config import preset_config
from .experiment import run_experiment


def check_ridge_perturbation_optimality():
    rng = np.random.default_rng(0)
    for _ in range(5):
        states = rng.standard_normal((40, 6))
        targets = rng.standard_normal((40, 2))
        beta = 10.0 ** rng.uniform(-8, 0)
        w, b = centered_ridge_fit(states, targets, beta)
        base = ridge_objective(states, targets, w, b, beta)
        for _ in range(10):
            w2 = w.copy()
            w2[rng.integers(2), rng.integers(6)] += rng.choice([1e-4, -1e-4])
            if ridge_objective(states, targets, w2, b, beta) < base - 1e-12:
                return False, "perturbed objective decreased"
    return True, "5 random problems, 10 perturbations each"


def check_echo_state_contraction():
    spec = ReservoirSpec(d=100, rho=0.9, alpha=1.0, seed=5)
    w = build_reservoir(spec, 1)
    u = np.random.default_rng(2).standard_normal((500, 1))
    a = drive(w, spec, u, washout=0)
    b = drive(w, spec, u, washout=0,
              r0=np.random.default_rng(3).uniform(-1, 1, 100))
    dist = np.linalg.norm(a.states[-1] - b.states[-1])
    return dist < 1e-6, f"state distance after 500 steps: {dist:.2e}"


def check_grbf_range():
    rng = np.random.default_rng(1)
    for _ in range(200):
        l = rng.uniform(-5, 5, 4)
        c = rng.uniform(-5, 5, 4)
        sigma = rng.uniform(0.1, 3.0)
        phi = attention_weight(l, c, sigma)
        if not 0.0 <= phi <= 1.0:
            return False, f"weight {phi} outside [0, 1]"
        # strictly positive whenever exp() cannot underflow
        exponent = -np.sum((l - c) ** 2) / (2 * sigma * sigma)
        if exponent > -700 and phi <= 0.0:
            return False, f"weight underflowed at exponent {exponent:.1f}"
    return True, "200 random weights inside (0, 1] up to float underflow"


def check_sigma_limit_reduces_to_rank_h(traj):
    from ..reservoir import apply_readout, fit_readout

    spec = ReservoirSpec(d=120, seed=6)
    _, roa = train_observer("ROA", traj, ["x"], spec, 400, sigma=1e6,
                            h_mode=10, eval_len=400)
    obs, _ = train_observer("ROA", traj, ["x"], spec, 400, sigma=1e6,
                            h_mode=10)
    stats = obs.norm_stats
    s = stats.apply(traj.values[:901])
    seq = drive(obs.basic_weights, spec, s[:-1, [0]], washout=100)
    reduced = (seq.states - obs.basic_bank.state_mean) @ obs.basic_bank.u_h
    readout = fit_readout(reduced[:400], s[101:501], spec.beta)
    est = apply_readout(readout, reduced[400:800])
    rank_h = ((est - s[501:901]) ** 2).mean(axis=0)
    rel = np.abs(roa.mse_norm[1:] / rank_h[1:] - 1.0).max()
    return rel < 0.05, f"max relative gap to rank-h observer: {rel:.3f}"


def check_svd_orthonormality():
    rng = np.random.default_rng(3)
    u_h, _ = truncated_svd(rng.standard_normal((60, 200)), 15)
    err = np.abs(u_h.T @ u_h - np.eye(15)).max()
    return err < 1e-8, f"max orthonormality defect: {err:.2e}"


def check_ks_mean_conservation():
    traj = simulate_ks(KsSpec(), 1000, seed=4, washout_steps=100)
    means = traj.values.mean(axis=1)
    drift = np.abs(means - means[0]).max()
    return drift < 1e-8, f"spatial-mean drift over 1000 steps: {drift:.2e}"


def check_lorenz_symmetry():
    spec = OdeSystemSpec("lorenz")
    init = np.array([1.2, -0.7, 15.0])
    a = simulate_ode(spec, 400, 0.05, init=init, washout_steps=0)
    b = simulate_ode(spec, 400, 0.05, init=init * np.array([-1, -1, 1]),
                     washout_steps=0)
    err = np.abs(b.values - a.values * np.array([-1, -1, 1])).max()
    return err < 1e-9, f"max symmetry violation: {err:.2e}"


def check_transfer_entropy_properties():
    rng = np.random.default_rng(5)
    series = rng.standard_normal(20_000)
    if transfer_entropy(series, series, TeSpec(k=1, l=1)) != 0.0:
        return False, "self-TE not exactly zero"
    j = rng.integers(0, 8, 50_000).astype(float)
    i = np.roll(j, 1)
    te = transfer_entropy(i, j, TeSpec(k=1, l=1, n_bins=8))
    if abs(te - np.log(8)) > 0.02 * np.log(8):
        return False, f"shift-by-one TE {te:.4f} vs ln 8 = {np.log(8):.4f}"
    x = rng.standard_normal(5_000)
    y = rng.standard_normal(5_000)
    if transfer_entropy(x, y, TeSpec(k=1, l=3, n_bins=4)) < 0.0:
        return False, "negative TE escaped the clamp"
    return True, f"self-TE zero, shift-by-one TE {te:.4f} ~ ln 8"


def check_bitwise_determinism():
    cfg = preset_config("rossler", n_runs=2, inference_len=300,
                        variants=["RO", "RORA"])
    r1 = run_experiment(cfg)
    r2 = run_experiment(cfg)
    same = all(a["mse_norm"] == b["mse_norm"] and a["mse_raw"] == b["mse_raw"]
               for a, b in zip(r1.runs, r2.runs))
    return same, "two paired executions produced identical run records"


def run_selftest(verbose=True):
    traj = simulate_ode(OdeSystemSpec("rossler"), 901, 0.1, seed=42)
    checks = [
        ("ridge perturbation optimality", check_ridge_perturbation_optimality),
        ("echo-state contraction at rho=0.9", check_echo_state_contraction),
        ("GRBF weight range (0, 1]", check_grbf_range),
        ("sigma->inf collapses ROA to rank-h observer",
         lambda: check_sigma_limit_reduces_to_rank_h(traj)),
        ("SVD orthonormality", check_svd_orthonormality),
        ("KS spatial-mean conservation", check_ks_mean_conservation),
        ("Lorenz sign symmetry", check_lorenz_symmetry),
        ("transfer entropy properties", check_transfer_entropy_properties),
        ("bitwise determinism under fixed master seed",
         check_bitwise_determinism),
    ]
    all_ok = True
    for name, fn in checks:
        ok, detail = fn()
        all_ok &= ok
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
