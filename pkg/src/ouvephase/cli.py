"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime or
numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import GlaConfig, gla
from .config import ConfigError, load_config
from .io import Waveform, load_spec, read_wav, write_wav
from .metrics import (
    BENCHMARK_HEADER,
    benchmark,
    consistency_residual,
    si_snr,
    spectral_convergence,
    write_csv,
)
from .sampler import SamplerConfig, SamplingError, retrieve_phase, solve_reverse, time_grid
from .score import (
    NetworkScore,
    TrainingDiverged,
    build_score_net,
    load_checkpoint,
    make_optimizer,
    restore_optimizer,
    save_checkpoint,
    train,
)
from .sde import AnalyticScore, OuveParams, mean, std
from .stft import istft, stft
from .synthetic import speech_like
from .transforms import compress

log = logging.getLogger("ouvephase")

REPORT_HEADER = [
    "input", "method", "n_steps", "seed", "length_s", "mean_time_s", "rtf",
    "spectral_convergence", "consistency_residual", "si_snr_db",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _shared_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--config", metavar="PATH", help="key=value configuration file")
    g.add_argument("--seed", type=int)
    g.add_argument("--steps", type=int, help="number of reverse-diffusion steps N")
    g.add_argument("--sigma-min", type=float)
    g.add_argument("--sigma-max", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--t-eps", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--window", type=int, help="STFT window length in samples")
    g.add_argument("--hop", type=int, help="STFT hop in samples")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


_FLAG_KEYS = ("seed", "steps", "sigma_min", "sigma_max", "gamma", "t_eps", "alpha", "beta", "window", "hop")


def _config(args, **extra):
    overrides = {k: getattr(args, k, None) for k in _FLAG_KEYS}
    overrides.update(extra)
    return load_config(args.config, overrides)


def _load_input(path, cfg):
    """Return ``(magnitude, target_len, reference_waveform_or_None)``."""
    path = Path(path)
    if not path.exists():
        raise UsageError(f"input not found: {path}")
    if path.suffix.lower() == ".wav":
        wave = read_wav(path)
        if wave.sample_rate != cfg.sample_rate:
            raise UsageError(f"{path}: sample rate {wave.sample_rate} Hz, expected {cfg.sample_rate} Hz")
        return np.abs(stft(wave, cfg.stft())), len(wave), wave
    spec = load_spec(path)
    if spec.shape[0] != cfg.stft().n_bins:
        raise UsageError(f"{path}: {spec.shape[0]} bins do not match window length {cfg.window}")
    return np.abs(spec), None, None


def _reference(args, cfg, ref):
    if getattr(args, "reference", None):
        ref = read_wav(args.reference)
        if ref.sample_rate != cfg.sample_rate:
            raise UsageError(f"reference sample rate {ref.sample_rate} Hz, expected {cfg.sample_rate} Hz")
    return ref


def _evaluate(magnitude, spectrogram, wave, reference, cfg, wall_time):
    row = {
        "length_s": len(wave) / cfg.sample_rate,
        "mean_time_s": wall_time,
        "rtf": wall_time / (len(wave) / cfg.sample_rate),
        "spectral_convergence": spectral_convergence(magnitude, stft(wave, cfg.stft())[:, : magnitude.shape[1]]),
        "consistency_residual": consistency_residual(spectrogram, cfg.stft()),
        "si_snr_db": "",
    }
    if reference is not None:
        n = min(len(reference), len(wave))
        try:
            row["si_snr_db"] = si_snr(reference.samples[:n], wave[:n])
        except ValueError:
            row["si_snr_db"] = float("nan")
    return row


def _append_report(path, row):
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_HEADER)
        if new:
            writer.writeheader()
        writer.writerow({k: row.get(k, "") for k in REPORT_HEADER})


def _print_row(row):
    print(" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))


def cmd_retrieve(args):
    cfg = _config(args)
    magnitude, target_len, ref = _load_input(args.input, cfg)
    ref = _reference(args, cfg, ref)
    target_len = args.length or target_len
    params = cfg.sde()
    if args.oracle:
        if ref is None:
            raise UsageError("--oracle needs the reference signal (WAV input or --reference)")
        x0 = compress(stft(ref, cfg.stft())[:, : magnitude.shape[1]], cfg.compression())
        score, method = AnalyticScore(x0, params), "diffusion-oracle"
    elif args.checkpoint:
        if not Path(args.checkpoint, "manifest.txt").is_file():
            raise UsageError(f"checkpoint not found: {args.checkpoint}")
        score, method = NetworkScore(load_checkpoint(args.checkpoint).net, params), "diffusion-checkpoint"
    else:
        raise UsageError("either --checkpoint or --oracle is required")

    result = retrieve_phase(magnitude, score, cfg.sampler(), params, cfg.compression(), cfg.stft(), target_len)
    write_wav(args.output, Waveform(np.clip(result.waveform, -1.0, 1.0), cfg.sample_rate))
    row = {"input": str(args.input), "method": method, "n_steps": cfg.steps, "seed": cfg.seed}
    row.update(_evaluate(magnitude, result.spectrogram, result.waveform, ref, cfg, result.wall_time))
    if args.report:
        _append_report(args.report, row)
    _print_row(row)
    return 0


def cmd_gla(args):
    cfg = _config(args, iterations=args.iterations)
    magnitude, target_len, ref = _load_input(args.input, cfg)
    ref = _reference(args, cfg, ref)
    target_len = args.length or target_len
    start = time.perf_counter()
    result = gla(magnitude, cfg.gla(), cfg.stft())
    wave = istft(result.spectrogram, cfg.stft(), target_len)
    elapsed = time.perf_counter() - start
    write_wav(args.output, Waveform(np.clip(wave, -1.0, 1.0), cfg.sample_rate))
    if args.trace:
        write_csv(args.trace, [{"iteration": k, "consistency_residual": r} for k, r in enumerate(result.residual_trace)])
    row = {"input": str(args.input), "method": "gla", "n_steps": cfg.iterations, "seed": cfg.seed}
    row.update(_evaluate(magnitude, result.spectrogram, wave, ref, cfg, elapsed))
    if args.report:
        _append_report(args.report, row)
    _print_row(row)
    return 0


def cmd_train(args):
    cfg = _config(args, train_steps=args.train_steps, slice_frames=args.slice_frames,
                  batch_size=args.batch_size, learning_rate=args.learning_rate,
                  checkpoint_every=args.checkpoint_every)
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise UsageError(f"corpus directory not found: {corpus}")
    files = sorted(corpus.glob("*.wav"))
    if not files:
        raise UsageError(f"no WAV files in {corpus}")
    dataset = []
    for f in files:
        wave = read_wav(f)
        if wave.sample_rate != cfg.sample_rate:
            raise UsageError(f"{f}: sample rate {wave.sample_rate} Hz, expected {cfg.sample_rate} Hz")
        dataset.append(compress(stft(wave, cfg.stft()), cfg.compression()))

    training = cfg.training()
    start_step, optimizer = 0, None
    if args.resume:
        ckpt = load_checkpoint(args.resume)
        net, start_step = ckpt.net, ckpt.step
        optimizer = restore_optimizer(make_optimizer(net, training), ckpt.optimizer_state)
    else:
        net = build_score_net(cfg.seed)
    net, losses, optimizer = train(net, dataset, training, cfg.sde(), optimizer=optimizer,
                                   start_step=start_step, checkpoint_path=args.output)
    final_step = start_step + len(losses)
    save_checkpoint(args.output, net, step=final_step, optimizer=optimizer, training=training, params=cfg.sde())
    trace = args.trace or str(Path(args.output) / "loss_trace.csv")
    write_csv(trace, [{"step": start_step + i + 1, "loss": loss} for i, loss in enumerate(losses)])
    print(f"trained steps {start_step + 1}..{final_step}; final loss {losses[-1]:.6g}; checkpoint {args.output}")
    return 0


def simulate_scalar(x0, y, n_trajectories, cfg, shared_start=False):
    """Run the scalar reverse process with the analytic score for many trajectories at once.

    Returns ``(t_grid, states)`` with ``states`` of shape (N + 1, n_trajectories).
    """
    if n_trajectories < 1:
        raise UsageError("need at least one trajectory")
    params = cfg.sde()
    x0_vec = np.full(n_trajectories, x0, dtype=np.complex128)
    y_vec = np.full(n_trajectories, y, dtype=np.complex128)
    x_T = None
    if shared_start:
        rng = np.random.default_rng([cfg.seed, 1])
        x_T = np.full(n_trajectories, y + std(params.T, params) * complex(*rng.standard_normal(2) / np.sqrt(2)))
    states = []
    solve_reverse(y_vec, AnalyticScore(x0_vec, params), cfg.sampler(), params, x_T=x_T, trajectory=states)
    return time_grid(cfg.steps, params), np.stack(states)


def scalar_summary(t_grid, states, x0, y, params: OuveParams):
    rows = []
    n = states.shape[1]
    for i, t in enumerate(t_grid):
        s = states[i]
        m = s.mean()
        sd = float(np.sqrt(np.mean(np.abs(s - m) ** 2)))
        mu = complex(mean(np.asarray(x0, dtype=complex), np.asarray(y, dtype=complex), t, params))
        rows.append({
            "step": i, "t": float(t), "mean_re": m.real, "mean_im": m.imag, "std": sd,
            "standard_error": sd / np.sqrt(n), "mu_re": mu.real, "mu_im": mu.imag,
            "sigma_t": float(std(t, params)),
        })
    return rows


def cmd_simulate_1d(args):
    cfg = _config(args)
    t_grid, states = simulate_scalar(args.x0, args.y, args.trajectories, cfg, args.shared_start)
    params = cfg.sde()
    write_csv(args.output, [
        {"trajectory": j, "step": i, "t": float(t_grid[i]), "re": states[i, j].real, "im": states[i, j].imag}
        for j in range(states.shape[1]) for i in range(states.shape[0])
    ])
    summary = scalar_summary(t_grid, states, args.x0, args.y, params)
    if args.summary:
        write_csv(args.summary, summary)
    if args.histogram:
        re = states.real
        edges = np.linspace(re.min(), re.max(), args.bins + 1)
        hist_rows = []
        for i, t in enumerate(t_grid):
            counts, _ = np.histogram(re[i], bins=edges)
            hist_rows += [{"step": i, "t": float(t), "bin_lo": edges[b], "bin_hi": edges[b + 1], "count": int(c)}
                          for b, c in enumerate(counts)]
        write_csv(args.histogram, hist_rows)
    last = summary[-1]
    print(f"t={last['t']:.4g} mean={last['mean_re']:.6g}{last['mean_im']:+.6g}j std={last['std']:.6g} "
          f"se={last['standard_error']:.3g} x0={args.x0} mu(t)={last['mu_re']:.6g}")
    return 0


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_benchmark(args):
    cfg = _config(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = set(methods) - {"diffusion-oracle", "diffusion-checkpoint", "gla"}
    if unknown:
        raise UsageError(f"unknown methods: {sorted(unknown)}")
    net = None
    if "diffusion-checkpoint" in methods:
        if not args.checkpoint:
            raise UsageError("diffusion-checkpoint needs --checkpoint")
        net = load_checkpoint(args.checkpoint).net
    lengths = _float_list(args.lengths)
    n_values = _int_list(args.n_values) if args.n_values else [cfg.steps]
    if any(n < 1 for n in n_values):
        raise UsageError("N must be >= 1")
    params, stft_config = cfg.sde(), cfg.stft()
    rng = np.random.default_rng(cfg.seed)
    signals = {length: speech_like(rng, length, cfg.sample_rate) for length in lengths}
    spectra = {length: stft(w, stft_config) for length, w in signals.items()}

    def runner_for(method, n):
        def run(length):
            spec = spectra[length]
            magnitude = np.abs(spec)
            if method == "gla":
                return istft(gla(magnitude, GlaConfig(n), stft_config).spectrogram, stft_config, len(signals[length]))
            if method == "diffusion-oracle":
                score = AnalyticScore(compress(spec, cfg.compression()), params)
            else:
                score = NetworkScore(net, params)
            sampler = SamplerConfig(n, cfg.seed, cfg.enforce_magnitude)
            return retrieve_phase(magnitude, score, sampler, params, cfg.compression(), stft_config,
                                  len(signals[length]))
        return run

    rows = []
    for method in methods:
        for n in n_values:
            rows += benchmark(runner_for(method, n), lengths, args.repetitions, method=method, n_steps=n)
    write_csv(args.output, rows, BENCHMARK_HEADER)
    for r in rows:
        print(f"{r.method:22s} len={r.length_s:g}s N={r.n_steps} time={r.mean_time_s:.4f}s rtf={r.rtf:.4f}")
    return 0


def cmd_eval(args):
    cfg = _config(args)
    ref = read_wav(args.reference)
    est = read_wav(args.estimate)
    for w, name in ((ref, "reference"), (est, "estimate")):
        if w.sample_rate != cfg.sample_rate:
            raise UsageError(f"{name} sample rate {w.sample_rate} Hz, expected {cfg.sample_rate} Hz")
    n = min(len(ref), len(est))
    magnitude = np.abs(stft(ref.samples[:n], cfg.stft()))
    est_spec = stft(est.samples[:n], cfg.stft())
    row = {"input": str(args.estimate), "method": "eval", "n_steps": "", "seed": ""}
    row.update(_evaluate(magnitude, est_spec, est.samples[:n], Waveform(ref.samples[:n], ref.sample_rate), cfg, 0.0))
    row["mean_time_s"] = row["rtf"] = ""
    if args.report:
        _append_report(args.report, row)
    _print_row(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = _shared_flags()
    parser = _Parser(prog="ouvephase", description="STFT phase retrieval by reverse OUVE diffusion.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("retrieve", parents=[shared], help="retrieve phase with a trained or oracle score")
    p.add_argument("input", help="WAV file or magnitude/complex spectrogram file (.cspg)")
    p.add_argument("-o", "--output", required=True, help="output WAV")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--checkpoint", help="score-network checkpoint directory")
    src.add_argument("--oracle", action="store_true", help="use the analytic score of the reference (verification)")
    p.add_argument("--reference", help="clean reference WAV for oracle mode and metrics")
    p.add_argument("--length", type=int, help="output length in samples")
    p.add_argument("--report", help="append metrics to this CSV")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("train", parents=[shared], help="train the score network on a WAV corpus")
    p.add_argument("corpus", help="directory of mono WAV files")
    p.add_argument("-o", "--output", required=True, help="checkpoint directory")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.add_argument("--train-steps", type=int)
    p.add_argument("--slice-frames", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--checkpoint-every", type=int)
    p.add_argument("--trace", help="loss trace CSV (default: <output>/loss_trace.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gla", parents=[shared], help="Griffin-Lim baseline")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--iterations", type=int, help="number of iterations (default 200)")
    p.add_argument("--reference")
    p.add_argument("--length", type=int)
    p.add_argument("--trace", help="per-iteration consistency residual CSV")
    p.add_argument("--report")
    p.set_defaults(func=cmd_gla)

    p = sub.add_parser("simulate-1d", parents=[shared], help="scalar reverse-process simulation")
    p.add_argument("--x0", type=float, default=-0.5)
    p.add_argument("--y", type=float, default=0.5)
    p.add_argument("--trajectories", type=int, default=1000)
    p.add_argument("--shared-start", action="store_true", help="start every trajectory from one x_T draw")
    p.add_argument("-o", "--output", required=True, help="per-step trajectory CSV")
    p.add_argument("--summary", help="per-step mean/std CSV with the closed-form mean")
    p.add_argument("--histogram", help="binned (t, x) histogram CSV")
    p.add_argument("--bins", type=int, default=100)
    p.set_defaults(func=cmd_simulate_1d)

    p = sub.add_parser("benchmark", parents=[shared], help="runtime versus input length and N")
    p.add_argument("--lengths", default="1,2,4", help="comma-separated input lengths in seconds")
    p.add_argument("--n-values", default="", help="comma-separated step counts (default: --steps)")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--methods", default="diffusion-oracle,gla")
    p.add_argument("--checkpoint")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("eval", parents=[shared], help="compare an estimate WAV against a reference WAV")
    p.add_argument("--reference", required=True)
    p.add_argument("--estimate", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, FileNotFoundError) as exc:
        print(f"ouvephase {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (SamplingError, TrainingDiverged, FloatingPointError, RuntimeError, ValueError) as exc:
        print(f"ouvephase {args.command}: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
