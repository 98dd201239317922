"""vcwarp command line.

Exit codes: 0 success, 2 usage, 3 bad input, 4 numerical failure.  Errors
are reported on stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .audio_io import FEATURE_MAGIC, read_features, read_wav, write_features, write_wav
from .errors import VcwarpError
from .features import MelCepstra, estimate_f0, extract_mel_cepstra
from .metrics import CSV_FIELDS, evaluate_pair
from .pipeline import learn_from_audio, run_pipeline
from .profiles import PROFILE_ENV, PROFILES, default_profile, get_profile
from .testkit import SynthSpec, gen_warped_pair
from .warp import WarpModel, apply_warp, learn_warp

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8")


def _is_features(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(FEATURE_MAGIC)) == FEATURE_MAGIC


def _profile(args, attr="profile", fallback="mcd36"):
    name = getattr(args, attr, None)
    return get_profile(name) if name else default_profile(fallback)


def cmd_extract(args):
    prof = _profile(args).with_overrides(n_coeffs=args.n_coeffs)
    w = read_wav(args.input)
    cep = extract_mel_cepstra(w, prof.n_coeffs, prof.stft_config, prof.n_mels)
    write_features(cep.to_feature_file(), args.output)


def cmd_f0(args):
    prof = _profile(args)
    w = read_wav(args.input)
    f0 = estimate_f0(w, prof.f0_min, prof.f0_max, prof.f0_config)
    write_features(f0.to_feature_file(w.sample_rate_hz), args.output)


def _load_cepstra(path, prof):
    if _is_features(path):
        ff = read_features(path)
        return MelCepstra.from_feature_file(ff, prof.stft_config, max(prof.n_mels, ff.dim))
    w = read_wav(path)
    return extract_mel_cepstra(w, prof.n_coeffs, prof.stft_config, prof.n_mels)


def cmd_learn_warp(args):
    prof = get_profile(args.warp_profile)
    conv = _load_cepstra(args.converted, prof)
    ref = _load_cepstra(args.reference, prof)
    model = learn_warp(conv, ref, args.mode, phase_grid=args.phase_grid)
    _write_text(args.output, model.to_json())
    sys.stdout.write(_dump({"alpha": model.to_dict().get("alpha", model.to_dict().get("alphas")),
                            "train_cost": model.train_cost, "identity_cost": model.identity_cost}))


def _check_seed(args):
    if getattr(args, "init_phase", "zero") == "random" and args.seed is None:
        raise UsageError("--init-phase random requires --seed")


def cmd_apply_warp(args):
    _check_seed(args)
    model = WarpModel.from_json(Path(args.warp).read_text(encoding="utf-8"))
    w = read_wav(args.input)
    out = apply_warp(model, w, args.gl_iters, args.excitation, args.init_phase, args.seed)
    write_wav(out, args.output)


def _evaluate_one(conv_path, ref_path, prof):
    rep = evaluate_pair(read_wav(conv_path), read_wav(ref_path), prof)
    rep.conv_path, rep.ref_path = str(conv_path), str(ref_path)
    return rep


def _read_pair_list(path):
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise UsageError(f"{path}: each line needs 'converted,reference', got {row}")
            pairs.append((row[0].strip(), row[1].strip()))
    return pairs


def cmd_evaluate(args):
    prof = _profile(args)
    if args.list:
        if args.converted or args.reference:
            raise UsageError("give either two wav files or --list, not both")
        pairs = _read_pair_list(args.list)
        with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
            reports = list(pool.map(lambda p: _evaluate_one(p[0], p[1], prof), pairs))
    else:
        if not (args.converted and args.reference):
            raise UsageError("evaluate needs two wav files or --list")
        reports = [_evaluate_one(args.converted, args.reference, prof)]

    if args.list:
        text = _dump([r.to_dict() for r in reports])
    else:
        text = reports[0].to_json()
    sys.stdout.write(text)
    if args.json:
        _write_text(args.json, text)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for r in reports:
                writer.writerow(r.csv_row())


def cmd_gen_test(args):
    spec = SynthSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    spec = SynthSpec.from_dict({**spec.to_dict(), "seed": args.seed})
    source, target, alpha_star = gen_warped_pair(spec, args.alpha)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_wav(source, out / "source.wav")
    write_wav(target, out / "target.wav")
    _write_text(out / "alpha_star.json", _dump({"alpha_star": alpha_star, "spec": spec.to_dict()}))


def cmd_pipeline(args):
    _check_seed(args)
    conv, ref = read_wav(args.converted), read_wav(args.reference)
    result = run_pipeline(conv, ref, _profile(args, "eval_profile"), args.warp_profile, args.mode, args.excitation,
                          args.gl_iters)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_wav(result.warped, out / "warped.wav")
    _write_text(out / "warp.json", result.model.to_json())
    for rep, path in ((result.before, args.converted), (result.after, out / "warped.wav")):
        rep.conv_path, rep.ref_path = str(path), str(args.reference)
    summary = result.summary()
    _write_text(out / "report.json", _dump(summary))
    sys.stdout.write(_dump(summary))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcwarp", description="Frequency-warping post-processing and evaluation for voice conversion.")
    parser.add_argument("--version", action="version", version=f"vcwarp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    names = sorted(PROFILES)
    profile_help = f"analysis profile (default: ${PROFILE_ENV} or mcd36)"

    p = sub.add_parser("extract", help="wav -> VCF1 mel cepstra")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--profile", choices=names, help=profile_help)
    p.add_argument("--n-coeffs", type=int)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("f0", help="wav -> VCF1 F0 contour (f0_hz, voiced)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--profile", choices=names, help=profile_help)
    p.set_defaults(func=cmd_f0)

    p = sub.add_parser("learn-warp", help="converted + reference (wav or VCF1) -> warp JSON")
    p.add_argument("converted")
    p.add_argument("reference")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mode", choices=("scalar", "perband"), default="scalar")
    p.add_argument("--phase-grid", choices=("mel", "literal"), default="mel")
    p.add_argument("--warp-profile", choices=names, default="warp80")
    p.set_defaults(func=cmd_learn_warp)

    def add_synthesis(p):
        p.add_argument("--gl-iters", type=int, default=60)
        p.add_argument("--excitation", choices=("envelope", "keep"), default="envelope")
        p.add_argument("--init-phase", choices=("zero", "random"), default="zero")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("apply-warp", help="warp JSON + wav -> warped wav")
    p.add_argument("warp")
    p.add_argument("input")
    p.add_argument("output")
    add_synthesis(p)
    p.set_defaults(func=cmd_apply_warp)

    p = sub.add_parser("evaluate", help="MCD and normalised F0 RMSE of converted vs reference")
    p.add_argument("converted", nargs="?")
    p.add_argument("reference", nargs="?")
    p.add_argument("--list", help="CSV of 'converted,reference' pairs for batch scoring")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--profile", choices=names, help=profile_help)
    p.add_argument("--json")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-test", help="synthetic spec JSON -> warped wav pair + alpha_star.json")
    p.add_argument("spec")
    p.add_argument("outdir")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_gen_test)

    p = sub.add_parser("pipeline", help="learn, apply and score a warp in one go")
    p.add_argument("converted")
    p.add_argument("reference")
    p.add_argument("outdir")
    p.add_argument("--mode", choices=("scalar", "perband"), default="scalar")
    p.add_argument("--eval-profile", choices=names, help=profile_help)
    p.add_argument("--warp-profile", choices=names, default="warp80")
    add_synthesis(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}, sort_keys=True) + "\n")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "Usage", str(exc))
    except VcwarpError as exc:
        return _fail(exc.code, type(exc).__name__, str(exc))
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    except (ArithmeticError, FloatingPointError) as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, str(exc))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
