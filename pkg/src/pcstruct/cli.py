"""``pcstruct`` command line.

Exit codes: 0 success, 1 usage or invalid input, 2 I/O failure, 3 numeric
failure (e.g. degenerate inputs to the phase congruency loss).

Settings resolve as: command-line flag, then ``--config`` file, then the
built-in default. Each run echoes the fully resolved settings as
``key=value`` lines, to ``<out>/config.txt`` when ``--out`` is given and to
stderr otherwise; the echo is itself a valid ``--config`` file.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import edgeops
from .depthgeo import (
    INVERSE_UNIT, POSITIVE_16BIT, DepthFormatError, DepthMap, bresenham, extract_profile,
    invert_depth, normal_loss, normal_loss_gradient, quantization_stats, read_depth,
    revert_depth, write_depth,
)
from .evalmetrics import depth_metrics, psnr, ssim
from .fixtures import colonoscopy_like, step_edge, vascular
from .imgcore import GrayImage, PNMError, as_gray, read_pnm, write_pnm
from .kvconfig import format_kv, read_kv
from .lossbook import LossComponents, LossWeights, total_loss
from .phasecongruency import DEFAULT_EPSILON, compute_pc, compute_pc_noise_compensated
from .spectral import FilterBankConfig, build_bank
from .structconstraint import T1, T2, DegenerateInputError, pc_similarity

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """17 significant digits, locale independent; ``inf``/``nan`` spelled out."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


# --- settings -----------------------------------------------------------

BANK_KEYS = {"scales": int, "orientations": int, "min_wavelength": float, "mult": float,
             "sigma_on_f": float, "d_theta_sigma": float}
WEIGHT_KEYS = {"alpha": float, "beta": float, "gamma": float, "lambda": float, "pc_start_epoch": int}

DEFAULTS = {
    **FilterBankConfig().to_kv(),
    **LossWeights().to_kv(),
    "epsilon": DEFAULT_EPSILON,
    "t1": T1,
    "t2": T2,
    "step_scale": 1.0,
    "canny_sigma": edgeops.CANNY_SIGMA,
    "canny_low": edgeops.CANNY_LOW,
    "canny_high": edgeops.CANNY_HIGH,
    "bits": 8,
    "depth_scale": 1.0,
    "seed": 7,
}
TYPES = {**BANK_KEYS, **WEIGHT_KEYS, "epsilon": float, "t1": float, "t2": float,
         "step_scale": float, "canny_sigma": float, "canny_low": float, "canny_high": float,
         "bits": int, "depth_scale": float, "seed": int}


def resolve(args, keys) -> dict:
    file_values = {}
    if args.config:
        try:
            file_values = read_kv(args.config)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
    out = {}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            value = flag
        elif key in file_values:
            try:
                value = TYPES[key](file_values[key])
            except ValueError:
                raise UsageError(f"config {args.config}: bad value for {key}: {file_values[key]!r}")
        else:
            value = DEFAULTS[key]
        out[key] = value
    return out


def bank_config(settings) -> FilterBankConfig:
    try:
        return FilterBankConfig.from_kv(settings)
    except ValueError as exc:
        raise UsageError(str(exc))


def echo(settings: dict, args, extra: dict) -> None:
    text = format_kv({"command": args.command, **extra, **settings})
    if getattr(args, "out", None):
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(text)
    else:
        sys.stderr.write("".join(f"# {line}\n" for line in text.splitlines()))


def out_dir(args) -> Path:
    if not args.out:
        raise UsageError("--out DIR is required for this command")
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_image(path):
    return read_pnm(path)


def scaled_pgm(grid: np.ndarray, bits: int, peak: float) -> tuple[GrayImage, float]:
    """Linear map ``[0, peak] -> [0, maxval]``; returns the image and the factor used."""
    maxval = 255 if bits == 8 else 65535
    scale = maxval / peak if peak > 0 else 0.0
    return GrayImage(np.clip(np.rint(grid * scale), 0, maxval), maxval), scale


# --- commands -----------------------------------------------------------

PC_KEYS = list(BANK_KEYS) + ["epsilon"]


def _pc(img, settings, noise_compensated=False):
    gray = as_gray(img)
    bank = build_bank(bank_config(settings), gray.width, gray.height)
    fn = compute_pc_noise_compensated if noise_compensated else compute_pc
    try:
        return fn(gray, bank, settings["epsilon"])
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_pc_map(args) -> int:
    settings = resolve(args, PC_KEYS + ["bits"])
    if settings["bits"] not in (8, 16):
        raise UsageError("--bits must be 8 or 16")
    img = load_image(args.image)
    out = out_dir(args)
    result = _pc(img, settings, args.noise_compensated)
    rows = []
    pc_img, scale = scaled_pgm(result.pc, settings["bits"], 1.0)
    write_pnm(pc_img, out / "pc.pgm")
    rows.append(["pc", result.pc.min(), result.pc.max(), result.pc.mean(), scale])
    if args.energies:
        for j, energy in enumerate(result.orientation_energy):
            e_img, e_scale = scaled_pgm(energy, settings["bits"], float(energy.max()))
            write_pnm(e_img, out / f"energy_o{j}.pgm")
            rows.append([f"energy_o{j}", energy.min(), energy.max(), energy.mean(), e_scale])
    text = csv_text(["map", "min", "max", "mean", "scale"], rows)
    (out / "pc_stats.csv").write_text(text)
    sys.stdout.write(text)
    echo(settings, args, {"image": args.image, "noise_compensated": args.noise_compensated,
                          "energies": args.energies})
    return 0


EDGE_FILES = ("y_channel", "pc_map", "roberts", "prewitt", "sobel", "canny", "laplacian")


def cmd_edge_compare(args) -> int:
    settings = resolve(args, PC_KEYS + ["canny_sigma", "canny_low", "canny_high"])
    img = load_image(args.image)
    out = out_dir(args)
    gray = as_gray(img)
    y8 = GrayImage(np.clip(np.rint(gray.data * (255.0 / gray.max_value)), 0, 255), 255)
    write_pnm(y8, out / "y_channel.pgm")
    pc = _pc(gray, settings).pc
    write_pnm(scaled_pgm(pc, 8, 1.0)[0], out / "pc_map.pgm")
    for op in ("roberts", "prewitt", "sobel", "canny", "laplacian"):
        params = {}
        if op == "canny":
            params = {"sigma": settings["canny_sigma"], "low": settings["canny_low"],
                      "high": settings["canny_high"]}
        try:
            edges = edgeops.edge_detect(y8, op, **params)
        except ValueError as exc:
            raise UsageError(str(exc))
        write_pnm(edgeops.to_pgm_image(edges), out / f"{op}.pgm")
    echo(settings, args, {"image": args.image})
    return 0


def cmd_pc_loss(args) -> int:
    settings = resolve(args, PC_KEYS + ["t1", "t2"])
    gen, real = load_image(args.gen), load_image(args.real)
    g_gen, g_real = as_gray(gen), as_gray(real)
    if g_gen.shape != g_real.shape:
        raise UsageError(f"image sizes differ: {g_gen.shape} vs {g_real.shape}")
    bank = build_bank(bank_config(settings), g_gen.width, g_gen.height)
    try:
        res, _ = pc_similarity(g_gen, g_real, bank, settings["epsilon"], settings["t1"], settings["t2"])
    except DegenerateInputError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc))
    text = csv_text(["l_pc", "fsim", "check", "mean_s_pc", "mean_s_g"],
                    [[res.loss, res.fsim, res.loss + res.fsim, res.mean_s_pc, res.mean_s_g]])
    _emit(args, "pc_loss.csv", text)
    echo(settings, args, {"gen": args.gen, "real": args.real})
    return 0


def _emit(args, name, text):
    sys.stdout.write(text)
    if getattr(args, "out", None):
        (out_dir(args) / name).write_text(text)


def _read_depth(path) -> DepthMap:
    try:
        return read_depth(path)
    except (PNMError, DepthFormatError):
        raise
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}")


def cmd_normal_loss(args) -> int:
    settings = resolve(args, ["step_scale"])
    sim, rec = _read_depth(args.sim), _read_depth(args.rec)
    if sim.shape != rec.shape:
        raise UsageError(f"depth sizes differ: {sim.shape} vs {rec.shape}")
    if sim.encoding != rec.encoding:
        raise UsageError(f"depth encodings differ: {sim.encoding} vs {rec.encoding}")
    try:
        value = normal_loss(sim, rec, settings["step_scale"])
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(args, "normal_loss.csv", csv_text(["l_n"], [[value]]))
    if args.gradient_out:
        grad = normal_loss_gradient(sim, rec, settings["step_scale"])
        rows = "".join(",".join(fmt(v) for v in r) + "\n" for r in grad)
        Path(args.gradient_out).write_text(rows)
    echo(settings, args, {"sim": args.sim, "rec": args.rec})
    return 0


def cmd_depth_invert(args) -> int:
    d = _read_depth(args.input)
    try:
        if args.direction == "forward":
            if d.encoding != POSITIVE_16BIT:
                raise UsageError(f"forward inversion needs 16-bit positive depth, got {d.encoding}")
            result = invert_depth(d)
        else:
            if d.encoding != INVERSE_UNIT:
                raise UsageError(f"reverse conversion needs inverse depth, got {d.encoding}")
            result = revert_depth(d)
            if str(args.output).lower().endswith(".pgm"):
                result = DepthMap(np.rint(result.data), POSITIVE_16BIT)
    except ValueError as exc:
        raise UsageError(str(exc))
    write_depth(result, args.output)
    echo({}, args, {"input": args.input, "output": args.output, "direction": args.direction})
    return 0


def _parse_line(spec: str):
    try:
        parts = [int(p) for p in spec.split(",")]
    except ValueError:
        raise UsageError(f"bad line spec {spec!r}; expected x0,y0,x1,y1")
    if len(parts) != 4:
        raise UsageError(f"bad line spec {spec!r}; expected x0,y0,x1,y1")
    return (parts[0], parts[1]), (parts[2], parts[3])


def cmd_profile(args) -> int:
    d = _read_depth(args.depth)
    if (args.row is None) == (args.line is None):
        raise UsageError("give exactly one of --row or --line")
    try:
        if args.row is not None:
            values = extract_profile(d, row=args.row)
            xs = list(range(d.width))
            ys = [args.row] * d.width
        else:
            start, end = _parse_line(args.line)
            values = extract_profile(d, start=start, end=end)
            xs, ys = zip(*bresenham(start, end))
    except ValueError as exc:
        raise UsageError(str(exc))
    profile = csv_text(["index", "x", "y", "depth"],
                       [[i, x, y, v] for i, (x, y, v) in enumerate(zip(xs, ys, values))])
    stats = quantization_stats(d)
    stats_text = csv_text(list(stats.as_row()), [list(stats.as_row().values())])
    sys.stdout.write(profile + "\n" + stats_text)
    if args.out:
        out = out_dir(args)
        (out / "profile.csv").write_text(profile)
        (out / "quantization.csv").write_text(stats_text)
    echo({}, args, {"depth": args.depth, "row": args.row, "line": args.line})
    return 0


def read_manifest(path) -> list[tuple[Path, Path]]:
    base = Path(path).parent
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'pred gt', got {raw!r}")
        pairs.append((base / parts[0], base / parts[1]))
    if not pairs:
        raise UsageError(f"{path}: manifest lists no pairs")
    return pairs


def cmd_metrics(args) -> int:
    settings = resolve(args, ["depth_scale"])
    pairs = read_manifest(args.manifest)
    rows = []
    if args.kind == "depth":
        header = ["pred", "gt", "rmse", "mae", "sq_rel", "n_valid", "scale"]
        for pred_path, gt_path in pairs:
            p, g = _read_depth(pred_path), _read_depth(gt_path)
            if p.shape != g.shape:
                raise UsageError(f"{pred_path} and {gt_path} differ in size")
            pred = p.data * settings["depth_scale"]
            gt = g.data * settings["depth_scale"]
            try:
                m = depth_metrics(pred, gt, gt > 0, align=args.align_scale)
            except ValueError as exc:
                raise UsageError(f"{pred_path}: {exc}")
            rows.append([str(pred_path), str(gt_path), m.rmse, m.mae, m.sq_rel, m.n_valid, m.scale])
        numeric = slice(2, 7)
    else:
        header = ["pred", "gt", "psnr", "ssim"]
        for pred_path, gt_path in pairs:
            a, b = load_image(pred_path), load_image(gt_path)
            try:
                rows.append([str(pred_path), str(gt_path), psnr(a, b), ssim(a, b)])
            except ValueError as exc:
                raise UsageError(f"{pred_path}: {exc}")
        numeric = slice(2, 4)
    cols = np.array([r[numeric] for r in rows], dtype=np.float64)
    summary = ["mean", ""] + [float(np.mean(cols[:, j])) for j in range(cols.shape[1])]
    text = csv_text(header, rows + [summary])
    _emit(args, f"{args.kind}_metrics.csv", text)
    echo(settings, args, {"manifest": args.manifest, "kind": args.kind,
                          "align_scale": args.align_scale})
    return 0


def read_components(path) -> list[LossComponents]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        try:
            return [LossComponents.from_kv({k.strip(): v for k, v in row.items()}) for row in reader]
        except (ValueError, TypeError) as exc:
            raise UsageError(f"{path}: {exc}")


def cmd_total_loss(args) -> int:
    settings = resolve(args, list(WEIGHT_KEYS))
    try:
        weights = LossWeights.from_kv(settings)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.epoch < 0:
        raise UsageError("--epoch must be >= 0")
    comps = read_components(args.components)
    rows = [[args.epoch, total_loss(c, weights, args.epoch)] for c in comps]
    _emit(args, "total_loss.csv", csv_text(["epoch", "total"], rows))
    echo(settings, args, {"components": args.components, "epoch": args.epoch})
    return 0


def cmd_fixture(args) -> int:
    settings = resolve(args, ["seed"])
    out = out_dir(args)
    if args.name == "step-edge":
        write_pnm(step_edge(), out / "step_edge.pgm")
    elif args.name == "vascular":
        img, _, _ = vascular(seed=settings["seed"])
        write_pnm(img, out / "vascular.pgm")
    else:
        write_pnm(colonoscopy_like(seed=settings["seed"]), out / "colonoscopy_like.ppm")
    echo(settings, args, {"name": args.name})
    return 0


# --- parser -------------------------------------------------------------

def _common(p):
    p.add_argument("--config", metavar="PATH", help="key=value settings file")
    p.add_argument("--out", metavar="DIR", help="output directory")


def _bank_flags(p):
    g = p.add_argument_group("filter bank")
    g.add_argument("--scales", type=int, help="number of log-Gabor scales (default 4)")
    g.add_argument("--orients", dest="orientations", type=int, help="number of orientations (default 4)")
    g.add_argument("--min-wavelength", dest="min_wavelength", type=float, help="smallest wavelength in px (default 6)")
    g.add_argument("--mult", type=float, help="wavelength ratio between scales (default 2)")
    g.add_argument("--sigma-on-f", dest="sigma_on_f", type=float, help="radial bandwidth ratio (default 0.55)")
    g.add_argument("--d-theta-sigma", dest="d_theta_sigma", type=float,
                   help="orientation spacing / angular sigma (default 1.2)")
    g.add_argument("--epsilon", type=float, help="phase congruency stabilizer (default 1e-4)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcstruct", description=__doc__.split("\n\n")[0],
                     epilog="Environment: PCSTRUCT_THREADS caps the worker threads used for filtering.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pc-map", help="phase congruency map of an image")
    p.add_argument("image")
    _common(p)
    _bank_flags(p)
    p.add_argument("--bits", type=int, choices=(8, 16), help="PGM sample depth (default 8)")
    p.add_argument("--energies", action="store_true", help="also write per-orientation energy maps")
    p.add_argument("--noise-compensated", action="store_true", help="subtract estimated noise energy")
    p.set_defaults(func=cmd_pc_map)

    p = sub.add_parser("edge-compare", help="Y channel, PC map and five edge operator maps")
    p.add_argument("image")
    _common(p)
    _bank_flags(p)
    p.add_argument("--canny-sigma", dest="canny_sigma", type=float, help="default 1.4")
    p.add_argument("--canny-low", dest="canny_low", type=float, help="fraction of peak gradient (default 0.1)")
    p.add_argument("--canny-high", dest="canny_high", type=float, help="fraction of peak gradient (default 0.3)")
    p.set_defaults(func=cmd_edge_compare)

    p = sub.add_parser("pc-loss", help="phase congruency loss and FSIM for an image pair")
    p.add_argument("gen")
    p.add_argument("real")
    _common(p)
    _bank_flags(p)
    p.add_argument("--t1", type=float, help="PC similarity constant (default 0.85)")
    p.add_argument("--t2", type=float, help="gradient similarity constant (default 160)")
    p.set_defaults(func=cmd_pc_loss)

    p = sub.add_parser("normal-loss", help="normal-consistency loss between two depth maps")
    p.add_argument("sim")
    p.add_argument("rec")
    _common(p)
    p.add_argument("--step-scale", dest="step_scale", type=float, help="pixel size in depth units (default 1)")
    p.add_argument("--gradient-out", metavar="PATH", help="write d(loss)/d(rec) as a CSV grid")
    p.set_defaults(func=cmd_normal_loss)

    p = sub.add_parser("depth-invert", help="16-bit positive depth <-> inverse depth")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--direction", choices=("forward", "reverse"), default="forward",
                   help="forward: 16-bit PGM -> inverse raw; reverse: inverse raw -> depth")
    _common(p)
    p.set_defaults(func=cmd_depth_invert)

    p = sub.add_parser("profile", help="depth profile along a row or segment, plus quantization stats")
    p.add_argument("depth")
    p.add_argument("--row", type=int)
    p.add_argument("--line", metavar="X0,Y0,X1,Y1")
    _common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("metrics", help="depth or image metrics over a manifest of pairs")
    p.add_argument("manifest")
    p.add_argument("--kind", choices=("depth", "image"), required=True)
    p.add_argument("--align-scale", dest="align_scale", action="store_true",
                   help="least-squares scale alignment of predictions (depth only)")
    p.add_argument("--depth-scale", dest="depth_scale", type=float, help="mm per stored depth unit (default 1)")
    _common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("total-loss", help="weighted total objective from component values")
    p.add_argument("components", help="CSV with columns gan,cyc,excyc,dir,iden_d,pc,normal")
    p.add_argument("--epoch", type=int, required=True)
    p.add_argument("--weights", dest="config_weights", metavar="PATH", help="alias of --config")
    for name in ("alpha", "beta", "gamma"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--pc-start-epoch", dest="pc_start_epoch", type=int)
    _common(p)
    p.set_defaults(func=cmd_total_loss)

    p = sub.add_parser("fixture", help="write a bundled synthetic fixture")
    p.add_argument("name", choices=("step-edge", "vascular", "colonoscopy-like"))
    p.add_argument("--seed", type=int, help="random seed (default 7)")
    _common(p)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config_weights", None):
        args.config = args.config or args.config_weights
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pcstruct {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, PNMError, DepthFormatError) as exc:
        print(f"pcstruct {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DegenerateInputError, FloatingPointError, ArithmeticError) as exc:
        print(f"pcstruct {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"pcstruct {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
