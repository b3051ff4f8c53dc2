"""Command-line front end and the noise-robustness benchmark.

Every stage is a subcommand so intermediate artifacts can be produced and
pinned on their own::

    rclbp synth --out corpus/
    rclbp inject-noise in.pgm noisy.pgm --snr 30 --seed 7
    rclbp denoise noisy.pgm clean.pgm --denoise-mode rclbp --debug-shrink shrink.json
    rclbp extract --out train.csv --split train
    rclbp eval --train train.csv --test test.csv --out metrics.json
    rclbp crossval --features train.csv --k-folds 10
    rclbp benchmark --out report.csv

Settings come from ``--config file.json`` and can be overridden one by one
with long flags; ``--print-config`` echoes the resolved configuration.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .clbp import ClbpParams, extract_features
from .imagecore import (
    TEXTURE_KINDS,
    NoiseSpec,
    derive_seed,
    inject_gaussian_noise,
    load_image,
    save_image,
    synth_corpus,
    synth_texture,
    to_uint8,
)
from .ml import (
    GnbConfig,
    KnnConfig,
    LabeledDataset,
    MetricsReport,
    evaluate,
    fit_predict,
    kfold_cv,
    stratified_split,
)
from .nlmeans import NlMeansParams
from .pipeline import DENOISE_MODES, DenoiseConfig, rclbp_denoise, rclbp_stages
from .wavelet import WaveletParams

IMAGE_SUFFIXES = (".pgm", ".png")
CLEAN = "clean"


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


@dataclass
class SyntheticConfig:
    n_per_class: int = 300
    size: int = 64
    seed: int = 0


@dataclass
class RunConfig:
    """Everything a run depends on.

    ``feature_mode`` / ``denoise`` / ``classifier`` describe the single cell
    used by ``extract``, ``eval`` and ``crossval``. ``benchmark`` sweeps
    ``methods`` (``"feature:denoise_mode"``) x ``classifiers`` x ``snr_levels``.
    """

    dataset_root: str = "synthetic"
    feature_mode: str = "clbp"
    denoise: DenoiseConfig = field(default_factory=DenoiseConfig)
    clbp: ClbpParams = field(default_factory=ClbpParams)
    classifier: str = "knn"
    knn: KnnConfig = field(default_factory=KnnConfig)
    gnb: GnbConfig = field(default_factory=GnbConfig)
    methods: list = field(default_factory=lambda: ["lbp:none", "clbp:none", "clbp:rclbp"])
    classifiers: list = field(default_factory=lambda: ["knn", "gnb"])
    snr_levels: list = field(default_factory=lambda: [CLEAN, 50, 40, 30, 20])
    split_seed: int = 0
    noise_seed: int = 0
    train_fraction: float = 0.8
    stratify: bool = True
    denoise_train: bool = True
    quantize_noisy: bool = False
    k_folds: int = 10
    record_timing: bool = True
    workers: int = 1
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)

    def __post_init__(self):
        if not self.snr_levels:
            raise ValueError("snr_levels must not be empty")
        self.snr_levels = [parse_level(x) for x in self.snr_levels]
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.feature_mode not in ("lbp", "clbp"):
            raise ValueError(f"unknown feature mode {self.feature_mode!r}")
        for c in [self.classifier, *self.classifiers]:
            if c not in ("knn", "gnb"):
                raise ValueError(f"unknown classifier {c!r}; expected 'knn' or 'gnb'")
        for m in self.methods:
            parse_method(m)

    def classifier_config(self, name: str | None = None):
        name = name or self.classifier
        return self.knn if name == "knn" else self.gnb

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = copy.deepcopy(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        den = d.pop("denoise", {}) or {}
        if isinstance(den, str):
            den = {"mode": den}
        d["denoise"] = DenoiseConfig(
            mode=den.get("mode", "rclbp"),
            nl=NlMeansParams(**den.get("nl", {})),
            wav=WaveletParams(**den.get("wav", {})),
        )
        d["clbp"] = ClbpParams(**d.get("clbp", {}))
        d["knn"] = KnnConfig(**d.get("knn", {}))
        d["gnb"] = GnbConfig(**d.get("gnb", {}))
        d["synthetic"] = SyntheticConfig(**d.get("synthetic", {}))
        return cls(**d)


def parse_level(x):
    """``"clean"`` / ``"none"`` / ``inf`` mean no noise; anything else is a dB value."""
    if isinstance(x, str):
        s = x.strip().lower()
        if s in (CLEAN, "none", "inf"):
            return CLEAN
        x = float(s)
    x = float(x)
    if math.isinf(x) and x > 0:
        return CLEAN
    if not math.isfinite(x):
        raise ValueError(f"invalid SNR level {x}")
    return int(x) if x.is_integer() else x


def level_snr(level) -> float:
    return math.inf if level == CLEAN else float(level)


def level_stream(level) -> int:
    """Seed stream tag of an SNR level, independent of the other levels in the sweep."""
    return 0 if level == CLEAN else 1 + int(round(float(level) * 1000)) % (1 << 62)


def parse_method(m: str) -> tuple[str, str]:
    feat, _, mode = m.partition(":")
    mode = mode or "none"
    if feat not in ("lbp", "clbp"):
        raise ValueError(f"bad method {m!r}: feature must be 'lbp' or 'clbp'")
    if mode not in DENOISE_MODES:
        raise ValueError(f"bad method {m!r}: denoise mode must be one of {DENOISE_MODES}")
    return feat, mode


# --------------------------------------------------------------------------
# Dataset
# --------------------------------------------------------------------------


def scan_dataset(root) -> list[tuple[Path, str]]:
    """``(path, class)`` pairs for ``root/<class>/*.pgm|png``, sorted by class then file."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} does not exist")
    classes = sorted(p for p in root.iterdir() if p.is_dir())
    if not classes:
        raise ValueError(f"dataset root {root} has no class subdirectories")
    entries = []
    for cdir in classes:
        files = sorted(p for p in cdir.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
        if not files:
            raise ValueError(f"class directory {cdir} contains no .pgm/.png images")
        entries.extend((f, cdir.name) for f in files)
    return entries


def load_dataset(cfg: RunConfig) -> tuple[list[np.ndarray], list[str], list[str]]:
    """Images, labels and ordered class names of the configured dataset."""
    if cfg.dataset_root == "synthetic":
        s = cfg.synthetic
        images, labels = synth_corpus(s.n_per_class, s.size, s.seed)
        return images, labels, list(TEXTURE_KINDS)
    entries = scan_dataset(cfg.dataset_root)
    images = [load_image(p) for p, _ in entries]
    labels = [c for _, c in entries]
    return images, labels, sorted(set(labels))


def split_indices(labels, class_names, cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    idx = LabeledDataset(np.arange(len(labels), dtype=np.float64)[:, None], labels, class_names)
    train, test = stratified_split(idx, cfg.train_fraction, cfg.split_seed, cfg.stratify)
    return train.features[:, 0].astype(np.int64), test.features[:, 0].astype(np.int64)


def noisy_image(img, index: int, level, cfg: RunConfig) -> np.ndarray:
    if level == CLEAN:
        out = np.asarray(img, dtype=np.float64).copy()
    else:
        spec = NoiseSpec(level_snr(level), derive_seed(cfg.noise_seed, int(index), level_stream(level)))
        out = inject_gaussian_noise(img, spec)
    if cfg.quantize_noisy:
        out = to_uint8(out).astype(np.float64)
    return out


def _denoise_cfg(cfg: RunConfig, mode: str) -> DenoiseConfig:
    return DenoiseConfig(mode=mode, nl=cfg.denoise.nl, wav=cfg.denoise.wav)


def _features(images, feat: str, den: DenoiseConfig, cfg: RunConfig) -> np.ndarray:
    def one(img):
        return extract_features(rclbp_denoise(img, den), feat, cfg.clbp)

    if cfg.workers > 1 and len(images) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(one, images))
    else:
        rows = [one(im) for im in images]
    return np.array(rows)


def train_features(images, idx, feat: str, mode: str, cfg: RunConfig) -> np.ndarray:
    den = _denoise_cfg(cfg, mode if cfg.denoise_train else "none")
    return _features([images[i] for i in idx], feat, den, cfg)


def test_features(images, idx, level, feat: str, mode: str, cfg: RunConfig) -> np.ndarray:
    noisy = [noisy_image(images[i], i, level, cfg) for i in idx]
    return _features(noisy, feat, _denoise_cfg(cfg, mode), cfg)


# --------------------------------------------------------------------------
# Benchmark
# --------------------------------------------------------------------------


@dataclass
class BenchmarkRow:
    feature: str
    denoise: str
    classifier: str
    snr: object
    metrics: MetricsReport
    seconds: float

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "denoise": self.denoise,
            "classifier": self.classifier,
            "snr": self.snr,
            "precision": self.metrics.weighted_precision,
            "recall": self.metrics.weighted_recall,
            "f1": self.metrics.weighted_f1,
            "seconds": self.seconds,
            "metrics": self.metrics.to_dict(),
        }


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        return {"version": self.version, "config": self.config, "rows": [r.to_dict() for r in self.rows]}

    def find(self, feature, denoise, classifier, snr) -> BenchmarkRow:
        snr = parse_level(snr)
        for r in self.rows:
            if (r.feature, r.denoise, r.classifier, r.snr) == (feature, denoise, classifier, snr):
                return r
        raise KeyError((feature, denoise, classifier, snr))


def run_benchmark(cfg: RunConfig, log=None) -> BenchmarkReport:
    """Train on clean images, test on each SNR level, for every method and classifier.

    Rows are ordered by method, then SNR level, then classifier, as configured.
    """
    images, labels, class_names = load_dataset(cfg)
    tr_idx, te_idx = split_indices(labels, class_names, cfg)
    tr_labels = [labels[i] for i in tr_idx]
    te_labels = [labels[i] for i in te_idx]
    report = BenchmarkReport(config=cfg.to_dict())
    for method in cfg.methods:
        feat, mode = parse_method(method)
        try:
            Xtr = train_features(images, tr_idx, feat, mode, cfg)
        except Exception as exc:
            raise RuntimeError(f"method {method}, training features: {exc}") from exc
        train = LabeledDataset(Xtr, tr_labels, class_names)
        for level in cfg.snr_levels:
            t0 = time.perf_counter()
            try:
                Xte = test_features(images, te_idx, level, feat, mode, cfg)
            except Exception as exc:
                raise RuntimeError(f"method {method}, snr {level}: {exc}") from exc
            t_feat = time.perf_counter() - t0
            for clf in cfg.classifiers:
                t1 = time.perf_counter()
                pred = fit_predict(train, Xte, cfg.classifier_config(clf))
                metrics = evaluate(te_labels, pred, class_names)
                seconds = t_feat + time.perf_counter() - t1 if cfg.record_timing else 0.0
                report.rows.append(BenchmarkRow(feat, mode, clf, level, metrics, seconds))
                if log:
                    log(
                        f"{feat:>4} {mode:>12} {clf:>3} snr={level!s:>5} "
                        f"P={metrics.weighted_precision:.4f} R={metrics.weighted_recall:.4f} "
                        f"F1={metrics.weighted_f1:.4f}"
                    )
    return report


CSV_COLUMNS = ["feature", "denoise", "classifier", "snr", "precision", "recall", "f1", "seconds"]


def report_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        m = r.metrics
        w.writerow(
            [
                r.feature,
                r.denoise,
                r.classifier,
                r.snr,
                f"{m.weighted_precision:.4f}",
                f"{m.weighted_recall:.4f}",
                f"{m.weighted_f1:.4f}",
                f"{r.seconds:.4f}",
            ]
        )
    return buf.getvalue()


def write_report(report: BenchmarkReport, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --------------------------------------------------------------------------
# Feature CSV
# --------------------------------------------------------------------------


def write_feature_csv(path, features, labels) -> None:
    features = np.asarray(features, dtype=np.float64)
    dim = features.shape[1] if features.ndim == 2 else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label"] + [f"bin_{i}" for i in range(dim)])
        for lab, row in zip(labels, features):
            w.writerow([lab] + [repr(float(v)) for v in row])


def read_feature_csv(path) -> tuple[np.ndarray, list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["label"]:
        raise ValueError(f"{path}: missing 'label,bin_0,...' header")
    dim = len(rows[0]) - 1
    labels, feats = [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != dim + 1:
            raise ValueError(f"{path}:{n}: expected {dim + 1} fields, got {len(row)}")
        labels.append(row[0])
        feats.append([float(v) for v in row[1:]])
    return np.array(feats, dtype=np.float64).reshape(len(labels), dim), labels


def _dataset_from_csv(path, class_names=None) -> LabeledDataset:
    X, y = read_feature_csv(path)
    return LabeledDataset(X, y, class_names or sorted(set(y)))


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _csv_list(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration (override --config values)")
    g.add_argument("--config", type=Path, help="JSON run configuration")
    g.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    g.add_argument("--dataset-root", help="dataset directory root/<class>/*.pgm|png, or 'synthetic'")
    g.add_argument("--feature-mode", choices=("lbp", "clbp"))
    g.add_argument("--denoise-mode", choices=DENOISE_MODES)
    g.add_argument("--search-radius", type=int)
    g.add_argument("--patch-radius", type=int)
    g.add_argument("--h", dest="nl_h", type=float, help="NL-means smoothing width (gray levels)")
    g.add_argument("--kernel-sigma", type=float)
    g.add_argument("--levels", type=int, help="wavelet decomposition depth")
    g.add_argument("--basis", help="wavelet basis (haar)")
    g.add_argument("--neighbors", type=int, help="CLBP neighbour count P")
    g.add_argument("--radius", type=float, help="CLBP radius R")
    g.add_argument("--classifier", choices=("knn", "gnb"))
    g.add_argument("--knn-k", type=int)
    g.add_argument("--knn-p", type=float)
    g.add_argument("--knn-weighting", choices=("uniform", "distance"))
    g.add_argument("--var-smoothing", type=float)
    g.add_argument("--methods", type=_csv_list, help="benchmark methods, e.g. lbp:none,clbp:none,clbp:rclbp")
    g.add_argument("--classifiers", type=_csv_list, help="benchmark classifiers, e.g. knn,gnb")
    g.add_argument("--snr-levels", type=_csv_list, help="e.g. clean,50,40,30,20")
    g.add_argument("--split-seed", type=int)
    g.add_argument("--noise-seed", type=int)
    g.add_argument("--train-fraction", type=float)
    g.add_argument("--no-stratify", action="store_true", default=None)
    g.add_argument("--denoise-train", choices=("on", "off"))
    g.add_argument("--quantize-noisy", action="store_true", default=None, help="round noisy test images to 8 bits")
    g.add_argument("--k-folds", type=int)
    g.add_argument("--no-timing", action="store_true", default=None, help="write seconds as 0 (byte-stable reports)")
    g.add_argument("--workers", type=int)
    g.add_argument("--synthetic-n", type=int, help="synthetic samples per class")
    g.add_argument("--synthetic-size", type=int)
    g.add_argument("--synthetic-seed", type=int)
    return p


_FLAT_OVERRIDES = {
    "dataset_root": ("dataset_root",),
    "feature_mode": ("feature_mode",),
    "denoise_mode": ("denoise", "mode"),
    "search_radius": ("denoise", "nl", "search_radius"),
    "patch_radius": ("denoise", "nl", "patch_radius"),
    "nl_h": ("denoise", "nl", "h"),
    "kernel_sigma": ("denoise", "nl", "kernel_sigma"),
    "levels": ("denoise", "wav", "levels"),
    "basis": ("denoise", "wav", "basis"),
    "neighbors": ("clbp", "neighbors"),
    "radius": ("clbp", "radius"),
    "classifier": ("classifier",),
    "knn_k": ("knn", "k"),
    "knn_p": ("knn", "p"),
    "knn_weighting": ("knn", "weighting"),
    "var_smoothing": ("gnb", "var_smoothing"),
    "methods": ("methods",),
    "classifiers": ("classifiers",),
    "snr_levels": ("snr_levels",),
    "split_seed": ("split_seed",),
    "noise_seed": ("noise_seed",),
    "train_fraction": ("train_fraction",),
    "k_folds": ("k_folds",),
    "workers": ("workers",),
    "synthetic_n": ("synthetic", "n_per_class"),
    "synthetic_size": ("synthetic", "size"),
    "synthetic_seed": ("synthetic", "seed"),
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    d = RunConfig().to_dict()
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValueError(f"config {args.config} must be a JSON object")
        _deep_update(d, loaded)
    for attr, keys in _FLAT_OVERRIDES.items():
        v = getattr(args, attr, None)
        if v is None:
            continue
        node = d
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = v
    if getattr(args, "no_stratify", None):
        d["stratify"] = False
    if getattr(args, "denoise_train", None):
        d["denoise_train"] = args.denoise_train == "on"
    if getattr(args, "quantize_noisy", None):
        d["quantize_noisy"] = True
    if getattr(args, "no_timing", None):
        d["record_timing"] = False
    return RunConfig.from_dict(d)


def _deep_update(base: dict, new: dict) -> None:
    for k, v in new.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict):
            _deep_update(base[k], v)
        else:
            base[k] = v


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_synth(args, cfg: RunConfig) -> None:
    out = Path(args.out)
    if args.kind:
        save_image(synth_texture(args.kind, args.size, args.period, args.seed), out)
        return
    s = cfg.synthetic
    images, labels = synth_corpus(s.n_per_class, s.size, s.seed)
    counters: dict[str, int] = {}
    for img, lab in zip(images, labels):
        d = out / lab
        d.mkdir(parents=True, exist_ok=True)
        n = counters.get(lab, 0)
        counters[lab] = n + 1
        save_image(img, d / f"{lab}_{n:04d}.{args.format}")
    _info(f"wrote {len(images)} images in {len(counters)} classes to {out}")


def cmd_inject_noise(args, cfg: RunConfig) -> None:
    img = load_image(args.input)
    save_image(inject_gaussian_noise(img, NoiseSpec(level_snr(parse_level(args.snr)), args.seed)), args.output)


def cmd_denoise(args, cfg: RunConfig) -> None:
    img = load_image(args.input)
    if args.debug_shrink and cfg.denoise.mode == "rclbp":
        stages = rclbp_stages(img, cfg.denoise)
        out = stages.restored
        Path(args.debug_shrink).write_text(json.dumps(stages.shrink.to_dict(), indent=2) + "\n")
    else:
        if args.debug_shrink:
            raise ValueError("--debug-shrink requires --denoise-mode rclbp")
        out = rclbp_denoise(img, cfg.denoise)
    save_image(out, args.output)


def cmd_extract(args, cfg: RunConfig) -> None:
    images, labels, class_names = load_dataset(cfg)
    mode = cfg.denoise.mode
    level = parse_level(args.snr)
    if args.split == "all":
        idx = np.arange(len(images))
    else:
        tr, te = split_indices(labels, class_names, cfg)
        idx = tr if args.split == "train" else te
    if args.split == "train":
        if level != CLEAN:
            raise ValueError("training features are always extracted from clean images")
        X = train_features(images, idx, cfg.feature_mode, mode, cfg)
    else:
        X = test_features(images, idx, level, cfg.feature_mode, mode, cfg)
    write_feature_csv(args.out, X, [labels[i] for i in idx])
    _info(f"wrote {len(idx)} x {X.shape[1] if X.ndim == 2 else 0} features to {args.out}")


def cmd_eval(args, cfg: RunConfig) -> None:
    train = _dataset_from_csv(args.train)
    Xte, yte = read_feature_csv(args.test)
    class_names = sorted(set(train.class_names) | set(yte))
    train = LabeledDataset(train.features, train.labels, class_names)
    pred = fit_predict(train, Xte, cfg.classifier_config())
    report = evaluate(yte, pred, class_names)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.confusion:
        Path(args.confusion).write_text(report.confusion_csv())


def cmd_crossval(args, cfg: RunConfig) -> None:
    ds = _dataset_from_csv(args.features)
    res = kfold_cv(ds, cfg.k_folds, cfg.classifier_config(), cfg.split_seed)
    text = json.dumps(res.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_benchmark(args, cfg: RunConfig) -> None:
    report = run_benchmark(cfg, log=None if args.quiet else _info)
    if args.out:
        write_report(report, args.out, args.format)
    else:
        sys.stdout.write(report_csv(report))


def build_parser() -> argparse.ArgumentParser:
    parent = _config_parent()
    parser = argparse.ArgumentParser(prog="rclbp", description="Noise-robust CLBP defect classification")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[parent], help="write the synthetic corpus or one texture")
    p.add_argument("--out", required=True, help="output directory (corpus) or image file (--kind)")
    p.add_argument("--kind", choices=TEXTURE_KINDS, help="write a single texture of this kind")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--period", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("inject-noise", parents=[parent], help="add Gaussian noise at a target SNR")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--snr", required=True, help="target SNR in dB, or 'none'")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_inject_noise)

    p = sub.add_parser("denoise", parents=[parent], help="denoise one image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--debug-shrink", metavar="JSON", help="write the BayesShrink report here")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("extract", parents=[parent], help="write a feature CSV for the dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--split", choices=("all", "train", "test"), default="all")
    p.add_argument("--snr", default=CLEAN, help="noise level applied before denoising (test/all)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", parents=[parent], help="train on one feature CSV, score another")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", help="metrics JSON (default: stdout)")
    p.add_argument("--confusion", help="confusion matrix CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("crossval", parents=[parent], help="stratified k-fold cross-validation")
    p.add_argument("--features", required=True)
    p.add_argument("--out", help="JSON output (default: stdout)")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("benchmark", parents=[parent], help="run the clean/noisy comparison matrix")
    p.add_argument("--out", help="report path (.csv or .json; default: CSV on stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(json.dumps(cfg.to_dict(), indent=2) + "\n")
            return 0
        args.func(args, cfg)
    except Exception as exc:  # single-line error, nonzero exit
        msg = str(exc).replace("\n", " ")
        print(f"rclbp: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
