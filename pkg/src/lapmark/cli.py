"""Command line front end.

Exit codes: 0 success, 1 parse/format errors (bad video, bad sidecar,
missing files), 2 capacity/config errors (bad flags, oversize payload).
SNR is defined as SNR_dB = -20*log10(g) where the attack noise scale is
g times the host scale lambda1.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from .codec import DecoderParams, EmbedConfig
from .errors import CapacityError, ConfigError, FormatError, ResourceLimitError
from .model import estimate_laplace
from .montecarlo import (
    SweepConfig,
    ber_records_to_csv,
    run_ber_sweep,
    run_theory,
    theory_records_to_csv,
)
from .video import (
    embed_frame,
    extract_frame,
    payload_maps_from_json,
    payload_maps_to_json,
    pool_coefficients,
    predicted_psnr,
    psnr,
)
from .y4m import read_video, write_y4m

_SNR_HELP = (
    "comma separated SNR grid in dB; SNR_dB = -20*log10(g), noise scale = g*lambda1"
)


def _floats(ctx, param, value):
    try:
        return tuple(float(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {value!r}")


def _ints(ctx, param, value):
    try:
        return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {value!r}")


def _decoders(ctx, param, value):
    names = tuple(v.strip() for v in value.split(","))
    for v in names:
        if v not in ("optimum", "suboptimum"):
            raise click.BadParameter(f"unknown decoder {v!r}")
    return names


def _emit(text: str, out_path) -> None:
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _parse_bits(text: str) -> list[int]:
    if not text or set(text) - {"0", "1"}:
        raise ConfigError(f"payload must be a non-empty string of 0/1, got {text!r}")
    return [int(c) for c in text]


@click.group()
def cli():
    """Watermark embedding, decoding and error-rate analysis."""


@cli.command()
@click.option("--snr", default="0,5,10", show_default=True, callback=_floats,
              help=_SNR_HELP)
@click.option("--n", "n_grid", default="8,20,60", show_default=True,
              callback=_ints, help="comma separated spreading lengths")
@click.option("--a", default=1.0, show_default=True, help="watermark amplitude")
@click.option("--lambda1", default=1.0, show_default=True,
              help="host Laplacian scale")
@click.option("--trials", default=100_000, show_default=True,
              help="Monte Carlo trials per cell")
@click.option("--seed", default=0, show_default=True)
@click.option("--step-exponent", default=8, show_default=True,
              help="convolution lattice step is a/2^k")
@click.option("--workers", default=1, show_default=True,
              help="threads per cell; results do not depend on this")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV output file (stdout when omitted)")
@click.option("--plot", type=click.Path(dir_okay=False), default=None,
              help="render the comparison curves to this image file")
def theory(snr, n_grid, a, lambda1, trials, seed, step_exponent, workers, out, plot):
    """Exact error probability vs closed-form approximation vs simulation."""
    cfg = SweepConfig(snr_db=snr, n=n_grid, a=a, host_scale=lambda1,
                      trials=trials, seed=seed, decoders=("suboptimum",))
    records = run_theory(cfg, step_exponent=step_exponent, workers=workers)
    _emit(theory_records_to_csv(records), out)
    if plot is not None:
        from .plots import save_theory_figure

        save_theory_figure(records, plot)


@cli.command("ber-sweep")
@click.option("--snr", default="-5,0,5,10,15", show_default=True, callback=_floats,
              help=_SNR_HELP)
@click.option("--n", "n_grid", default="120", show_default=True, callback=_ints,
              help="comma separated spreading lengths")
@click.option("--a", default=1.0, show_default=True, help="watermark amplitude")
@click.option("--lambda1", default=1.0, show_default=True,
              help="host Laplacian scale")
@click.option("--trials", default=100_000, show_default=True,
              help="Monte Carlo trials per cell")
@click.option("--seed", default=0, show_default=True)
@click.option("--decoder", default="optimum,suboptimum", show_default=True,
              callback=_decoders, help="comma subset of optimum,suboptimum")
@click.option("--workers", default=1, show_default=True,
              help="threads per cell; results do not depend on this")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV output file (stdout when omitted)")
@click.option("--plot", type=click.Path(dir_okay=False), default=None,
              help="render BER curves to this image file")
def ber_sweep(snr, n_grid, a, lambda1, trials, seed, decoder, workers, out, plot):
    """Monte Carlo BER over an SNR grid for both decoders."""
    cfg = SweepConfig(snr_db=snr, n=n_grid, a=a, host_scale=lambda1,
                      trials=trials, seed=seed, decoders=decoder)
    records = run_ber_sweep(cfg, workers=workers)
    _emit(ber_records_to_csv(records), out)
    if plot is not None:
        from .plots import save_ber_figure

        save_ber_figure(records, plot)


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False),
              help="input video (Y4M, or raw YUV with --width/--height)")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="watermarked Y4M output")
@click.option("--key", required=True, help="secret key string")
@click.option("--a", default=4.0, show_default=True, help="watermark amplitude")
@click.option("--n", "spread_n", default=120, show_default=True,
              help="coefficients per bit")
@click.option("--payload", default=None,
              help="bit string (e.g. 01101) embedded into every frame")
@click.option("--random-bits", "random_bits", type=int, default=None,
              help="embed this many seeded random bits per frame instead")
@click.option("--seed", default=0, show_default=True,
              help="payload RNG seed for --random-bits")
@click.option("--map", "map_path", type=click.Path(dir_okay=False), default=None,
              help="payload map sidecar (default: OUT + .map.json)")
@click.option("--width", type=int, default=None, help="raw YUV width")
@click.option("--height", type=int, default=None, help="raw YUV height")
def embed(in_path, out_path, key, a, spread_n, payload, random_bits, seed,
          map_path, width, height):
    """Embed a payload into every frame of a video."""
    if (payload is None) == (random_bits is None):
        raise ConfigError("provide exactly one of --payload or --random-bits")
    video = read_video(in_path, width, height)
    if not video.frames:
        raise FormatError("input video has no frames")
    cfg = EmbedConfig(strength_a=a, spread_n=spread_n, key=key.encode("utf-8"))

    planes, maps = [], []
    for idx, frame in enumerate(video):
        if payload is not None:
            bits = _parse_bits(payload)
        else:
            if random_bits < 1:
                raise ConfigError(f"--random-bits must be >= 1, got {random_bits}")
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(idx,))
            )
            bits = rng.integers(0, 2, size=random_bits).tolist()
        marked, pmap = embed_frame(frame, bits, cfg)
        planes.append(marked)
        maps.append(pmap)
    write_y4m(video.with_luma(planes), out_path)
    sidecar = map_path if map_path is not None else out_path + ".map.json"
    with open(sidecar, "w") as fh:
        fh.write(payload_maps_to_json(maps))
    total = sum(len(m.bits) for m in maps)
    click.echo(f"embedded {total} bits into {len(maps)} frames; map: {sidecar}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False),
              help="watermarked video")
@click.option("--map", "map_path", type=click.Path(dir_okay=False), default=None,
              help="payload map sidecar written by embed")
@click.option("--key", default=None, help="secret key (when no --map)")
@click.option("--a", default=4.0, show_default=True, help="watermark amplitude")
@click.option("--n", "spread_n", default=120, show_default=True,
              help="coefficients per bit")
@click.option("--bits", "num_bits", type=int, default=None,
              help="payload length per frame (when no --map)")
@click.option("--decoder", default="suboptimum", show_default=True,
              type=click.Choice(["suboptimum", "optimum"]))
@click.option("--lambda1", type=float, default=None,
              help="host scale for the optimum decoder; estimated per frame "
                   "from the pool coefficients when omitted")
@click.option("--g", "g_ratio", type=float, default=1.0, show_default=True,
              help="noise-to-host scale ratio assumed by the optimum decoder")
@click.option("--expect", default=None,
              help="reference bit string for BER (overrides map bits)")
@click.option("--width", type=int, default=None, help="raw YUV width")
@click.option("--height", type=int, default=None, help="raw YUV height")
def extract(in_path, map_path, key, a, spread_n, num_bits, decoder, lambda1,
            g_ratio, expect, width, height):
    """Decode per-frame payload bits and report BER against a reference."""
    video = read_video(in_path, width, height)
    maps = None
    if map_path is not None:
        with open(map_path) as fh:
            maps = payload_maps_from_json(fh.read())
        if len(maps) != len(video.frames):
            raise FormatError(
                f"payload map covers {len(maps)} frames, video has "
                f"{len(video.frames)}"
            )
    elif key is None or num_bits is None:
        raise ConfigError("without --map, both --key and --bits are required")
    cfg = None if maps else EmbedConfig(
        strength_a=a, spread_n=spread_n, key=key.encode("utf-8")
    )

    total_bits = 0
    total_errors = 0
    for idx, frame in enumerate(video):
        params = None
        if decoder == "optimum":
            scale = lambda1
            if scale is None:
                scale = estimate_laplace(pool_coefficients(frame)).scale
            eff_a = maps[idx].strength_a if maps else a
            params = DecoderParams(host_scale=scale, g=g_ratio, strength_a=eff_a)
        source = maps[idx] if maps else cfg
        decoded = extract_frame(frame, source, decoder=params, kind=decoder,
                                num_bits=num_bits)
        line = f"frame={idx} bits={''.join(str(b) for b in decoded)}"
        reference = None
        if expect is not None:
            reference = _parse_bits(expect)
        elif maps is not None:
            reference = list(maps[idx].bits)
        if reference is not None:
            if len(reference) != len(decoded):
                raise ConfigError(
                    f"reference has {len(reference)} bits, decoded "
                    f"{len(decoded)}"
                )
            errs = sum(d != r for d, r in zip(decoded, reference))
            total_errors += errs
            total_bits += len(decoded)
            line += f" errors={errs}/{len(decoded)}"
        click.echo(line)
    if total_bits:
        click.echo(
            f"total bits={total_bits} errors={total_errors} "
            f"ber={total_errors / total_bits:.6g}"
        )


@cli.command()
@click.option("--ref", "ref_path", required=True, type=click.Path(dir_okay=False),
              help="original video")
@click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False),
              help="watermarked video")
@click.option("--map", "map_path", type=click.Path(dir_okay=False), default=None,
              help="payload map; enables the predicted PSNR column")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV output file (stdout when omitted)")
@click.option("--width", type=int, default=None, help="raw YUV width")
@click.option("--height", type=int, default=None, help="raw YUV height")
def metrics(ref_path, in_path, map_path, out, width, height):
    """Per-frame PSNR between two videos, plus the model prediction."""
    ref = read_video(ref_path, width, height)
    test = read_video(in_path, width, height)
    if len(ref.frames) != len(test.frames):
        raise FormatError(
            f"frame count mismatch: {len(ref.frames)} vs {len(test.frames)}"
        )
    maps = None
    if map_path is not None:
        with open(map_path) as fh:
            maps = payload_maps_from_json(fh.read())
        if len(maps) != len(ref.frames):
            raise FormatError(
                f"payload map covers {len(maps)} frames, video has "
                f"{len(ref.frames)}"
            )
    lines = ["frame,psnr_db,predicted_psnr_db"]
    for idx, (rf, tf) in enumerate(zip(ref, test)):
        measured = psnr(rf, tf)
        if maps is not None:
            m = maps[idx]
            cfg = EmbedConfig(strength_a=m.strength_a, spread_n=m.spread_n,
                              key=m.key)
            predicted = format(
                predicted_psnr(cfg, len(m.bits), rf.width * rf.height), ".12g"
            )
        else:
            predicted = ""
        lines.append(f"{idx},{format(measured, '.12g')},{predicted}")
    _emit("\n".join(lines) + "\n", out)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="lapmark", standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        sys.exit(1)
    except click.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    except (CapacityError, ConfigError, ResourceLimitError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except FormatError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
