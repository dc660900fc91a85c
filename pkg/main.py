import argparse
import dataclasses
import json
import logging
import sys

import config
import data_manager
from fermion_hamiltonian import HamiltonianFormatError, exact_ground_energy, hamiltonian_terms, load_hamiltonian
from operator_encoding import distinct_x_count, encode_hamiltonian, group_report
from selftest import run_selftest
from subspace_code import (CodeCollisionError, RleSettings, SubspaceCode, build_lookup, encode_minimal,
                           max_modes_search, qubit_bounds, rle_search, verify_code)
from utils import binomial, bits_to_string, compression_bound, fixed_weight_states
from vqe_driver import (FixedCodePolicy, VqeConfig, create_code_policy, potential_energy_scan, result_table,
                        run_vqe, save_trace_csv, scan_table)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class CommandFailure(Exception):
    """Domain failure reported with exit code 1."""


def emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _load(path):
    return load_hamiltonian(data_manager.hamiltonian_path(path))


def _code_or_identity(path, modes, electrons):
    if path is None:
        return SubspaceCode.identity(modes, electrons)
    code = SubspaceCode.load(path)
    if (code.modes, code.electrons) != (modes, electrons):
        raise ValueError(f"Code {path} encodes M={code.modes}, N={code.electrons}; "
                         f"Hamiltonian has M={modes}, N={electrons}")
    return code


# --- Commands ---

def cmd_encode(args):
    m, n = args.modes, args.electrons
    if args.qubits is None:
        if m <= 2 * n:
            raise ValueError(f"Minimal-Q search needs M > 2N, got M={m}, N={n}; pass --qubits")
        if args.aux:
            raise ValueError("--aux needs an explicit --qubits base")
        code = encode_minimal(m, n, seed=args.seed, max_attempts=args.max_attempts,
                              precheck=not args.no_precheck, threads=args.threads)
    else:
        total = args.qubits + args.aux
        if total >= m:
            raise ValueError(f"Q + aux = {total} must stay below M = {m}")
        code = rle_search(m, n, total, seed=args.seed, max_attempts=args.max_attempts,
                          precheck=not args.no_precheck, threads=args.threads, aux_qubits=args.aux)
    if code is None:
        raise CommandFailure(f"RLE exhausted {args.max_attempts} attempts for M={m}, N={n}"
                             f"{'' if args.qubits is None else f', Q={args.qubits + args.aux}'}")
    out = args.out or data_manager.code_artifact_path(f"M{m}_N{n}_Q{code.qubits}_s{args.seed}")
    code.save(out)
    bound = compression_bound(m, n)
    payload = {"path": out, "qubits": code.qubits, "aux_qubits": code.aux_qubits, "bound": bound,
               "attempts": code.attempts, "seed": code.seed}
    emit(args, payload, f"Q = {code.qubits} (aux {code.aux_qubits}), bound ceil(2N log2 M) = {bound}, "
                        f"attempts = {code.attempts}\nwritten to {out}")
    return EXIT_OK


def cmd_bounds(args):
    b = qubit_bounds(args.modes, args.electrons)
    payload = {"modes": b.modes, "electrons": b.electrons, "gv_qubits": b.gv_qubits,
               "impossibility_qubits": b.impossibility_qubits, "compression_bound": b.compression_bound}
    emit(args, payload, f"GV existence bound:   {b.gv_qubits}\n"
                        f"impossibility bound:  {b.impossibility_qubits}\n"
                        f"ceil(2N log2 M):      {b.compression_bound}")
    return EXIT_OK


def cmd_table(args):
    result = max_modes_search(args.electrons, args.qubits, args.max_modes, budget_seconds=args.budget_seconds,
                              seed=args.seed, attempts_per_mode=args.max_attempts, threads=args.threads)
    emit(args, result.to_dict(), f"N={args.electrons} Q={args.qubits}: max M = {result.max_modes} "
                                 f"({result.elapsed_seconds:.1f}s"
                                 f"{', budget exhausted' if result.budget_exhausted else ''})")
    return EXIT_OK


def cmd_groups(args):
    h = _load(args.hamiltonian)
    code = _code_or_identity(args.code, h.modes, h.electrons)
    terms = hamiltonian_terms(h)
    groups = encode_hamiltonian(terms, code)
    report = group_report(groups, h.modes)
    report["distinct_unencoded_x"] = distinct_x_count(terms)
    lines = [f"{len(groups)} measurement groups (bound {report['bound']}, "
             f"{report['distinct_unencoded_x']} distinct unencoded X-strings)"]
    for g in report["groups"]:
        lines.append(f"  {g['x_key']} {g['part']} terms={g['term_count']:<3} pivot={g['pivot']} cnots={g['cnots']}")
    emit(args, report, "\n".join(lines))
    if len(groups) > report["bound"]:
        raise CommandFailure(f"Group count {len(groups)} exceeds the bound {report['bound']}")
    return EXIT_OK


def _vqe_config(args):
    restarts = args.restarts
    if restarts is None:
        restarts = config.VQE_BENCHMARK_RESTARTS if args.benchmark else config.VQE_DEFAULT_RESTARTS
    return VqeConfig(layers=args.layers, restarts=restarts, seed=args.seed, shots=args.shots,
                     init_scale=args.init_scale, max_iterations=args.max_iterations, threads=args.threads)


def cmd_vqe(args):
    cfg = _vqe_config(args)
    if args.code is not None:
        policy = FixedCodePolicy(path=args.code)
    elif args.policy in ("rle", "minimal"):
        policy = create_code_policy(args.policy, settings=RleSettings(seed=args.seed, threads=args.threads))
    else:
        policy = create_code_policy(args.policy)

    if len(args.hamiltonian) > 1:
        points = potential_energy_scan([data_manager.hamiltonian_path(p) for p in args.hamiltonian], policy, cfg,
                                       labels=args.hamiltonian)
        payload = {"points": [p.to_dict() for p in points], "config": dataclasses.asdict(cfg)}
        if args.out:
            data_manager.save_json(payload, args.out)
        emit(args, payload, scan_table(points))
        return EXIT_OK

    h = _load(args.hamiltonian[0])
    code = policy.code_for(h.modes, h.electrons)
    result = run_vqe(h, code, cfg)
    if args.out:
        data_manager.save_json(result.to_dict(), args.out)
    if args.trace_csv:
        save_trace_csv(result, args.trace_csv)
    emit(args, result.to_dict(), result_table(result))
    return EXIT_OK


def cmd_fci(args):
    h = _load(args.hamiltonian)
    energy = exact_ground_energy(h)
    emit(args, {"modes": h.modes, "electrons": h.electrons, "exact_energy": energy}, f"{energy:.12f}")
    return EXIT_OK


def cmd_selftest(args):
    report = run_selftest(args.modes, args.electrons, args.trials, seed=args.seed,
                          inject_sign_flip=args.inject_sign_flip)
    emit(args, report.to_dict(), f"{report.passed}/{report.trials} passed")
    if not report.ok:
        raise CommandFailure(f"{report.trials - report.passed} of {report.trials} trials disagree with the oracle")
    return EXIT_OK


def cmd_decode_check(args):
    code = SubspaceCode.load(args.code)
    decoder = build_lookup(code)
    failures = 0
    for occupation in fixed_weight_states(code.modes, code.electrons):
        decoded = decoder.decode(code.encode(occupation))
        if decoded is None or not (decoded == occupation).all():
            failures += 1
            logger.warning("Round trip failed for %s", bits_to_string(occupation))
    report = verify_code(code)
    payload = {"states": binomial(code.modes, code.electrons), "failures": failures,
               "verification": report.to_dict()}
    emit(args, payload, f"{payload['states'] - failures}/{payload['states']} states round-trip, "
                        f"verification {'valid' if report.valid else 'INVALID'}")
    if failures or not report.valid:
        raise CommandFailure(f"Code {args.code} failed the decode check")
    return EXIT_OK


# --- Parser ---

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker cap")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="warnings only")

    parser = argparse.ArgumentParser(prog="subspace-encode", parents=[common],
                                     description="Particle-conserving qubit encodings, FED decoding and VQE.")
    parser.set_defaults(json=False, threads=1, quiet=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common], help="search an RLE code")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--electrons", type=int, required=True)
    p.add_argument("--qubits", type=int)
    p.add_argument("--seed", type=int, default=config.RLE_DEFAULT_SEED)
    p.add_argument("--aux", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=config.RLE_DEFAULT_MAX_ATTEMPTS)
    p.add_argument("--no-precheck", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("bounds", parents=[common], help="qubit-count bounds")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--electrons", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", parents=[common], help="largest encodable M at fixed N, Q")
    p.add_argument("--electrons", type=int, required=True)
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--max-modes", type=int, required=True)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--seed", type=int, default=config.RLE_DEFAULT_SEED)
    p.add_argument("--max-attempts", type=int, default=config.RLE_DEFAULT_MAX_ATTEMPTS)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("groups", parents=[common], help="measurement groups of an encoded Hamiltonian")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--code")
    p.set_defaults(func=cmd_groups)

    p = sub.add_parser("vqe", parents=[common], help="VQE against FED-decoded energies")
    p.add_argument("--hamiltonian", nargs="+", required=True)
    p.add_argument("--code")
    p.add_argument("--policy", default="rle", choices=["rle", "minimal", "identity", "jw"])
    p.add_argument("--layers", type=int, default=config.VQE_DEFAULT_LAYERS)
    p.add_argument("--seed", type=int, default=config.VQE_DEFAULT_SEED)
    p.add_argument("--shots", type=int)
    p.add_argument("--restarts", type=int, help=f"default {config.VQE_DEFAULT_RESTARTS}, "
                                                 f"{config.VQE_BENCHMARK_RESTARTS} with --benchmark")
    p.add_argument("--benchmark", action="store_true", help="benchmark-mode restart count")
    p.add_argument("--init-scale", type=float, default=config.VQE_DEFAULT_INIT_SCALE)
    p.add_argument("--max-iterations", type=int, default=config.VQE_DEFAULT_MAX_ITERATIONS)
    p.add_argument("--out")
    p.add_argument("--trace-csv")
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("fci", parents=[common], help="exact ground energy")
    p.add_argument("--hamiltonian", required=True)
    p.set_defaults(func=cmd_fci)

    p = sub.add_parser("selftest", parents=[common], help="FED vs dense oracle on random instances")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--electrons", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("decode-check", parents=[common], help="lookup round trip over every weight-N state")
    p.add_argument("--code", required=True)
    p.set_defaults(func=cmd_decode_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CommandFailure, CodeCollisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (HamiltonianFormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
