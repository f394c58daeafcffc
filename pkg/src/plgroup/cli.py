"""Command-line front end.

Subcommands:

  verify-identities   run the built-in identity suite, PASS/FAIL per item
  build               compile a presentation into a group bundle file
  wp                  decide whether a word is trivial in the extension group
  growth              print ball sizes for F or for the extension group
  exchange            run one side of the key exchange over TCP
  demo                run both sides in-process and print the transcript

Word syntax: whitespace-separated letters ``a b t1 t2 ...``; a trailing
``^-1`` or an uppercase letter marks an inverse (``A`` = ``a^-1``).

Exit codes: 0 success, 1 verification/agreement failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys

from .aag import ExchangeParams
from .errors import PLGroupError
from .extension import (SAMPLE_PRESENTATION, GroupContext, SourcePresentation,
                        build_context, context_from_bundle)
from .rng import derive_seed
from .wire import (SocketTransport, Transcript, run_exchange, run_local_exchange)


def _load_context(path: str | None) -> GroupContext:
    if path is None:
        return build_context()
    with open(path) as fh:
        return context_from_bundle(json.load(fh))


def _identity_checks():
    """The identity suite: (label, callable) pairs, each returning bool."""
    from .autf import beta_project, hat_generators, lift
    from .groupf import generator_pair, is_identity, presentation_relators
    from .groupt import TElement, derived_generators, t_is_identity
    from .plmap import LineMap, phi_to_line
    from .dyadic import Dyadic

    def t_relations():
        return (t_is_identity((3, 3, 3)) and t_is_identity((1, 3, 1, 3))
                and not t_is_identity((3,)) and not t_is_identity((1, 3)))

    def alpha_map():
        return phi_to_line(generator_pair(0).to_interval_map()) == LineMap.translation(-1)

    def beta_map():
        expected = LineMap(((Dyadic(0), Dyadic(0)), (Dyadic(2), Dyadic(1))))
        return phi_to_line(generator_pair(1).to_interval_map()) == expected

    def f_relators():
        r1, r2 = presentation_relators()
        return is_identity(r1) and is_identity(r2)

    def free_subgroup():
        from .groupt import free_generators
        u, v = free_generators()
        return not u.is_identity and not v.is_identity and u * v != v * u

    def hat_projections():
        a, b, c, d = derived_generators()
        one = TElement.identity()
        ah, bh, ch, dh = hat_generators()
        return (beta_project(ah) == (a, one) and beta_project(bh) == (b, one)
                and beta_project(ch) == (one, c) and beta_project(dh) == (one, d))

    def extension_relators():
        ctx = build_context()
        return all(ctx.is_identity(r) for r in ctx.ext_presentation.relators)

    return [
        ("T relation C^3 = 1 and (A C)^2 = 1", t_relations),
        ("x0 conjugates to the unit left translation", alpha_map),
        ("x1 conjugates to the three-piece line map", beta_map),
        ("F presentation relators are trivial", f_relators),
        ("free subgroup generators u, v nontrivial and non-commuting", free_subgroup),
        ("hat generators project to (a,1), (b,1), (1,c), (1,d)", hat_projections),
        ("extension relators all trivial", extension_relators),
    ]


def cmd_verify_identities(args) -> int:
    failures = 0
    for label, check in _identity_checks():
        try:
            ok = check()
        except PLGroupError:
            ok = False
        print(f"{'PASS' if ok else 'FAIL'}  {label}")
        if not ok:
            failures += 1
    return 1 if failures else 0


def cmd_build(args) -> int:
    if args.presentation:
        with open(args.presentation) as fh:
            spec = json.load(fh)
        pres = SourcePresentation.from_strings(spec["generators"], spec["relators"])
    else:
        pres = SAMPLE_PRESENTATION
    ctx = GroupContext(pres)
    bundle = ctx.bundle_dict()
    with open(args.out, "w") as fh:
        json.dump(bundle, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"bundle written to {args.out} (digest {bundle['digest'][:16]})")
    return 0


def cmd_wp(args) -> int:
    ctx = _load_context(args.group)
    word = ctx.parse_word(args.word)
    print("TRIVIAL" if ctx.is_identity(word) else "NONTRIVIAL")
    return 0


def cmd_growth(args) -> int:
    if args.group is None and not args.extension:
        from .groupf import growth_series
        series = growth_series(args.max, [(1,), (2,)], budget=args.budget)
        name = "F over {a, b}"
    else:
        from .extension import growth_series
        ctx = _load_context(args.group)
        series = growth_series(ctx, args.max, budget=args.budget)
        name = f"extension over {{a, b, t1..t{ctx.n_letters}}}"
    print(f"growth of {name}")
    for n, count in enumerate(series):
        print(f"  gamma({n}) = {count}")
    return 0


def _exchange_params(args) -> ExchangeParams:
    return ExchangeParams(
        s_size=args.tuple_size, t_size=args.tuple_size,
        instance_word_min=args.instance_words[0], instance_word_max=args.instance_words[1],
        private_word_min=args.private_words[0], private_word_max=args.private_words[1])


def cmd_exchange(args) -> int:
    ctx = _load_context(args.group)
    params = _exchange_params(args)
    transcript = Transcript() if args.transcript else None
    if args.listen:
        host, port = _addr(args.listen)
        server = socket.create_server((host, port))
        conn, _ = server.accept()
        transport = SocketTransport(conn)
        server.close()
    elif args.connect:
        host, port = _addr(args.connect)
        transport = SocketTransport(socket.create_connection((host, port)))
    else:
        print("exchange requires --listen or --connect", file=sys.stderr)
        return 2
    try:
        key = run_exchange(transport, args.role, ctx, args.seed, params, transcript)
    finally:
        transport.close()
    if transcript is not None:
        transcript.write_jsonl(args.transcript)
    print(f"role {args.role}: shared key digest {key.digest.hex()}")
    return 0


def cmd_demo(args) -> int:
    ctx = _load_context(args.group)
    params = _exchange_params(args)
    seed_a = derive_seed(args.seed, b"role-a")
    seed_b = derive_seed(args.seed, b"role-b")
    key_a, key_b, transcript = run_local_exchange(ctx, seed_a, seed_b, params)
    print(f"group digest  {ctx.digest().hex()[:16]}")
    for line in transcript.summary_lines():
        print(line)
    agree = key_a.digest == key_b.digest and key_a.element == key_b.element
    print(f"key digest A  {key_a.digest.hex()}")
    print(f"key digest B  {key_b.digest.hex()}")
    print(f"agreement     {'yes' if agree else 'NO'}")
    if args.transcript:
        transcript.write_jsonl(args.transcript)
    return 0 if agree else 1


def _addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def _lengths(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi or lo)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plgroup",
        description="Thompson-group extension toolkit and commutator key exchange",
        epilog="Word syntax: letters a, b, t1..tn separated by spaces; "
               "inverses as a^-1 or uppercase A.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-identities",
                   help="run the built-in identity suite").set_defaults(fn=cmd_verify_identities)

    p_build = sub.add_parser("build", help="compile a presentation into a group bundle")
    p_build.add_argument("--presentation", metavar="FILE",
                         help="JSON {'generators': ['x','y'], 'relators': ['xyXY', ...]}; "
                              "uppercase letters are inverses (default: built-in sample)")
    p_build.add_argument("--out", required=True, metavar="FILE")
    p_build.set_defaults(fn=cmd_build)

    p_wp = sub.add_parser("wp", help="word problem: is the word trivial?")
    p_wp.add_argument("--group", metavar="FILE", help="group bundle (default: sample)")
    p_wp.add_argument("--word", required=True)
    p_wp.set_defaults(fn=cmd_wp)

    p_growth = sub.add_parser("growth", help="ball sizes by breadth-first search")
    p_growth.add_argument("--max", type=int, required=True)
    p_growth.add_argument("--group", metavar="FILE")
    p_growth.add_argument("--extension", action="store_true",
                          help="count in the extension group (implied by --group)")
    p_growth.add_argument("--budget", type=int, default=10_000_000)
    p_growth.set_defaults(fn=cmd_growth)

    for name, fn in (("exchange", cmd_exchange), ("demo", cmd_demo)):
        p = sub.add_parser(name, help=f"{name} the key agreement")
        p.add_argument("--group", metavar="FILE")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--tuple-size", type=int, default=2)
        p.add_argument("--instance-words", type=_lengths, default=(2, 4),
                       metavar="LO:HI")
        p.add_argument("--private-words", type=_lengths, default=(8, 12),
                       metavar="LO:HI",
                       help="demo profile default 8:12; the library default is 16:32")
        p.add_argument("--transcript", metavar="FILE", help="write observer JSONL")
        if name == "exchange":
            p.add_argument("--role", choices=("a", "b"), required=True)
            p.add_argument("--listen", metavar="HOST:PORT")
            p.add_argument("--connect", metavar="HOST:PORT")
        p.set_defaults(fn=fn)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PLGroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
