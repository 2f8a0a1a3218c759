"""Smoke test for the seqdec_py extension module.

Build first with `cargo build -p seqdec-py --release`, then run
`python3 python/smoke_test.py` from the repository root.
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libseqdec_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libseqdec_py.so not found; run `cargo build -p seqdec-py --release`")
    tmp = pathlib.Path(tempfile.mkdtemp())
    dst = tmp / "seqdec_py.so"
    shutil.copy(lib, dst)
    spec = importlib.util.spec_from_file_location("seqdec_py", dst)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    sd = load()

    golay = sd.BlockCode.golay24()
    assert (golay.n, golay.k) == (24, 12)
    assert golay.min_distance() == (8, 759)
    word = golay.encode([1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1])
    assert golay.is_codeword(word)

    code = sd.ConvCode.from_octal(["6", "5", "7"], 2)
    cw = "".join(map(str, code.encode([1, 1, 1, 0, 1])))
    assert cw == "111010001110100101011", cw
    t = sd.Trellis(code, 5)
    assert t.dstar(3, 3) == 4
    assert t.transition(0, 0, 1) == (1, "111")
    assert t.states_at(0) == [0]

    ch = sd.Channel.block(12, 24, 2.0)
    phi = ch.llr(ch.transmit(word, 7))
    res = sd.gda_decode(golay, phi)
    assert res.decoded == sd.brute_force_ml_block(golay, phi)
    assert res.branch_computations >= 24

    conv = sd.ConvCode.builtin("conv-2-1-6")
    tr = sd.Trellis(conv, 20)
    ch = sd.Channel.conv(20, tr.code_length, 1.0)
    phi = ch.llr(ch.transmit(conv.encode([0] * 20), 3))
    res = sd.mlsda_decode(tr, phi)
    _, metric = sd.viterbi_ml(tr, phi)
    assert math.isclose(res.final_metric, metric, rel_tol=1e-9, abs_tol=1e-12)

    be = sd.gda_bound(golay, 1.0, "be")
    ch_bound = sd.gda_bound(golay, 1.0, "chernoff")
    assert 24 <= be <= ch_bound
    assert sd.mlsda_bound(tr, 10.0) >= 40
    assert 0 < sd.lemma2_bound(5, 15, 1.0) <= 1

    mean, ci, trials, overflow = sd.simulate(golay, 10.0, 500, seed=1)
    assert abs(mean - 24) < 1 and trials == 500 and overflow == 0

    rows = sd.atilde_table(0.2, 1.0, [50, 200])
    assert rows[0][1] == 1.0 and rows[1][1] < 1.0

    csv = sd.run_config('{"code": "golay24", "snr_grid": [2.0], "mode": "bound"}')
    assert csv.splitlines()[0].startswith("gamma_b_db,")

    try:
        sd.ConvCode.from_octal(["9"], 2)
    except sd.SeqdecError:
        pass
    else:
        raise AssertionError("bad octal accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
