#!/usr/bin/env python3
"""Emit models/rv64mini/10_regfile.mir: register-index dispatch for x0..x31."""

import argparse
import pathlib


def tree(kind, prefix, depth, out):
    label = "n" + prefix if prefix else "entry"
    if depth == 5:
        idx = int(prefix, 2)
        out.append(f"{'r' if kind == 'read' else 'w'}{idx}:")
        if kind == "read":
            if idx == 0:
                out.append("  return 0x0000000000000000")
            else:
                out.append(f"  v{idx}: %bv64 = read_reg<x{idx}>()")
                out.append(f"  return v{idx}")
        else:
            if idx != 0:
                out.append(f"  write_reg<x{idx}>(v)")
            out.append("  return ()")
        return
    bit = 4 - depth
    out.append(f"{label}:")
    out.append(f"  b{prefix}: %bv1 = vector_subrange_bv_c<5,{bit},{bit}>(r)")
    out.append(f"  c{prefix}: %bool = eq_bits_bv_c<1>(b{prefix}, 0b1)")

    def target(p):
        if depth + 1 == 5:
            return ("r" if kind == "read" else "w") + str(int(p, 2))
        return "n" + p

    out.append(f"  branch c{prefix} {target(prefix + '1')} {target(prefix + '0')}")
    tree(kind, prefix + "0", depth + 1, out)
    tree(kind, prefix + "1", depth + 1, out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default=str(pathlib.Path(__file__).resolve().parent.parent
                                                   / "models/rv64mini/10_regfile.mir"))
    args = ap.parse_args()
    lines = ["// Generated by tools/gen_regfile.py. x0 reads as zero and ignores writes.", ""]
    lines.append("fn rX(r: %bv5) -> %bv64 {")
    tree("read", "", 0, lines)
    lines += ["}", "", "fn wX(r: %bv5, v: %bv64) -> %unit {"]
    tree("write", "", 0, lines)
    lines += ["}", ""]
    pathlib.Path(args.out).write_text("\n".join(lines))


if __name__ == "__main__":
    main()
