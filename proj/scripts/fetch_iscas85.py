#!/usr/bin/env python3
"""Fetch the ISCAS-85 combinational benchmarks and convert them to bench format.

The netlists are taken from the structural-Verilog copies distributed inside
the `circuitgraph` Python wheel (gate-level, one primitive per line). Each
module is converted to the ISCAS bench dialect understood by `cyclo`:

    INPUT(w)  OUTPUT(w)  w = KIND(a, b, ...)

Usage:
    scripts/fetch_iscas85.py [--wheel PATH] [--out benchmarks/iscas85] [--verify]

Without --wheel the wheel is downloaded with `pip download`. With --verify the
generated files are checked against SHA256SUMS instead of being rewritten.
"""

import argparse
import hashlib
import pathlib
import re
import subprocess
import sys
import tempfile
import zipfile

WHEEL_NAME = "circuitgraph==0.2.1"
WHEEL_SHA256 = "074612bd25a989b678818cff6ba52dc02c5951ef123fdb3fa09edb59af79c040"
CIRCUITS = ["c17", "c432", "c499", "c880", "c1355", "c1908", "c2670",
            "c3540", "c5315", "c7552"]

PRIMITIVES = {"and": "AND", "nand": "NAND", "or": "OR", "nor": "NOR",
              "xor": "XOR", "xnor": "XNOR", "not": "NOT", "buf": "BUF"}


def sha256(path):
    h = hashlib.sha256()
    h.update(pathlib.Path(path).read_bytes())
    return h.hexdigest()


def statements(text):
    text = re.sub(r"//[^\n]*", "", text)
    text = re.sub(r"/\*.*?\*/", "", text, flags=re.S)
    for stmt in text.split(";"):
        stmt = " ".join(stmt.split())
        if stmt:
            yield stmt


def names(s):
    return [n.strip() for n in s.split(",") if n.strip()]


def convert(name, text):
    inputs, outputs, gates = [], [], []
    for stmt in statements(text):
        head = stmt.split(" ", 1)[0]
        if head == "module":
            continue
        if head == "endmodule":
            break
        if head == "input":
            inputs += names(stmt[len("input"):])
        elif head == "output":
            outputs += names(stmt[len("output"):])
        elif head == "wire":
            continue
        elif head == "assign":
            lhs, rhs = [p.strip() for p in stmt[len("assign"):].split("=")]
            if rhs in ("1'b0", "1'b1"):
                # No constant gates in bench; XOR(a,a)=0 and XNOR(a,a)=1.
                kind = "XOR" if rhs == "1'b0" else "XNOR"
                gates.append((lhs, kind, [inputs[0], inputs[0]]))
            else:
                gates.append((lhs, "BUF", [rhs]))
        elif head in PRIMITIVES:
            m = re.match(r"\w+\s+\w+\s*\((.*)\)$", stmt)
            if not m:
                raise ValueError(f"{name}: cannot parse '{stmt}'")
            ports = names(m.group(1))
            gates.append((ports[0], PRIMITIVES[head], ports[1:]))
        else:
            raise ValueError(f"{name}: unsupported statement '{stmt}'")

    lines = [f"# {name} (ISCAS-85), converted from structural Verilog",
             f"# {len(inputs)} inputs, {len(outputs)} outputs, {len(gates)} gates", ""]
    lines += [f"INPUT({w})" for w in inputs]
    lines.append("")
    lines += [f"OUTPUT({w})" for w in outputs]
    lines.append("")
    lines += [f"{out} = {kind}({', '.join(ins)})" for out, kind, ins in gates]
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--wheel", help="path to an already downloaded circuitgraph wheel")
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                         / "benchmarks" / "iscas85"))
    ap.add_argument("--verify", action="store_true")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel
        if wheel is None:
            subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                            "-d", tmp, WHEEL_NAME], check=True)
            wheel = next(pathlib.Path(tmp).glob("circuitgraph-*.whl"))
        digest = sha256(wheel)
        if digest != WHEEL_SHA256:
            sys.exit(f"checksum mismatch for {wheel}: {digest}")

        converted = {}
        with zipfile.ZipFile(wheel) as z:
            for c in CIRCUITS:
                text = z.read(f"circuitgraph/netlists/{c}.v").decode()
                converted[c] = convert(c, text)

    sums_path = out / "SHA256SUMS"
    if args.verify:
        expected = dict(reversed(line.split()) for line in sums_path.read_text().splitlines())
        bad = [c for c in CIRCUITS
               if hashlib.sha256(converted[c].encode()).hexdigest() != expected.get(f"{c}.bench")]
        if bad:
            sys.exit(f"mismatch: {', '.join(bad)}")
        print("all benchmarks verified")
        return

    sums = []
    for c in CIRCUITS:
        (out / f"{c}.bench").write_text(converted[c])
        sums.append(f"{hashlib.sha256(converted[c].encode()).hexdigest()}  {c}.bench")
    sums_path.write_text("\n".join(sums) + "\n")
    print(f"wrote {len(CIRCUITS)} benchmarks to {out}")


if __name__ == "__main__":
    main()
