#!/usr/bin/env python3
"""Convert a PGM image (P2 ASCII or P5 binary, 8-bit) into the grid text
format used by `sphdesign resample --image`.

Usage: image_to_grid.py input.pgm output.grd
"""

import sys


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()

    def tokens(buf):
        i = 0
        while i < len(buf):
            while i < len(buf) and buf[i : i + 1].isspace():
                i += 1
            if i < len(buf) and buf[i : i + 1] == b"#":
                while i < len(buf) and buf[i : i + 1] != b"\n":
                    i += 1
                continue
            j = i
            while j < len(buf) and not buf[j : j + 1].isspace():
                j += 1
            if j > i:
                yield i, buf[i:j]
            i = j

    it = tokens(data)
    _, magic = next(it)
    if magic not in (b"P2", b"P5"):
        raise SystemExit(f"not an 8-bit PGM: magic {magic!r}")
    _, w = next(it)
    _, h = next(it)
    pos, maxval = next(it)
    w, h, maxval = int(w), int(h), int(maxval)
    if maxval > 255:
        raise SystemExit("only 8-bit PGM is supported")

    if magic == b"P2":
        values = []
        for _, tok in it:
            values.append(int(tok))
            if len(values) == w * h:
                break
    else:
        start = pos + len(str(maxval)) + 1
        raster = data[start : start + w * h]
        if len(raster) != w * h:
            raise SystemExit("truncated raster")
        values = list(raster)
    if len(values) != w * h:
        raise SystemExit("truncated raster")
    return w, h, values


def main():
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    w, h, values = read_pgm(sys.argv[1])
    with open(sys.argv[2], "w") as out:
        out.write(f"# grid m={h} n={w}\n")
        for r in range(h):
            row = values[r * w : (r + 1) * w]
            out.write(" ".join(str(v) for v in row))
            out.write("\n")
    print(f"wrote {h}x{w} grid to {sys.argv[2]}")


if __name__ == "__main__":
    main()
