#!/usr/bin/env python3
"""Reference PPM encoder for the heat-map export tests.

Recomputes the expected P6 bytes for a small heat map from the format
definition alone (gray = density * 255 // max, peak cells get a full
red channel) and prints them as a C++ string literal. The frozen
literal in tests/test_heatmap.cpp was produced by this script.
"""

DENSITY = [[1, 2], [3, 4]]   # [bucket][system]
PEAK = [[0, 1], [1, 0]]      # [bucket][system]


def encode(density, peak):
    height = len(density)
    width = len(density[0]) if height else 0
    peak_max = max((d for row in density for d in row), default=0)
    out = bytearray(f"P6\n{width} {height}\n255\n".encode())
    for b in range(height):
        for s in range(width):
            gray = 0 if peak_max == 0 else density[b][s] * 255 // peak_max
            red = 255 if peak[b][s] else gray
            out += bytes((red, gray, gray))
    return bytes(out)


def c_literal(data):
    parts = []
    for byte in data:
        if byte == 0x0A:
            parts.append("\\n")
        elif 0x20 <= byte < 0x7F and chr(byte) not in "\\\"":
            parts.append(chr(byte))
        else:
            parts.append(f"\\{byte:03o}")
    return '"' + "".join(parts) + '"'


if __name__ == "__main__":
    data = encode(DENSITY, PEAK)
    print(f"// {len(data)} bytes")
    print(c_literal(data))
