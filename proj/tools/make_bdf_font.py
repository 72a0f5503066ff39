#!/usr/bin/env python3
"""Rasterize a TrueType font into a 1-bit BDF file for the built-in registry.

Dev-time helper; the generated files under data/fonts/ are committed so the
build never needs Pillow or the source TTFs.
"""
import argparse
import sys

from PIL import Image, ImageDraw, ImageFont

RANGES = [
    (0x20, 0x7E),
    (0xA0, 0xFF),
    (0x391, 0x3A1),
    (0x3A3, 0x3A9),
    (0x3B1, 0x3C9),
    (0x2070, 0x2071),
    (0x2074, 0x208E),
]
EXTRA = [0xB2, 0xB3, 0xB9, 0x2022, 0x2026, 0x2032, 0x2033, 0x2190, 0x2192,
         0x2202, 0x2206, 0x2207, 0x2208, 0x2211, 0x2212, 0x221A, 0x221E,
         0x222B, 0x2248, 0x2260, 0x2264, 0x2265, 0x220F, 0x22C5, 0x201C,
         0x201D, 0x2018, 0x2019, 0x2013, 0x2014]


def codepoints():
    cps = set(EXTRA)
    for lo, hi in RANGES:
        cps.update(range(lo, hi + 1))
    return sorted(cps)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("ttf")
    ap.add_argument("out")
    ap.add_argument("--name", required=True)
    ap.add_argument("--size", type=int, default=16)
    ap.add_argument("--ascent", type=int, default=16)
    ap.add_argument("--descent", type=int, default=4)
    ap.add_argument("--mono-advance", type=int, default=0)
    args = ap.parse_args()

    font = ImageFont.truetype(args.ttf, args.size)
    ox, base = 24, 32
    glyphs = []
    for cp in codepoints():
        ch = chr(cp)
        if not font.getmask(ch).getbbox() and cp != 0x20 and cp != 0xA0:
            continue
        adv = args.mono_advance or max(1, round(font.getlength(ch)))
        img = Image.new("L", (80, 48), 0)
        ImageDraw.Draw(img).text((ox, base), ch, fill=255, font=font, anchor="ls")
        bits = img.point(lambda v: 255 if v >= 128 else 0)
        bbox = bits.getbbox()
        if bbox is None:
            glyphs.append((cp, adv, 0, 0, 0, 0, []))
            continue
        x0, y0, x1, y1 = bbox
        # keep the ink inside the line box
        y0 = max(y0, base - args.ascent)
        y1 = min(y1, base + args.descent)
        w, h = x1 - x0, y1 - y0
        rows = []
        for y in range(y0, y1):
            val = 0
            for x in range(x0, x1):
                val = (val << 1) | (1 if bits.getpixel((x, y)) else 0)
            pad = (8 - w % 8) % 8
            val <<= pad
            rows.append("%0*X" % ((w + pad) // 4, val))
        glyphs.append((cp, adv, w, h, x0 - ox, base - y1, rows))

    with open(args.out, "w", encoding="ascii") as f:
        f.write("STARTFONT 2.1\n")
        f.write("FONT %s\n" % args.name)
        f.write("SIZE %d 72 72\n" % (args.ascent + args.descent))
        f.write("FONTBOUNDINGBOX %d %d 0 %d\n" % (
            max(g[1] for g in glyphs), args.ascent + args.descent, -args.descent))
        f.write("STARTPROPERTIES 3\n")
        f.write("FONT_ASCENT %d\nFONT_DESCENT %d\n" % (args.ascent, args.descent))
        f.write("DEFAULT_CHAR 63\n")
        f.write("ENDPROPERTIES\n")
        f.write("CHARS %d\n" % len(glyphs))
        for cp, adv, w, h, xo, yo, rows in glyphs:
            f.write("STARTCHAR U+%04X\nENCODING %d\n" % (cp, cp))
            f.write("SWIDTH %d 0\nDWIDTH %d 0\n" % (adv * 1000 // args.size, adv))
            f.write("BBX %d %d %d %d\nBITMAP\n" % (w, h, xo, yo))
            for r in rows:
                f.write(r + "\n")
            f.write("ENDCHAR\n")
        f.write("ENDFONT\n")
    print("wrote %d glyphs to %s" % (len(glyphs), args.out), file=sys.stderr)


if __name__ == "__main__":
    main()
