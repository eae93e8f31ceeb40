#!/usr/bin/env python3
"""Regenerates the compressed-size golden fixtures.

Sizes come from python-zstandard (the reference binding over libzstd 1.5.7),
so the C++ codec path is checked against an implementation it shares no code
with beyond the zstd library itself.  Run from this directory:

    pip install zstandard==0.25.0 && python3 generate.py
"""
import json
import os
import random

import zstandard as zstd

HERE = os.path.dirname(os.path.abspath(__file__))
assert zstd.ZSTD_VERSION == (1, 5, 7), zstd.ZSTD_VERSION

rng = random.Random(20240611)

english = [
    "the quick brown fox jumps over the lazy dog",
    "compression dictionaries prime the encoder with shared context",
    "a sentence seen during training should compress very well",
    "news headlines about sports politics and celebrities",
    "hello world hello world hello world",
] * 40
greek = "αβγ δεζ ηθικ λμνξ οπρ στυφ χψω " * 20

inputs = {
    "empty": b"",
    "hello": b"hello world hello world hello world",
    "english": " ".join(english[:12]).encode(),
    "greek": greek.encode(),
    "random100": bytes(rng.getrandbits(8) for _ in range(100)),
    "repeat4k": b"abcdefgh" * 512,
}
for name, data in inputs.items():
    with open(os.path.join(HERE, f"input_{name}.bin"), "wb") as f:
        f.write(data)

trained = zstd.train_dictionary(4096, [s.encode() + str(i).encode() for i, s in enumerate(english)])
dicts = {
    "trained": trained.as_bytes(),
    "raw": " ".join(english[:30]).encode()[:2048],
}
for name, data in dicts.items():
    with open(os.path.join(HERE, f"dict_{name}.bin"), "wb") as f:
        f.write(data)

cases = []
for level in (1, 3, 9, 19):
    for minimize in (True, False):
        for dname in (None, "trained", "raw"):
            kwargs = dict(
                level=level,
                write_checksum=not minimize,
                write_content_size=not minimize,
                write_dict_id=not minimize,
            )
            if dname is not None:
                d = zstd.ZstdCompressionDict(dicts[dname])
                d.precompute_compress(level=level)
                kwargs["dict_data"] = d
            cctx = zstd.ZstdCompressor(**kwargs)
            for iname, data in inputs.items():
                cases.append({
                    "input": f"input_{iname}.bin",
                    "dictionary": None if dname is None else f"dict_{dname}.bin",
                    "level": level,
                    "minimize_headers": minimize,
                    "expected_size": len(cctx.compress(data)),
                })

with open(os.path.join(HERE, "golden.json"), "w") as f:
    json.dump({"zstd_version": "1.5.7", "cases": cases}, f, indent=1)
print(f"wrote {len(cases)} cases")
