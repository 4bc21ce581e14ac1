#!/usr/bin/env python3
"""Independent oracle for the Schnorr-group test vectors.

Recomputes hash-to-group / hash-to-scalar and Pedersen commitments with plain
Python integers and hashlib, so the frozen constants in test_group.cpp and
test_commitment.cpp do not depend on the C++ implementation.
"""
import hashlib
import struct

PROFILES = {
    "test": (2039, 1019, 4),
    "desk": (9223372036854771239, 4611686018427385619, 4),
}


def framed(tag: bytes, parts):
    h = hashlib.sha512()
    h.update(struct.pack(">I", len(tag)) + tag)
    for p in parts:
        h.update(struct.pack(">I", len(p)) + p)
    return h.digest()


def hash_to_scalar(q, tag, parts):
    return int.from_bytes(framed(tag, parts), "big") % q


def hash_to_group(p, tag, parts):
    ctr = 0
    while True:
        d = framed(tag, list(parts) + [struct.pack(">I", ctr)])
        x = int.from_bytes(d, "big") % p
        y = x * x % p
        if y not in (0, 1):
            return y
        ctr += 1


def commit(p, g, h, v, r):
    return pow(g, r, p) * pow(h, v, p) % p


if __name__ == "__main__":
    for name, (p, q, g) in PROFILES.items():
        h = hash_to_group(p, b"pvx/H", [])
        assert pow(h, q, p) == 1
        print(f"{name}: H = {h}")
        print(f"{name}: commit(5,7) = {commit(p, g, h, 5, 7)}")
        print(f"{name}: commit(9,1) = {commit(p, g, h, 9, 1)}")
        print(f"{name}: hash_to_scalar('pvx/ring', ['abc']) = "
              f"{hash_to_scalar(q, b'pvx/ring', [b'abc'])}")
    # homomorphism spot check from the examples
    p, q, g = PROFILES["test"]
    h = hash_to_group(p, b"pvx/H", [])
    assert commit(p, g, h, 3, 5) * commit(p, g, h, 4, 6) % p == commit(p, g, h, 7, 11)
