"""Active-space Hamiltonian container and FCIDUMP text format I/O.

Integrals are held in chemists' notation: ``eri(p, q, r, s)`` is (pq|rs).
Two-electron values are stored once per 8-fold permutational symmetry class,
so any of the eight equivalent index tuples returns the identical value.
All orbital indices on the public surface are 1-based, matching the file
format.
"""

import re

import numpy as np

__all__ = ["FcidumpError", "IntegralSet", "parse_fcidump", "write_fcidump"]


class FcidumpError(ValueError):
    """Malformed FCIDUMP content. Carries a line number when available."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


def _canonical_key(p, q, r, s):
    """Lexicographically smallest of the 8 index images of (pq|rs)."""
    return min(
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
    )


class IntegralSet:
    """Core energy, h_pq and (pq|rs) for an [n_elec, n_orb] active space.

    Parameters
    ----------
    n_orb : int
        Number of active spatial orbitals.
    n_elec : int
        Number of active electrons.
    ms2 : int
        Twice the spin projection (2 S_z).
    orbsym : sequence of int, optional
        Per-orbital irrep labels (abelian, XOR convention on label-1).
        Defaults to all 1.
    isym : int
        Target wavefunction irrep label, default 1.
    core_energy : float
        Constant energy offset in hartree.

    The object is treated as immutable once populated; ``set_h``/``set_eri``
    are intended for construction (parsing, tests) only.
    """

    def __init__(self, n_orb, n_elec, ms2, orbsym=None, isym=1, core_energy=0.0):
        if n_orb < 1:
            raise FcidumpError(f"NORB must be positive, got {n_orb}")
        if not 0 <= n_elec <= 2 * n_orb:
            raise FcidumpError(f"NELEC={n_elec} outside 0..2*NORB={2 * n_orb}")
        if abs(ms2) > n_elec:
            raise FcidumpError(f"|MS2|={abs(ms2)} exceeds NELEC={n_elec}")
        if (n_elec - ms2) % 2 != 0:
            raise FcidumpError(f"NELEC={n_elec} and MS2={ms2} differ in parity")
        if orbsym is None:
            orbsym = [1] * n_orb
        orbsym = [int(x) for x in orbsym]
        if len(orbsym) != n_orb:
            raise FcidumpError(
                f"ORBSYM has {len(orbsym)} entries, expected NORB={n_orb}")
        if any(x < 0 for x in orbsym):
            raise FcidumpError("ORBSYM labels must be non-negative")
        self.n_orb = int(n_orb)
        self.n_elec = int(n_elec)
        self.ms2 = int(ms2)
        self.orbsym = orbsym
        self.isym = int(isym)
        self.core_energy = float(core_energy)
        self._h = {}     # (p, q) with p >= q  ->  value
        self._eri = {}   # canonical 4-tuple   ->  value

    @property
    def n_alpha(self):
        return (self.n_elec + self.ms2) // 2

    @property
    def n_beta(self):
        return (self.n_elec - self.ms2) // 2

    def _check_index(self, *indices):
        for i in indices:
            if not 1 <= i <= self.n_orb:
                raise IndexError(f"orbital index {i} outside 1..{self.n_orb}")

    def set_h(self, p, q, value):
        self._check_index(p, q)
        self._h[(p, q) if p >= q else (q, p)] = float(value)

    def set_eri(self, p, q, r, s, value):
        self._check_index(p, q, r, s)
        self._eri[_canonical_key(p, q, r, s)] = float(value)

    def h(self, p, q):
        """One-electron integral h_pq; unset values are 0."""
        self._check_index(p, q)
        return self._h.get((p, q) if p >= q else (q, p), 0.0)

    def eri(self, p, q, r, s):
        """Two-electron integral (pq|rs), symmetry-folded; unset values are 0."""
        self._check_index(p, q, r, s)
        return self._eri.get(_canonical_key(p, q, r, s), 0.0)

    def h_matrix(self):
        """Dense symmetric (n_orb, n_orb) one-electron matrix, 0-based."""
        n = self.n_orb
        h = np.zeros((n, n))
        for (p, q), v in self._h.items():
            h[p - 1, q - 1] = v
            h[q - 1, p - 1] = v
        return h

    def eri_tensor(self):
        """Dense (n,n,n,n) chemists'-notation tensor with all 8 images filled."""
        n = self.n_orb
        g = np.zeros((n, n, n, n))
        for (p, q, r, s), v in self._eri.items():
            p, q, r, s = p - 1, q - 1, r - 1, s - 1
            g[p, q, r, s] = g[q, p, r, s] = g[p, q, s, r] = g[q, p, s, r] = v
            g[r, s, p, q] = g[s, r, p, q] = g[r, s, q, p] = g[s, r, q, p] = v
        return g

    @classmethod
    def from_arrays(cls, h, g, core_energy, n_elec, ms2, orbsym=None, isym=1):
        """Build from dense arrays; ``h`` must be symmetric, ``g`` 8-fold symmetric."""
        h = np.asarray(h, dtype=float)
        g = np.asarray(g, dtype=float)
        n = h.shape[0]
        out = cls(n, n_elec, ms2, orbsym=orbsym, isym=isym, core_energy=core_energy)
        for p in range(1, n + 1):
            for q in range(1, p + 1):
                if h[p - 1, q - 1] != 0.0:
                    out.set_h(p, q, h[p - 1, q - 1])
        seen = set()
        for p in range(1, n + 1):
            for q in range(1, n + 1):
                for r in range(1, n + 1):
                    for s in range(1, n + 1):
                        key = _canonical_key(p, q, r, s)
                        if key in seen:
                            continue
                        seen.add(key)
                        v = g[key[0] - 1, key[1] - 1, key[2] - 1, key[3] - 1]
                        if v != 0.0:
                            out.set_eri(*key, v)
        return out


_HEADER_KV = re.compile(r"([A-Za-z]\w*)\s*=\s*([^=]*?)(?=[,\s][A-Za-z]\w*\s*=|$)")


def _parse_header(header_text, line_number):
    fields = {}
    for key, raw in _HEADER_KV.findall(header_text):
        fields[key.upper()] = raw.strip().rstrip(",").strip()
    for required in ("NORB", "NELEC", "MS2"):
        if required not in fields:
            raise FcidumpError(f"header is missing {required}", line_number)
    try:
        n_orb = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
        ms2 = int(fields["MS2"])
        isym = int(fields["ISYM"]) if fields.get("ISYM") else 1
    except ValueError as exc:
        raise FcidumpError(f"non-integer header field: {exc}", line_number) from None
    orbsym = None
    if fields.get("ORBSYM"):
        try:
            orbsym = [int(tok) for tok in re.split(r"[,\s]+", fields["ORBSYM"]) if tok]
        except ValueError:
            raise FcidumpError(
                f"non-integer ORBSYM entry in {fields['ORBSYM']!r}", line_number) from None
    return n_orb, n_elec, ms2, orbsym, isym


def parse_fcidump(text):
    """Parse FCIDUMP text into an :class:`IntegralSet`.

    Accepts a string or a file-like object. The namelist header must supply
    NORB, NELEC and MS2 and end with ``&END`` or ``/``; ORBSYM defaults to
    all 1 and ISYM to 1. Body lines read ``value i j k l`` with 1-based
    indices: all four nonzero stores (ij|kl), k=l=0 stores h_ij, all four
    zero sets the core energy. Later duplicates overwrite earlier entries.

    Raises
    ------
    FcidumpError
        On malformed header, indices outside 0..NORB, non-numeric tokens,
        or unrecognized index patterns; the message carries the line number.
    """
    if hasattr(text, "read"):
        text = text.read()
    lines = text.splitlines()

    # Locate the header terminator ('&END' or a bare '/'), possibly spanning lines.
    header_parts = []
    body_start = None
    terminator = re.compile(r"&END|/", re.IGNORECASE)
    for ln, line in enumerate(lines, start=1):
        m = terminator.search(line)
        if m:
            header_parts.append(line[:m.start()])
            rest = line[m.end():].strip()
            if rest:
                raise FcidumpError(f"unexpected text after header terminator: {rest!r}", ln)
            body_start = ln  # 1-based line of the terminator
            break
        header_parts.append(line)
    if body_start is None:
        raise FcidumpError("no header terminator (&END or /) found", len(lines))

    header_text = " ".join(header_parts).strip()
    if not header_text.upper().startswith("&FCI"):
        raise FcidumpError("header does not start with &FCI", 1)
    n_orb, n_elec, ms2, orbsym, isym = _parse_header(header_text[4:], body_start)
    try:
        out = IntegralSet(n_orb, n_elec, ms2, orbsym=orbsym, isym=isym)
    except FcidumpError as exc:
        raise FcidumpError(str(exc), body_start) from None

    for ln, line in enumerate(lines[body_start:], start=body_start + 1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FcidumpError(
                f"expected 'value i j k l', got {len(tokens)} tokens", ln)
        try:
            value = float(tokens[0].replace("D", "E").replace("d", "e"))
        except ValueError:
            raise FcidumpError(f"non-numeric value token {tokens[0]!r}", ln) from None
        try:
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError:
            raise FcidumpError(f"non-integer index in {tokens[1:]!r}", ln) from None
        for idx in (i, j, k, l):
            if not 0 <= idx <= n_orb:
                raise FcidumpError(f"index {idx} outside 0..{n_orb}", ln)
        if i and j and k and l:
            out.set_eri(i, j, k, l, value)
        elif i and j and k == 0 and l == 0:
            out.set_h(i, j, value)
        elif i == j == k == l == 0:
            out.core_energy = value
        else:
            raise FcidumpError(
                f"unrecognized index pattern ({i} {j} {k} {l})", ln)
    return out


def write_fcidump(integrals):
    """Serialize an :class:`IntegralSet` as FCIDUMP text.

    Values are emitted with 17 significant digits so that
    ``parse_fcidump(write_fcidump(x))`` reproduces every accessor exactly.
    Entry order is deterministic (sorted canonical keys).
    """
    ints = integrals
    lines = [
        f"&FCI NORB={ints.n_orb},NELEC={ints.n_elec},MS2={ints.ms2},",
        "  ORBSYM=" + ",".join(str(s) for s in ints.orbsym) + ",",
        f"  ISYM={ints.isym},",
        "&END",
    ]
    for (p, q, r, s) in sorted(ints._eri):
        lines.append(f"{ints._eri[(p, q, r, s)]:24.16E} {p:4d} {q:4d} {r:4d} {s:4d}")
    for (p, q) in sorted(ints._h):
        lines.append(f"{ints._h[(p, q)]:24.16E} {p:4d} {q:4d} {0:4d} {0:4d}")
    lines.append(f"{ints.core_energy:24.16E} {0:4d} {0:4d} {0:4d} {0:4d}")
    return "\n".join(lines) + "\n"
