"""Inverse branches of f_c encoded as sign words.

A word (s_0, ..., s_{n-1}) names the branch of f^{-n} that sends a point
x_n to x_0 through x_k = s_k sqrt(x_{k+1} - c). The symbol 0 stands for the
imaginary root x_k = i sqrt(c - x_{k+1}). Applying the word is always done
backwards from the target, which is stable near repelling points where
forward iteration is not.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

IMAG = 0
_LETTERS = {1: "R", -1: "L", IMAG: "I"}
_SYMBOLS = {v: k for k, v in _LETTERS.items()}


def itinerary(word) -> str:
    return "".join(_LETTERS[int(s)] for s in word)


def parse_itinerary(text: str) -> tuple[int, ...]:
    return tuple(_SYMBOLS[ch] for ch in text)


_REF_DEPTH = 160


@lru_cache(maxsize=256)
def critical_reference(c: float) -> tuple[np.ndarray, np.ndarray]:
    """r_k = f^{k-1}(c) for k = 1.._REF_DEPTH (index 0 unused) and their signs."""
    r = np.zeros(_REF_DEPTH + 1)
    with mpmath.workdps(200):
        z = mpmath.mpf(c)
        for k in range(1, _REF_DEPTH + 1):
            r[k] = float(z)
            z = z * z + c
    return r, np.sign(r).astype(np.int8)


def fold_depth(words: np.ndarray, c: float) -> np.ndarray:
    """F = 1 + length of the common prefix of word[1:] with the critical
    itinerary, capped at the word length (0 for empty words).

    Along the first F letters x_k shadows f^{k-1}(c), and the pull-back
    tracks the difference to keep x_1 - c accurate.
    """
    B, L = words.shape
    if L == 0:
        return np.zeros(B, dtype=int)
    _, sg = critical_reference(float(c))
    n = min(L - 1, _REF_DEPTH)
    if n == 0:
        return np.ones(B, dtype=int)
    match = words[:, 1:n + 1] == sg[1:n + 1][None, :]
    miss = ~match
    common = np.where(miss.any(axis=1), miss.argmax(axis=1), n)
    return np.minimum(1 + common, L)


def _pull_block(words: np.ndarray, x: np.ndarray, c: float, steps: bool):
    """Core backward iteration for a (B, L) block of real words."""
    B, L = words.shape
    F = fold_depth(words, c)
    r, _ = critical_reference(float(c))
    complex_mode = np.iscomplexobj(x)
    logs = np.empty(x.shape + (L,)) if steps else None
    total = np.zeros(x.shape)
    delta = np.zeros_like(x)
    min_arg = np.full(x.shape, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(L - 1, -1, -1):
            start = F == k + 1
            if start.any() and k >= 1:
                delta[start] = x[start] - r[k + 1]
            s = words[:, k][:, None]
            arg = x - c
            if k == 0:
                tracked = F >= 2
                arg[tracked] = delta[tracked]
            if not complex_mode:
                np.minimum(min_arg, arg, out=min_arg)
            x = s * np.sqrt(arg if complex_mode else np.maximum(arg, 0.0))
            if k >= 1:
                inside = k < F
                if inside.any():
                    delta[inside] = delta[inside] / (x[inside] + r[k])
            lg = np.log(2.0 * np.abs(x))
            total += lg
            if steps:
                logs[..., k] = lg
    return x, total, logs, min_arg


def pull(word, y, c: float, steps: bool = False):
    """Pull y back along `word`.

    Returns x_0, and with steps=True also the array of log|2 x_k| for
    k = 0..n-1 (last axis), whose sum is log|(f^n)'(x_0)|.
    """
    word = tuple(int(s) for s in word)
    y = np.asarray(y)
    shape = y.shape
    complex_mode = np.iscomplexobj(y) or IMAG in word
    x = y.astype(complex if complex_mode else float).reshape(1, -1)
    tail = word
    head_logs = []
    if IMAG in word:
        # Only a leading imaginary letter is supported.
        if word.index(IMAG) != 0 or word.count(IMAG) != 1:
            raise ValueError("imaginary letter must come first")
        tail = word[1:]
    arr = np.array(tail, dtype=np.int8).reshape(1, len(tail))
    x, _, logs, _ = _pull_block(arr, x, c, True)
    if len(tail) < len(word):
        x = 1j * np.sqrt(c - x)
        head_logs = [np.log(2.0 * np.abs(x))]
    x = x.reshape(shape)
    if not steps:
        return x
    parts = [h[..., None] for h in head_logs] + [logs]
    return x, np.concatenate(parts, axis=-1).reshape(shape + (len(word),))


def pull_many(words: np.ndarray, y: np.ndarray, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised pull-back for a block of real words of equal length.

    words has shape (B, L), y has shape (B, M) or (M,). Returns x_0 and
    log|(f^L)'(x_0)|, both of shape (B, M). Complex y is allowed.
    """
    words = np.asarray(words, dtype=np.int8)
    B, L = words.shape
    y = np.asarray(y)
    x = np.broadcast_to(y, (B,) + y.shape[-1:]).copy()
    x, total, _, _ = _pull_block(words, x, c, False)
    return x, total


def group_by_length(words) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Map word length -> (indices, stacked word array)."""
    groups: dict[int, list[int]] = {}
    for i, w in enumerate(words):
        groups.setdefault(len(w), []).append(i)
    out = {}
    for L, idx in groups.items():
        arr = np.array([words[i] for i in idx], dtype=np.int8).reshape(len(idx), L)
        out[L] = (np.array(idx), arr)
    return out


def bracket_many(words: np.ndarray, targets: np.ndarray, c: float, nsub: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Per-word lower/upper bounds of log|(f^L)'| over the pulled-back
    targets, for a block of equal-length real words.

    targets has shape (B, 2). Each target is cut into nsub pieces and every
    factor |2 x_k| is bracketed by its values at the piece endpoints.
    Returns (domains (B, 2) sorted, brackets (B, 2)).
    """
    words = np.asarray(words, dtype=np.int8)
    B, L = words.shape
    s = np.linspace(0.0, 1.0, nsub + 1)
    ys = targets[:, :1] + (targets[:, 1:] - targets[:, :1]) * s[None, :]
    x, _, logs, _ = _pull_block(words, ys.astype(float), c, True)
    if L == 0:
        zero = np.zeros(B)
        return np.sort(targets, axis=1), np.stack([zero, zero], axis=1)
    lo = np.minimum(logs[:, :-1], logs[:, 1:]).sum(axis=-1).min(axis=1)
    hi = np.maximum(logs[:, :-1], logs[:, 1:]).sum(axis=-1).max(axis=1)
    dom = np.sort(np.stack([x[:, 0], x[:, -1]], axis=1), axis=1)
    return dom, np.stack([lo, hi], axis=1)


def min_sqrt_argument(word, y, c: float) -> np.ndarray:
    """Smallest square-root argument met while pulling real points y back
    along a real word; the pull is a genuine inverse branch where it is > 0."""
    y = np.asarray(y, dtype=float)
    arr = np.array(tuple(word), dtype=np.int8).reshape(1, -1)
    return _pull_block(arr, y.reshape(1, -1), c, False)[3].reshape(y.shape)


def min_sqrt_argument_many(words, y, c: float) -> np.ndarray:
    """min_sqrt_argument for many real words at once, shape (len(words), len(y))."""
    y = np.asarray(y, dtype=float)
    out = np.empty((len(words), len(y)))
    for _, (idx, arr) in group_by_length(words).items():
        x = np.broadcast_to(y, (len(idx), len(y))).copy()
        out[idx] = _pull_block(arr, x, c, False)[3]
    return out


def pull_mp(word, y, c: float, dps: int = 60):
    """Real pull-back in extended precision (mpmath numbers)."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(y)
        cc = mpmath.mpf(c)
        for s in reversed(tuple(word)):
            x = s * mpmath.sqrt(x - cc)
        return +x
