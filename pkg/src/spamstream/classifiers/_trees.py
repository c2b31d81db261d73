"""Compiled CART kernels (Gini criterion) used by the random forest.

Dense features arrive pre-binned (uint8 bin ids); vocabulary features arrive as
CSR structure of a binary matrix. A node split on a vocabulary column sends
rows without that n-gram left.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _gini(pos, n):
    if n == 0:
        return 0.0
    p = pos / n
    return 2.0 * p * (1.0 - p)


@njit(cache=True)
def _row_has(indptr, indices, r, c):
    lo = indptr[r]
    hi = indptr[r + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        v = indices[mid]
        if v == c:
            return True
        if v < c:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def _split_gain(g, m, pos, n1, n1_pos):
    """Gini gain of sending the n1 rows having the n-gram right."""
    nl = m - n1
    nl_pos = pos - n1_pos
    return g - (nl / m) * _gini(nl_pos, nl) - (n1 / m) * _gini(n1_pos, n1)


@njit(cache=True)
def _dense_best(xb, y, idx, start, end, f, nb, hist, hist_pos, g, m, pos):
    for b in range(nb):
        hist[b] = 0
        hist_pos[b] = 0
    for i in range(start, end):
        r = idx[i]
        b = xb[r, f]
        hist[b] += 1
        hist_pos[b] += y[r]
    nonempty = 0
    for b in range(nb):
        if hist[b] > 0:
            nonempty += 1
    if nonempty <= 1:
        return False, 0.0, 0
    best = 0.0
    best_b = 0
    nl = 0
    nl_pos = 0
    for b in range(nb - 1):
        nl += hist[b]
        nl_pos += hist_pos[b]
        if nl == 0 or hist[b] == 0:
            continue
        if nl == m:
            break
        nr = m - nl
        nr_pos = pos - nl_pos
        gain = g - (nl / m) * _gini(nl_pos, nl) - (nr / m) * _gini(nr_pos, nr)
        if gain > best:
            best = gain
            best_b = b
    return True, best, best_b


@njit(cache=True)
def build_tree(xb, n_bins, indptr, indices, col_ptr, col_rows, n_sparse, y, rows, max_depth, min_split, mtry, seed):
    """Grow one tree on ``rows``; returns node arrays.

    feature == -1 marks a leaf. For dense splits ``split_bin`` is the largest
    bin sent left; for sparse splits it is 0.

    Small nodes count vocabulary columns by walking their rows (CSR); large
    nodes draw candidate columns first and count them by walking the column
    (CSC ``col_ptr``/``col_rows``) against per-row occurrence counts.
    """
    np.random.seed(seed)
    n = rows.shape[0]
    dd = xb.shape[1]
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int64)
    split_bin = np.zeros(cap, np.int64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap, np.float64)
    n_node = np.zeros(cap, np.int64)
    impurity = np.zeros(cap, np.float64)

    idx = rows.copy()
    cnt = np.zeros(n_sparse, np.int64)
    cnt_pos = np.zeros(n_sparse, np.int64)
    touched = np.empty(max(n_sparse, 1), np.int64)
    cand = np.empty(dd + n_sparse, np.int64)
    max_bins = 1
    for f in range(dd):
        if n_bins[f] > max_bins:
            max_bins = n_bins[f]
    hist = np.zeros(max_bins, np.int64)
    hist_pos = np.zeros(max_bins, np.int64)
    occ = np.zeros(xb.shape[0], np.int64)
    d = dd + n_sparse
    perm = np.arange(d)
    n_rows_total = max(xb.shape[0], 1)
    avg_row_nnz = indices.shape[0] / n_rows_total
    avg_col_nnz = indices.shape[0] / max(n_sparse, 1)
    col_mode_min = 2.0 * mtry * (avg_col_nnz + 1.0)

    st_node = np.empty(cap, np.int64)
    st_start = np.empty(cap, np.int64)
    st_end = np.empty(cap, np.int64)
    st_depth = np.empty(cap, np.int64)
    sp = 0
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = n
    st_depth[0] = 0
    sp = 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        node = st_node[sp]
        start = st_start[sp]
        end = st_end[sp]
        depth = st_depth[sp]
        m = end - start
        pos = 0
        for i in range(start, end):
            pos += y[idx[i]]
        g = _gini(pos, m)
        n_node[node] = m
        impurity[node] = g
        value[node] = pos / m if m > 0 else 0.0
        if depth >= max_depth or m < min_split or pos == 0 or pos == m:
            continue

        best_gain = 0.0
        best_f = -1
        best_b = 0
        if m * avg_row_nnz <= col_mode_min:
            # vocabulary counts restricted to the node
            nt = 0
            for i in range(start, end):
                r = idx[i]
                for k in range(indptr[r], indptr[r + 1]):
                    c = indices[k]
                    if cnt[c] == 0:
                        touched[nt] = c
                        nt += 1
                    cnt[c] += 1
                    cnt_pos[c] += y[r]

            nc = 0
            for f in range(dd):
                cand[nc] = f
                nc += 1
            for t in range(nt):
                c = touched[t]
                if cnt[c] < m:
                    cand[nc] = dd + c
                    nc += 1

            evaluated = 0
            k = 0
            while k < nc and evaluated < mtry:
                j = np.random.randint(k, nc)
                tmp = cand[k]
                cand[k] = cand[j]
                cand[j] = tmp
                f = cand[k]
                k += 1
                if f >= dd:
                    c = f - dd
                    gain = _split_gain(g, m, pos, cnt[c], cnt_pos[c])
                    evaluated += 1
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_b = 0
                else:
                    ok, gain, b = _dense_best(xb, y, idx, start, end, f, n_bins[f], hist, hist_pos, g, m, pos)
                    if not ok:
                        continue
                    evaluated += 1
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_b = b

            for t in range(nt):
                c = touched[t]
                cnt[c] = 0
                cnt_pos[c] = 0
        else:
            for i in range(start, end):
                occ[idx[i]] += 1
            evaluated = 0
            k = 0
            while k < d and evaluated < mtry:
                j = np.random.randint(k, d)
                tmp = perm[k]
                perm[k] = perm[j]
                perm[j] = tmp
                f = perm[k]
                k += 1
                if f >= dd:
                    c = f - dd
                    n1 = 0
                    n1_pos = 0
                    for q in range(col_ptr[c], col_ptr[c + 1]):
                        r = col_rows[q]
                        o = occ[r]
                        if o > 0:
                            n1 += o
                            n1_pos += o * y[r]
                    if n1 == 0 or n1 == m:
                        continue
                    gain = _split_gain(g, m, pos, n1, n1_pos)
                    evaluated += 1
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_b = 0
                else:
                    ok, gain, b = _dense_best(xb, y, idx, start, end, f, n_bins[f], hist, hist_pos, g, m, pos)
                    if not ok:
                        continue
                    evaluated += 1
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_b = b
            for i in range(start, end):
                occ[idx[i]] = 0

        if best_f < 0 or best_gain <= 1e-12:
            continue

        # partition idx[start:end] so rows going left come first
        i = start
        j = end - 1
        while i <= j:
            r = idx[i]
            if best_f >= dd:
                go_left = not _row_has(indptr, indices, r, best_f - dd)
            else:
                go_left = xb[r, best_f] <= best_b
            if go_left:
                i += 1
            else:
                idx[i] = idx[j]
                idx[j] = r
                j -= 1
        mid = i

        feature[node] = best_f
        split_bin[node] = best_b
        lch = n_nodes
        rch = n_nodes + 1
        n_nodes += 2
        left[node] = lch
        right[node] = rch
        st_node[sp] = rch
        st_start[sp] = mid
        st_end[sp] = end
        st_depth[sp] = depth + 1
        sp += 1
        st_node[sp] = lch
        st_start[sp] = start
        st_end[sp] = mid
        st_depth[sp] = depth + 1
        sp += 1

    return (feature[:n_nodes], split_bin[:n_nodes], left[:n_nodes], right[:n_nodes],
            value[:n_nodes], n_node[:n_nodes], impurity[:n_nodes])


@njit(cache=True)
def _contains(sorted_idx, c):
    lo = 0
    hi = sorted_idx.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        v = sorted_idx[mid]
        if v == c:
            return True
        if v < c:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def predict_one(dense, sparse_idx, feature, threshold, left, right, value, roots, dd):
    votes = 0
    for t in range(roots.shape[0]):
        node = roots[t]
        while feature[node] >= 0:
            f = feature[node]
            if f < dd:
                x = dense[f]
            else:
                x = 1.0 if _contains(sparse_idx, f - dd) else 0.0
            if x <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        if value[node] > 0.5:
            votes += 1
    return votes / roots.shape[0]


@njit(cache=True)
def predict_many(dense, indptr, indices, feature, threshold, left, right, value, roots, dd):
    n = dense.shape[0]
    out = np.empty(n, np.float64)
    for i in range(n):
        out[i] = predict_one(dense[i], indices[indptr[i]:indptr[i + 1]], feature, threshold,
                             left, right, value, roots, dd)
    return out
