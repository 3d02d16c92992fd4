#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sftri/slope.hpp"

namespace sftri {

class IntMatrix {
  public:
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("matrix dimensions must be non-negative");
        a_.assign(static_cast<size_t>(rows) * cols, Int(0));
    }

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Int& at(int r, int c) {
        check(r, c);
        return a_[static_cast<size_t>(r) * cols_ + c];
    }
    const Int& at(int r, int c) const {
        check(r, c);
        return a_[static_cast<size_t>(r) * cols_ + c];
    }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.cols_ != y.rows_) throw std::invalid_argument("matrix product dimension mismatch");
        IntMatrix out(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                const Int& v = x.at(i, k);
                if (v == 0) continue;
                for (int j = 0; j < y.cols_; ++j) out.at(i, j) += v * y.at(k, j);
            }
        return out;
    }

    friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }
    friend bool operator!=(const IntMatrix& x, const IntMatrix& y) { return !(x == y); }

  private:
    void check(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("matrix index out of range");
    }

    int rows_, cols_;
    std::vector<Int> a_;
};

namespace detail {

inline Int int_abs(const Int& v) { return v < 0 ? Int(-v) : v; }

// Exact determinant by fraction-free (Bareiss) elimination.
inline Int bareiss_determinant(IntMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
    int n = m.rows();
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n && piv < 0; ++i)
                if (m.at(i, k) != 0) piv = i;
            if (piv < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

// In-place Smith reduction by minimal-absolute-value pivoting.  When u/v are
// given they accumulate the row and column operations.  Returns the full
// diagonal (length min(rows, cols), zeros included, non-negative, d_i | d_{i+1}).
inline std::vector<Int> dense_smith(IntMatrix& a, IntMatrix* u, IntMatrix* v) {
    const int r = a.rows(), c = a.cols();
    const int n = std::min(r, c);
    auto swap_rows = [&](int x, int y) {
        if (x == y) return;
        for (int j = 0; j < c; ++j) std::swap(a.at(x, j), a.at(y, j));
        if (u)
            for (int j = 0; j < r; ++j) std::swap(u->at(x, j), u->at(y, j));
    };
    auto swap_cols = [&](int x, int y) {
        if (x == y) return;
        for (int i = 0; i < r; ++i) std::swap(a.at(i, x), a.at(i, y));
        if (v)
            for (int i = 0; i < c; ++i) std::swap(v->at(i, x), v->at(i, y));
    };
    auto row_sub = [&](int x, int y, const Int& q) {  // row x -= q * row y
        if (q == 0) return;
        for (int j = 0; j < c; ++j) a.at(x, j) -= q * a.at(y, j);
        if (u)
            for (int j = 0; j < r; ++j) u->at(x, j) -= q * u->at(y, j);
    };
    auto col_sub = [&](int x, int y, const Int& q) {  // col x -= q * col y
        if (q == 0) return;
        for (int i = 0; i < r; ++i) a.at(i, x) -= q * a.at(i, y);
        if (v)
            for (int i = 0; i < c; ++i) v->at(i, x) -= q * v->at(i, y);
    };
    auto negate_row = [&](int x) {
        for (int j = 0; j < c; ++j) a.at(x, j) = -a.at(x, j);
        if (u)
            for (int j = 0; j < r; ++j) u->at(x, j) = -u->at(x, j);
    };

    for (int k = 0; k < n; ++k) {
        for (;;) {
            int pi = -1, pj = -1;
            Int best;
            for (int i = k; i < r; ++i)
                for (int j = k; j < c; ++j) {
                    if (a.at(i, j) == 0) continue;
                    Int m = int_abs(a.at(i, j));
                    if (pi < 0 || m < best) {
                        best = m;
                        pi = i;
                        pj = j;
                    }
                }
            if (pi < 0) {  // remaining block is zero
                std::vector<Int> d(n, Int(0));
                for (int t = 0; t < k; ++t) d[t] = a.at(t, t);
                return d;
            }
            swap_rows(k, pi);
            swap_cols(k, pj);
            bool residue = false;
            for (int i = k + 1; i < r; ++i)
                if (a.at(i, k) != 0) {
                    row_sub(i, k, a.at(i, k) / a.at(k, k));
                    if (a.at(i, k) != 0) residue = true;
                }
            for (int j = k + 1; j < c; ++j)
                if (a.at(k, j) != 0) {
                    col_sub(j, k, a.at(k, j) / a.at(k, k));
                    if (a.at(k, j) != 0) residue = true;
                }
            if (residue) continue;
            // pivot row and column clear: enforce divisibility on the rest
            int bi = -1;
            for (int i = k + 1; i < r && bi < 0; ++i)
                for (int j = k + 1; j < c; ++j)
                    if (a.at(i, j) % a.at(k, k) != 0) {
                        bi = i;
                        break;
                    }
            if (bi < 0) break;
            row_sub(k, bi, Int(-1));  // pull the offending row up and re-reduce
        }
        if (a.at(k, k) < 0) negate_row(k);
    }
    std::vector<Int> d(n);
    for (int t = 0; t < n; ++t) d[t] = a.at(t, t);
    return d;
}

inline std::vector<Int> dense_smith_factors(IntMatrix a) { return dense_smith(a, nullptr, nullptr); }

}  // namespace detail

struct SmithNormalForm {
    std::vector<Int> factors;  // full diagonal, zeros at the end
    IntMatrix u, v;            // unimodular, u * m * v diagonal
};

inline SmithNormalForm smith_normal_form(const IntMatrix& m) {
    IntMatrix a = m;
    IntMatrix u = IntMatrix::identity(m.rows());
    IntMatrix v = IntMatrix::identity(m.cols());
    std::vector<Int> d = detail::dense_smith(a, &u, &v);
    IntMatrix expect(m.rows(), m.cols());
    for (int k = 0; k < static_cast<int>(d.size()); ++k) expect.at(k, k) = d[k];
    if (u * m * v != expect) throw std::logic_error("smith_normal_form: transform verification failed");
    if (detail::int_abs(detail::bareiss_determinant(u)) != 1 || detail::int_abs(detail::bareiss_determinant(v)) != 1)
        throw std::logic_error("smith_normal_form: transforms are not unimodular");
    return SmithNormalForm{std::move(d), std::move(u), std::move(v)};
}

namespace detail {

struct Triplet {
    int row, col;
    long long val;
};

struct SnfOverflow {};

inline void overflow_check(const long long& v) {
    if (v > (1LL << 60) || v < -(1LL << 60)) throw SnfOverflow{};
}
inline void overflow_check(const Int&) {}

// Sparse integer elimination using only +-1 pivots, smallest columns first.
// Passive columns are carried along (reduced modulo the others) but never
// pivoted.  Whatever cannot be reduced with unit pivots is returned for a
// dense finish.
template <class T>
struct SparseElimination {
    long unit_pivots = 0;
    std::vector<std::vector<std::pair<int, T>>> deferred;  // unfinished active columns
    std::vector<std::vector<std::pair<int, T>>> passive;   // residues of passive columns
};

template <class T>
SparseElimination<T> sparse_eliminate(int rows, int cols, const std::vector<Triplet>& entries, int passive_cols) {
    std::vector<std::vector<std::pair<int, T>>> col(cols + passive_cols);
    {
        std::vector<std::vector<std::pair<int, T>>> raw(cols + passive_cols);
        for (const Triplet& t : entries) raw[t.col].emplace_back(t.row, static_cast<T>(t.val));
        for (int c = 0; c < cols + passive_cols; ++c) {
            auto& v = raw[c];
            std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            for (auto& [rr, vv] : v) {
                (void)rr;
                if (!col[c].empty() && col[c].back().first == rr)
                    col[c].back().second += vv;
                else
                    col[c].emplace_back(rr, vv);
                if (!col[c].empty() && col[c].back().second == 0) col[c].pop_back();
            }
        }
    }
    std::vector<int> row_nnz(rows, 0);
    std::vector<std::vector<int>> row_cols(rows);
    for (int c = 0; c < cols + passive_cols; ++c)
        for (auto& [rr, vv] : col[c]) {
            (void)vv;
            ++row_nnz[rr];
            row_cols[rr].push_back(c);
        }

    enum { QUEUED = 0, DEFERRED = 1, DONE = 2, PASSIVE = 3 };
    std::vector<int> state(cols + passive_cols, QUEUED);
    for (int c = cols; c < cols + passive_cols; ++c) state[c] = PASSIVE;

    using HeapItem = std::pair<int, int>;  // (nnz, col)
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;
    for (int c = 0; c < cols; ++c) heap.push({static_cast<int>(col[c].size()), c});

    SparseElimination<T> out;
    while (!heap.empty()) {
        auto [sz, c] = heap.top();
        heap.pop();
        if (state[c] != QUEUED) continue;
        int cur = static_cast<int>(col[c].size());
        if (cur != sz) {
            heap.push({cur, c});
            continue;
        }
        if (cur == 0) {
            state[c] = DONE;
            continue;
        }
        int pr = -1;
        T pv{};
        int best = rows + 1;
        for (auto& [rr, vv] : col[c])
            if ((vv == 1 || vv == -1) && row_nnz[rr] < best) {
                best = row_nnz[rr];
                pr = rr;
                pv = vv;
            }
        if (pr < 0) {
            state[c] = DEFERRED;
            continue;
        }
        std::vector<std::pair<int, T>> pivot_col = std::move(col[c]);
        col[c].clear();
        std::vector<int> touched = std::move(row_cols[pr]);
        row_cols[pr].clear();
        for (int c2 : touched) {
            if (c2 == c || state[c2] == DONE) continue;
            auto& dst = col[c2];
            auto it = std::lower_bound(dst.begin(), dst.end(), pr,
                                       [](const std::pair<int, T>& e, int r) { return e.first < r; });
            if (it == dst.end() || it->first != pr) continue;  // stale index entry
            T q = it->second * pv;                             // entry / pivot since pivot is +-1
            // dst -= q * pivot_col
            std::vector<std::pair<int, T>> merged;
            merged.reserve(dst.size() + pivot_col.size());
            size_t i = 0, j = 0;
            while (i < dst.size() || j < pivot_col.size()) {
                if (j == pivot_col.size() || (i < dst.size() && dst[i].first < pivot_col[j].first)) {
                    merged.push_back(dst[i++]);
                } else if (i == dst.size() || pivot_col[j].first < dst[i].first) {
                    T nv = -q * pivot_col[j].second;
                    overflow_check(nv);
                    int rr = pivot_col[j].first;
                    merged.emplace_back(rr, nv);
                    ++row_nnz[rr];
                    row_cols[rr].push_back(c2);
                    ++j;
                } else {
                    T nv = dst[i].second - q * pivot_col[j].second;
                    overflow_check(nv);
                    if (nv != 0)
                        merged.emplace_back(dst[i].first, nv);
                    else
                        --row_nnz[dst[i].first];
                    ++i;
                    ++j;
                }
            }
            dst = std::move(merged);
            if (state[c2] == DEFERRED) state[c2] = QUEUED;
            if (state[c2] == QUEUED) heap.push({static_cast<int>(dst.size()), c2});
        }
        for (auto& [rr, vv] : pivot_col) {
            (void)vv;
            if (rr != pr) --row_nnz[rr];
        }
        row_nnz[pr] = 0;
        state[c] = DONE;
        ++out.unit_pivots;
    }
    for (int c = 0; c < cols + passive_cols; ++c) {
        if (state[c] == DEFERRED && !col[c].empty()) out.deferred.push_back(std::move(col[c]));
        if (state[c] == PASSIVE) out.passive.push_back(std::move(col[c]));
    }
    return out;
}

// Nonzero invariant factors of the sparse integer matrix, in divisibility order.
inline std::vector<Int> sparse_snf_factors(int rows, int cols, const std::vector<Triplet>& entries) {
    SparseElimination<Int> elim;
    try {
        auto fast = sparse_eliminate<long long>(rows, cols, entries, 0);
        elim.unit_pivots = fast.unit_pivots;
        for (auto& dc : fast.deferred) {
            std::vector<std::pair<int, Int>> conv;
            conv.reserve(dc.size());
            for (auto& [rr, vv] : dc) conv.emplace_back(rr, Int(vv));
            elim.deferred.push_back(std::move(conv));
        }
    } catch (const SnfOverflow&) {
        elim = sparse_eliminate<Int>(rows, cols, entries, 0);
    }
    std::vector<Int> factors(elim.unit_pivots, Int(1));
    if (!elim.deferred.empty()) {
        // compact the leftover columns into a dense block
        std::vector<int> live_rows;
        for (auto& dc : elim.deferred)
            for (auto& [rr, vv] : dc) {
                (void)vv;
                live_rows.push_back(rr);
            }
        std::sort(live_rows.begin(), live_rows.end());
        live_rows.erase(std::unique(live_rows.begin(), live_rows.end()), live_rows.end());
        std::vector<int> where(rows, -1);
        for (int i = 0; i < static_cast<int>(live_rows.size()); ++i) where[live_rows[i]] = i;
        IntMatrix rest(static_cast<int>(live_rows.size()), static_cast<int>(elim.deferred.size()));
        for (int c = 0; c < static_cast<int>(elim.deferred.size()); ++c)
            for (auto& [rr, vv] : elim.deferred[c]) rest.at(where[rr], c) = vv;
        for (const Int& d : detail::dense_smith_factors(std::move(rest)))
            if (d != 0) factors.push_back(d);
    }
    return factors;
}

}  // namespace detail

}  // namespace sftri
