#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>

namespace eamod::detail {
namespace {

constexpr double kThreshold = 0.1;
constexpr double kTiny = 1e-11;
constexpr int kSearchLimit = 4;

// Doubly linked lists of items bucketed by their nonzero count.
class CountBuckets {
public:
    explicit CountBuckets(int n) : head_(n + 2, -1), next_(n, -1), prev_(n, -1), count_(n, 0) {}

    void insert(int item, int count) {
        count_[item] = count;
        prev_[item] = -1;
        next_[item] = head_[count];
        if (head_[count] >= 0) {
            prev_[head_[count]] = item;
        }
        head_[count] = item;
    }
    void remove(int item) {
        const int c = count_[item];
        if (prev_[item] >= 0) {
            next_[prev_[item]] = next_[item];
        } else {
            head_[c] = next_[item];
        }
        if (next_[item] >= 0) {
            prev_[next_[item]] = prev_[item];
        }
    }
    void move(int item, int count) {
        remove(item);
        insert(item, count);
    }
    [[nodiscard]] int first(int count) const { return head_[count]; }
    [[nodiscard]] int next(int item) const { return next_[item]; }
    [[nodiscard]] int max_count() const { return static_cast<int>(head_.size()) - 1; }

private:
    std::vector<int> head_;
    std::vector<int> next_;
    std::vector<int> prev_;
    std::vector<int> count_;
};

} // namespace

std::vector<std::pair<int, int>> BasisFactor::factor(int m, const std::vector<Column>& cols) {
    m_ = m;
    const auto um = static_cast<std::size_t>(m);
    eta_r_.clear();
    eta_pivot_.clear();
    eta_start_.assign(1, 0);
    eta_idx_.clear();
    eta_val_.clear();
    pivot_row_.clear();
    pivot_col_.clear();
    diag_.clear();
    l_start_.assign(1, 0);
    l_idx_.clear();
    l_val_.clear();
    work_.assign(um, 0.0);

    // Compressed copies of B by row and by column.
    csc_start_.assign(um + 1, 0);
    csc_row_.clear();
    csc_val_.clear();
    std::vector<int> row_count(um, 0);
    for (int j = 0; j < m; ++j) {
        const auto& c = cols[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < c.rows.size(); ++k) {
            if (c.vals[k] != 0.0) {
                csc_row_.push_back(c.rows[k]);
                csc_val_.push_back(c.vals[k]);
                ++row_count[static_cast<std::size_t>(c.rows[k])];
            }
        }
        csc_start_[static_cast<std::size_t>(j) + 1] = static_cast<int>(csc_row_.size());
    }
    csr_start_.assign(um + 1, 0);
    for (int i = 0; i < m; ++i) {
        csr_start_[i + 1] = csr_start_[i] + row_count[i];
    }
    csr_col_.resize(csc_row_.size());
    csr_val_.resize(csc_row_.size());
    {
        std::vector<int> fill(csr_start_.begin(), csr_start_.end() - 1);
        for (int j = 0; j < m; ++j) {
            for (int e = csc_start_[j]; e < csc_start_[j + 1]; ++e) {
                const int at = fill[csc_row_[e]]++;
                csr_col_[at] = j;
                csr_val_[at] = csc_val_[e];
            }
        }
    }
    std::vector<int> col_count(um);
    for (int j = 0; j < m; ++j) {
        col_count[j] = csc_start_[j + 1] - csc_start_[j];
    }

    std::vector<char> row_done(um, 0);
    std::vector<char> col_done(um, 0);
    std::vector<int> urow_start{0};
    std::vector<int> urow_col;
    std::vector<double> urow_val;

    const auto record_pivot = [&](int p, int q, double d) {
        pivot_row_.push_back(p);
        pivot_col_.push_back(q);
        diag_.push_back(d);
        row_done[p] = 1;
        col_done[q] = 1;
    };

    // Triangular prepass. Singleton pivots cause no fill, so every active entry keeps its
    // original value and the compressed copies stay valid throughout.
    std::vector<int> col_stack;
    std::vector<int> row_stack;
    for (int j = 0; j < m; ++j) {
        if (col_count[j] == 1) {
            col_stack.push_back(j);
        }
    }
    for (int i = 0; i < m; ++i) {
        if (row_count[i] == 1) {
            row_stack.push_back(i);
        }
    }
    while (!col_stack.empty() || !row_stack.empty()) {
        if (!col_stack.empty()) {
            const int q = col_stack.back();
            col_stack.pop_back();
            if (col_done[q] || col_count[q] != 1) {
                continue;
            }
            int p = -1;
            double d = 0.0;
            for (int e = csc_start_[q]; e < csc_start_[q + 1]; ++e) {
                if (!row_done[csc_row_[e]]) {
                    p = csc_row_[e];
                    d = csc_val_[e];
                    break;
                }
            }
            if (std::abs(d) <= kTiny) {
                continue;
            }
            record_pivot(p, q, d);
            for (int e = csr_start_[p]; e < csr_start_[p + 1]; ++e) {
                const int j = csr_col_[e];
                if (col_done[j]) {
                    continue;
                }
                urow_col.push_back(j);
                urow_val.push_back(csr_val_[e]);
                if (--col_count[j] == 1) {
                    col_stack.push_back(j);
                }
            }
            urow_start.push_back(static_cast<int>(urow_col.size()));
            l_start_.push_back(static_cast<int>(l_idx_.size()));
            continue;
        }
        const int p = row_stack.back();
        row_stack.pop_back();
        if (row_done[p] || row_count[p] != 1) {
            continue;
        }
        int q = -1;
        double d = 0.0;
        for (int e = csr_start_[p]; e < csr_start_[p + 1]; ++e) {
            if (!col_done[csr_col_[e]]) {
                q = csr_col_[e];
                d = csr_val_[e];
                break;
            }
        }
        double mx = 0.0;
        for (int e = csc_start_[q]; e < csc_start_[q + 1]; ++e) {
            if (!row_done[csc_row_[e]]) {
                mx = std::max(mx, std::abs(csc_val_[e]));
            }
        }
        if (std::abs(d) <= kTiny || std::abs(d) < kThreshold * mx) {
            continue;
        }
        record_pivot(p, q, d);
        for (int e = csc_start_[q]; e < csc_start_[q + 1]; ++e) {
            const int k = csc_row_[e];
            if (row_done[k]) {
                continue;
            }
            l_idx_.push_back(k);
            l_val_.push_back(csc_val_[e] / d);
            if (--row_count[k] == 1) {
                row_stack.push_back(k);
            }
        }
        urow_start.push_back(static_cast<int>(urow_col.size()));
        l_start_.push_back(static_cast<int>(l_idx_.size()));
    }

    // Markowitz elimination on the remaining kernel. Rows hold (column, value), columns
    // hold row patterns.
    auto& rows = rows_;
    auto& col_rows = col_rows_;
    rows.resize(um);
    col_rows.resize(um);
    for (int i = 0; i < m; ++i) {
        rows[i].clear();
        col_rows[i].clear();
    }
    for (int j = 0; j < m; ++j) {
        if (col_done[j]) {
            continue;
        }
        for (int e = csc_start_[j]; e < csc_start_[j + 1]; ++e) {
            const int i = csc_row_[e];
            if (!row_done[i]) {
                rows[i].emplace_back(j, csc_val_[e]);
                col_rows[j].push_back(i);
            }
        }
    }
    CountBuckets col_b(m);
    CountBuckets row_b(m);
    for (int j = 0; j < m; ++j) {
        if (!col_done[j]) {
            col_b.insert(j, static_cast<int>(col_rows[j].size()));
        }
    }
    for (int i = 0; i < m; ++i) {
        if (!row_done[i]) {
            row_b.insert(i, static_cast<int>(rows[i].size()));
        }
    }
    std::vector<int> pos(um, -1);

    const auto value = [&](int i, int j) {
        for (const auto& [c, v] : rows[i]) {
            if (c == j) {
                return v;
            }
        }
        return 0.0;
    };
    const auto col_max = [&](int j) {
        double mx = 0.0;
        for (int i : col_rows[j]) {
            mx = std::max(mx, std::abs(value(i, j)));
        }
        return mx;
    };

    const auto find_pivot = [&](int& pi, int& pj) -> bool {
        for (int j = col_b.first(1); j >= 0; j = col_b.next(j)) {
            const int i = col_rows[j][0];
            if (std::abs(value(i, j)) > kTiny) {
                pi = i;
                pj = j;
                return true;
            }
        }
        for (int i = row_b.first(1); i >= 0; i = row_b.next(i)) {
            const auto [j, v] = rows[i][0];
            if (std::abs(v) > kTiny && std::abs(v) >= kThreshold * col_max(j)) {
                pi = i;
                pj = j;
                return true;
            }
        }
        long best_cost = -1;
        int searched = 0;
        for (int c = 2; c <= m; ++c) {
            for (int j = col_b.first(c); j >= 0; j = col_b.next(j)) {
                const double mx = col_max(j);
                for (int i : col_rows[j]) {
                    const double v = std::abs(value(i, j));
                    if (v <= kTiny || v < kThreshold * mx) {
                        continue;
                    }
                    const long cost = static_cast<long>(rows[i].size() - 1) * (c - 1);
                    if (best_cost < 0 || cost < best_cost) {
                        best_cost = cost;
                        pi = i;
                        pj = j;
                    }
                }
                if (++searched >= kSearchLimit && best_cost >= 0) {
                    return true;
                }
            }
            for (int i = row_b.first(c); i >= 0; i = row_b.next(i)) {
                for (const auto& [j, v] : rows[i]) {
                    const double a = std::abs(v);
                    if (a <= kTiny || a < kThreshold * col_max(j)) {
                        continue;
                    }
                    const long cost = static_cast<long>(c - 1) * static_cast<long>(col_rows[j].size() - 1);
                    if (best_cost < 0 || cost < best_cost) {
                        best_cost = cost;
                        pi = i;
                        pj = j;
                    }
                }
                if (++searched >= kSearchLimit && best_cost >= 0) {
                    return true;
                }
            }
            if (best_cost >= 0 && c * c > best_cost) {
                return true; // nothing with a larger count can beat it
            }
        }
        return best_cost >= 0;
    };

    while (static_cast<int>(pivot_row_.size()) < m) {
        int p = -1;
        int q = -1;
        if (!find_pivot(p, q)) {
            break;
        }
        const double d = value(p, q);
        record_pivot(p, q, d);

        // Pivot row becomes a row of U; it leaves every column pattern.
        auto& prow = rows[p];
        for (const auto& [j, v] : prow) {
            auto& pat = col_rows[j];
            pat.erase(std::find(pat.begin(), pat.end(), p));
            if (j != q) {
                urow_col.push_back(j);
                urow_val.push_back(v);
                col_b.move(j, static_cast<int>(pat.size()));
            }
        }
        urow_start.push_back(static_cast<int>(urow_col.size()));

        // Eliminate the pivot column from the remaining rows.
        const int u_begin = urow_start[urow_start.size() - 2];
        const int u_end = urow_start.back();
        for (int k : col_rows[q]) {
            auto& row = rows[k];
            for (std::size_t e = 0; e < row.size(); ++e) {
                pos[row[e].first] = static_cast<int>(e);
            }
            const double mult = row[pos[q]].second / d;
            l_idx_.push_back(k);
            l_val_.push_back(mult);
            for (int u = u_begin; u < u_end; ++u) {
                const int j = urow_col[u];
                const double delta = -mult * urow_val[u];
                if (pos[j] >= 0) {
                    row[pos[j]].second += delta;
                } else {
                    pos[j] = static_cast<int>(row.size());
                    row.emplace_back(j, delta);
                    col_rows[j].push_back(k);
                    col_b.move(j, static_cast<int>(col_rows[j].size()));
                }
            }
            const int at = pos[q];
            for (const auto& [j, v] : row) {
                pos[j] = -1;
            }
            row[at] = row.back();
            row.pop_back();
            row_b.move(k, static_cast<int>(row.size()));
        }
        l_start_.push_back(static_cast<int>(l_idx_.size()));

        col_rows[q].clear();
        col_b.remove(q);
        row_b.remove(p);
        prow.clear();
    }

    std::vector<std::pair<int, int>> deficient;
    if (static_cast<int>(pivot_row_.size()) < m) {
        std::vector<int> free_rows;
        for (int i = 0; i < m; ++i) {
            if (!row_done[i]) {
                free_rows.push_back(i);
            }
        }
        std::size_t next = 0;
        for (int j = 0; j < m; ++j) {
            if (!col_done[j]) {
                deficient.emplace_back(j, free_rows[next++]);
            }
        }
        return deficient;
    }

    // Re-express U by pivot step, row-wise and column-wise.
    std::vector<int> step_of_col(static_cast<std::size_t>(m));
    for (int s = 0; s < m; ++s) {
        step_of_col[pivot_col_[s]] = s;
    }
    u_start_ = urow_start;
    u_idx_.resize(urow_col.size());
    u_val_ = urow_val;
    std::vector<int> ccount(static_cast<std::size_t>(m) + 1, 0);
    for (std::size_t e = 0; e < urow_col.size(); ++e) {
        u_idx_[e] = step_of_col[urow_col[e]];
        ++ccount[static_cast<std::size_t>(u_idx_[e]) + 1];
    }
    ut_start_.assign(static_cast<std::size_t>(m) + 1, 0);
    for (int t = 0; t < m; ++t) {
        ut_start_[t + 1] = ut_start_[t] + ccount[t + 1];
    }
    ut_idx_.resize(u_idx_.size());
    ut_val_.resize(u_idx_.size());
    auto fill = ut_start_;
    for (int s = 0; s < m; ++s) {
        for (int e = u_start_[s]; e < u_start_[s + 1]; ++e) {
            const int t = u_idx_[e];
            ut_idx_[fill[t]] = s;
            ut_val_[fill[t]++] = u_val_[e];
        }
    }
    return deficient;
}

void BasisFactor::ftran(std::vector<double>& x) const {
    for (int s = 0; s < m_; ++s) {
        const double xv = x[pivot_row_[s]];
        if (xv == 0.0) {
            continue;
        }
        for (int e = l_start_[s]; e < l_start_[s + 1]; ++e) {
            x[l_idx_[e]] -= l_val_[e] * xv;
        }
    }
    for (int s = m_ - 1; s >= 0; --s) {
        const double v = x[pivot_row_[s]] / diag_[s];
        work_[pivot_col_[s]] = v;
        if (v == 0.0) {
            continue;
        }
        for (int e = ut_start_[s]; e < ut_start_[s + 1]; ++e) {
            x[pivot_row_[ut_idx_[e]]] -= ut_val_[e] * v;
        }
    }
    x.swap(work_);
    for (std::size_t k = 0; k < eta_r_.size(); ++k) {
        const int r = eta_r_[k];
        const double xr = x[r] / eta_pivot_[k];
        x[r] = xr;
        if (xr == 0.0) {
            continue;
        }
        for (int e = eta_start_[k]; e < eta_start_[k + 1]; ++e) {
            x[eta_idx_[e]] -= eta_val_[e] * xr;
        }
    }
}

void BasisFactor::btran(std::vector<double>& x) const {
    for (std::size_t k = eta_r_.size(); k-- > 0;) {
        const int r = eta_r_[k];
        double s = x[r];
        for (int e = eta_start_[k]; e < eta_start_[k + 1]; ++e) {
            s -= eta_val_[e] * x[eta_idx_[e]];
        }
        x[r] = s / eta_pivot_[k];
    }
    for (int s = 0; s < m_; ++s) {
        const double v = x[pivot_col_[s]] / diag_[s];
        work_[pivot_row_[s]] = v;
        if (v == 0.0) {
            continue;
        }
        for (int e = u_start_[s]; e < u_start_[s + 1]; ++e) {
            x[pivot_col_[u_idx_[e]]] -= u_val_[e] * v;
        }
    }
    x.swap(work_);
    for (int s = m_ - 1; s >= 0; --s) {
        double sum = 0.0;
        for (int e = l_start_[s]; e < l_start_[s + 1]; ++e) {
            sum += l_val_[e] * x[l_idx_[e]];
        }
        x[pivot_row_[s]] -= sum;
    }
}

void BasisFactor::update(int r, const std::vector<double>& alpha) {
    eta_r_.push_back(r);
    eta_pivot_.push_back(alpha[r]);
    for (int k = 0; k < m_; ++k) {
        if (k != r && std::abs(alpha[k]) > 1e-12) {
            eta_idx_.push_back(k);
            eta_val_.push_back(alpha[k]);
        }
    }
    eta_start_.push_back(static_cast<int>(eta_idx_.size()));
}

} // namespace eamod::detail
