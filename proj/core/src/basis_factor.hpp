#ifndef EAMOD_BASIS_FACTOR_HPP
#define EAMOD_BASIS_FACTOR_HPP

#include <span>
#include <utility>
#include <vector>

namespace eamod::detail {

/// Sparse LU of a simplex basis with product-form updates.
///
/// The factorization is a right-looking Markowitz elimination with threshold pivoting.
/// Bases of flow problems are close to triangular, so most pivots are singletons and the
/// factors stay about as sparse as the basis itself. Solves skip zero pivots.
class BasisFactor {
public:
    struct Column {
        std::span<const int> rows;
        std::span<const double> vals;
    };

    /// Factors the m x m matrix whose k-th column is `cols[k]`. On structural singularity
    /// returns the basis positions that could not be pivoted, paired with rows left
    /// without a pivot; the caller replaces those columns with the rows' logicals and
    /// factors again. An empty result means success.
    std::vector<std::pair<int, int>> factor(int m, const std::vector<Column>& cols);

    /// x := B^-1 x. Input indexed by row, output by basis position.
    void ftran(std::vector<double>& x) const;
    /// x := B^-T x. Input indexed by basis position, output by row.
    void btran(std::vector<double>& x) const;

    /// Records that basis position r was replaced; `alpha` = B^-1 a_q before the change.
    void update(int r, const std::vector<double>& alpha);

    [[nodiscard]] int updates() const { return static_cast<int>(eta_r_.size()); }
    [[nodiscard]] std::size_t update_nonzeros() const { return eta_idx_.size(); }
    [[nodiscard]] std::size_t factor_nonzeros() const { return l_idx_.size() + u_idx_.size(); }

private:
    int m_ = 0;
    // Pivot sequence: step s pivots on (pivot_row_[s], pivot_col_[s]) with value diag_[s].
    std::vector<int> pivot_row_;
    std::vector<int> pivot_col_;
    std::vector<double> diag_;

    // L multipliers of step s: rows l_idx_[l_start_[s] .. l_start_[s+1]).
    std::vector<int> l_start_;
    std::vector<int> l_idx_;
    std::vector<double> l_val_;

    // U off-diagonals of pivot row s, stored as (step t > s, value).
    std::vector<int> u_start_;
    std::vector<int> u_idx_;
    std::vector<double> u_val_;
    // Same entries grouped by column step t, stored as (step s < t, value).
    std::vector<int> ut_start_;
    std::vector<int> ut_idx_;
    std::vector<double> ut_val_;

    // Product-form updates: eta k replaces position eta_r_[k].
    std::vector<int> eta_r_;
    std::vector<double> eta_pivot_;
    std::vector<int> eta_start_;
    std::vector<int> eta_idx_;
    std::vector<double> eta_val_;

    // Scratch reused across factorizations.
    std::vector<int> csc_start_, csc_row_, csr_start_, csr_col_;
    std::vector<double> csc_val_, csr_val_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<std::vector<int>> col_rows_;
    mutable std::vector<double> work_;
};

} // namespace eamod::detail

#endif
