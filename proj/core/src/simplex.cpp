#include "eamod/simplex.hpp"

#include "eamod/errors.hpp"

#include "basis_factor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>

namespace eamod {

void SolverConfig::validate() const {
    if (!(feasibility_tol > 0.0 && feasibility_tol <= 1e-3)) {
        throw InvalidInput("feasibility_tol must lie in (0, 1e-3]");
    }
    if (!(optimality_tol > 0.0 && optimality_tol <= 1e-3)) {
        throw InvalidInput("optimality_tol must lie in (0, 1e-3]");
    }
    if (max_iters <= 0) {
        throw InvalidInput("max_iters must be positive");
    }
    if (refactor_interval <= 0) {
        throw InvalidInput("refactor_interval must be positive");
    }
}

const char* to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::Unbounded:
        return "unbounded";
    case SolveStatus::IterLimit:
        return "iteration_limit";
    }
    return "?";
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free };

constexpr double kPivotTol = 1e-9;
constexpr double kZeroTol = 1e-12;
constexpr double kDevexReset = 1e7;
constexpr double kCompositeWeight = 100.0;

double pow2_round(double s) {
    return std::exp2(std::round(std::log2(s)));
}

class PrimalSimplex {
public:
    PrimalSimplex(const LpModel& model, const SolverConfig& cfg) : model_(model), cfg_(cfg) {}

    SolveResult run();

private:
    // Setup
    void scale();
    void build_columns();
    void init_basis();

    // Linear algebra
    bool refactor();
    void compute_primal();
    void compute_duals();
    void pivot_row(const std::vector<double>& rho);

    // Iteration
    enum class Outcome { Optimal, Unbounded, IterLimit, Restart };
    Outcome iterate(bool phase1);
    int choose_entering(bool bland) const;
    // Composite minimizes the true objective plus a heavy penalty on artificials.
    enum class Phase { Composite, Infeasibility, Optimality };
    void set_phase_costs(Phase phase);
    double phase_objective() const;
    Phase phase_ = Phase::Optimality;
    [[nodiscard]] bool eligible(int j, double dj) const;
    [[nodiscard]] double column_dot(int j, const std::vector<double>& y) const;
    [[nodiscard]] double max_basic_infeasibility() const;
    void make_nonbasic(int j);
    void set_move(int j);
    void reset_moves();

    const LpModel& model_;
    SolverConfig cfg_;

    int m_ = 0;     // rows
    int n_ = 0;     // structural columns
    int total_ = 0; // structural + logical + artificial

    std::vector<double> row_scale_;
    std::vector<double> col_scale_;
    std::vector<double> b_;

    // All columns, column-major and row-major.
    std::vector<int> cstart_;
    std::vector<int> cidx_;
    std::vector<double> cval_;
    std::vector<int> rstart_;
    std::vector<int> ridx_;
    std::vector<double> rval_;

    std::vector<double> lb_;
    std::vector<double> ub_;
    std::vector<double> true_cost_;
    std::vector<double> cost_;
    std::vector<int> art_row_; // row of each artificial, indexed from n_ + m_

    std::vector<double> x_;
    std::vector<VarState> state_;
    std::vector<int> head_;
    std::vector<int> pos_;

    detail::BasisFactor factor_;

    std::vector<double> y_;
    std::vector<double> d_;
    std::vector<double> weight_;
    // Direction a nonbasic column may move in (+1 up, -1 down, 0 none); free columns
    // are priced separately.
    std::vector<double> move_;
    std::vector<int> free_cols_;

    std::vector<double> alpha_row_;
    std::vector<int> alpha_row_touched_;
    std::vector<char> alpha_row_mark_;

    SolveStats stats_;
};

void PrimalSimplex::scale() {
    row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
    col_scale_.assign(static_cast<std::size_t>(n_), 1.0);
    if (!cfg_.scaling) {
        return;
    }
    for (int pass = 0; pass < 6; ++pass) {
        std::vector<double> cmin(static_cast<std::size_t>(n_), kInf);
        std::vector<double> cmax(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const auto r = model_.row(static_cast<std::size_t>(i));
            double rmin = kInf;
            double rmax = 0.0;
            for (std::size_t k = 0; k < r.cols.size(); ++k) {
                const double v = std::abs(r.vals[k]) * col_scale_[r.cols[k]];
                rmin = std::min(rmin, v);
                rmax = std::max(rmax, v);
            }
            if (rmax > 0.0) {
                row_scale_[i] = 1.0 / std::sqrt(rmin * rmax);
            }
            for (std::size_t k = 0; k < r.cols.size(); ++k) {
                const auto j = static_cast<std::size_t>(r.cols[k]);
                const double v = std::abs(r.vals[k]) * row_scale_[i] * col_scale_[j];
                cmin[j] = std::min(cmin[j], v);
                cmax[j] = std::max(cmax[j], v);
            }
        }
        for (int j = 0; j < n_; ++j) {
            if (cmax[j] > 0.0) {
                col_scale_[j] /= std::sqrt(cmin[j] * cmax[j]);
            }
        }
    }
    for (auto& s : row_scale_) {
        s = pow2_round(s);
    }
    for (auto& s : col_scale_) {
        s = pow2_round(s);
    }
}

// Structural columns first, then one logical per row; artificials are appended later.
void PrimalSimplex::build_columns() {
    const auto nn = static_cast<std::size_t>(n_);
    const auto mm = static_cast<std::size_t>(m_);
    lb_.assign(nn + mm, 0.0);
    ub_.assign(nn + mm, 0.0);
    true_cost_.assign(nn + mm, 0.0);
    for (std::size_t j = 0; j < nn; ++j) {
        lb_[j] = model_.lower(j) / col_scale_[j];
        ub_[j] = model_.upper(j) / col_scale_[j];
        true_cost_[j] = model_.cost(j) * col_scale_[j];
    }
    b_.assign(mm, 0.0);
    for (std::size_t i = 0; i < mm; ++i) {
        b_[i] = model_.rhs(i) * row_scale_[i];
        // A x + s = b.
        switch (model_.sense(i)) {
        case RowSense::LessEqual:
            lb_[nn + i] = 0.0;
            ub_[nn + i] = kInf;
            break;
        case RowSense::GreaterEqual:
            lb_[nn + i] = -kInf;
            ub_[nn + i] = 0.0;
            break;
        case RowSense::Equal:
            lb_[nn + i] = 0.0;
            ub_[nn + i] = 0.0;
            break;
        }
    }
}

void PrimalSimplex::init_basis() {
    const auto nn = static_cast<std::size_t>(n_);
    const auto mm = static_cast<std::size_t>(m_);
    x_.assign(nn + mm, 0.0);
    state_.assign(nn + mm, VarState::AtLower);
    for (std::size_t j = 0; j < nn; ++j) {
        if (std::isfinite(lb_[j])) {
            x_[j] = lb_[j];
            state_[j] = VarState::AtLower;
        } else if (std::isfinite(ub_[j])) {
            x_[j] = ub_[j];
            state_[j] = VarState::AtUpper;
        } else {
            x_[j] = 0.0;
            state_[j] = VarState::Free;
        }
    }

    // Residual of each row with structurals at their starting bounds.
    std::vector<double> resid = b_;
    for (int i = 0; i < m_; ++i) {
        const auto r = model_.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < r.cols.size(); ++k) {
            const auto j = static_cast<std::size_t>(r.cols[k]);
            resid[i] -= r.vals[k] * row_scale_[i] * col_scale_[j] * x_[j];
        }
    }

    head_.assign(mm, -1);
    std::vector<std::pair<int, double>> artificials; // (row, sign)
    for (std::size_t i = 0; i < mm; ++i) {
        const auto s = nn + i;
        const double v = resid[i];
        if (v >= lb_[s] && v <= ub_[s]) {
            x_[s] = v;
            state_[s] = VarState::Basic;
            head_[i] = static_cast<int>(s);
        } else {
            const double bound = v < lb_[s] ? lb_[s] : ub_[s];
            x_[s] = bound;
            state_[s] = bound == lb_[s] ? VarState::AtLower : VarState::AtUpper;
            artificials.emplace_back(static_cast<int>(i), v > bound ? 1.0 : -1.0);
            resid[i] = std::abs(v - bound);
        }
    }

    // Assemble CSC for all columns including artificials.
    const auto n_art = artificials.size();
    total_ = static_cast<int>(nn + mm + n_art);
    cstart_.assign(static_cast<std::size_t>(total_) + 1, 0);
    std::vector<std::vector<std::pair<int, double>>> cols(nn);
    for (int i = 0; i < m_; ++i) {
        const auto r = model_.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < r.cols.size(); ++k) {
            const auto j = static_cast<std::size_t>(r.cols[k]);
            cols[j].emplace_back(i, r.vals[k] * row_scale_[i] * col_scale_[j]);
        }
    }
    cidx_.clear();
    cval_.clear();
    for (std::size_t j = 0; j < nn; ++j) {
        for (const auto& [i, v] : cols[j]) {
            cidx_.push_back(i);
            cval_.push_back(v);
        }
        cstart_[j + 1] = static_cast<int>(cidx_.size());
    }
    for (std::size_t i = 0; i < mm; ++i) {
        cidx_.push_back(static_cast<int>(i));
        cval_.push_back(1.0);
        cstart_[nn + i + 1] = static_cast<int>(cidx_.size());
    }
    art_row_.clear();
    for (std::size_t k = 0; k < n_art; ++k) {
        const auto [i, sign] = artificials[k];
        cidx_.push_back(i);
        cval_.push_back(sign);
        cstart_[nn + mm + k + 1] = static_cast<int>(cidx_.size());
        art_row_.push_back(i);
        const auto j = static_cast<int>(nn + mm + k);
        lb_.push_back(0.0);
        ub_.push_back(kInf);
        true_cost_.push_back(0.0);
        x_.push_back(resid[static_cast<std::size_t>(i)]);
        state_.push_back(VarState::Basic);
        head_[static_cast<std::size_t>(i)] = j;
    }

    // Row-major copy.
    rstart_.assign(mm + 1, 0);
    for (int j = 0; j < total_; ++j) {
        for (int p = cstart_[j]; p < cstart_[j + 1]; ++p) {
            ++rstart_[static_cast<std::size_t>(cidx_[p]) + 1];
        }
    }
    for (std::size_t i = 0; i < mm; ++i) {
        rstart_[i + 1] += rstart_[i];
    }
    ridx_.assign(cidx_.size(), 0);
    rval_.assign(cidx_.size(), 0.0);
    auto fill = rstart_;
    for (int j = 0; j < total_; ++j) {
        for (int p = cstart_[j]; p < cstart_[j + 1]; ++p) {
            const auto i = static_cast<std::size_t>(cidx_[p]);
            ridx_[fill[i]] = j;
            rval_[fill[i]++] = cval_[p];
        }
    }

    pos_.assign(static_cast<std::size_t>(total_), -1);
    for (int i = 0; i < m_; ++i) {
        pos_[static_cast<std::size_t>(head_[i])] = i;
    }
    alpha_row_.assign(static_cast<std::size_t>(total_), 0.0);
    alpha_row_mark_.assign(static_cast<std::size_t>(total_), 0);
    weight_.assign(static_cast<std::size_t>(total_), 1.0);
    d_.assign(static_cast<std::size_t>(total_), 0.0);
}

void PrimalSimplex::make_nonbasic(int j) {
    if (std::isfinite(lb_[j])) {
        x_[j] = lb_[j];
        state_[j] = VarState::AtLower;
    } else if (std::isfinite(ub_[j])) {
        x_[j] = ub_[j];
        state_[j] = VarState::AtUpper;
    } else {
        x_[j] = 0.0;
        state_[j] = VarState::Free;
    }
    pos_[j] = -1;
}

// Factors the basis; a singular basis is repaired by swapping in logicals of the rows
// left without a pivot. Returns false only if repair does not converge.
bool PrimalSimplex::refactor() {
    for (int attempt = 0; attempt < 3; ++attempt) {
        ++stats_.refactorizations;
        std::vector<detail::BasisFactor::Column> cols(static_cast<std::size_t>(m_));
        for (int k = 0; k < m_; ++k) {
            const int j = head_[k];
            const auto len = static_cast<std::size_t>(cstart_[j + 1] - cstart_[j]);
            cols[k] = {{cidx_.data() + cstart_[j], len}, {cval_.data() + cstart_[j], len}};
        }
        const auto deficient = factor_.factor(m_, cols);
        if (deficient.empty()) {
            return true;
        }
        for (const auto& [k, row] : deficient) {
            const int logical = n_ + row;
            if (state_[logical] == VarState::Basic) {
                return false;
            }
            make_nonbasic(head_[k]);
            head_[k] = logical;
            state_[logical] = VarState::Basic;
            pos_[logical] = k;
        }
    }
    return false;
}

void PrimalSimplex::set_move(int j) {
    double dir = 0.0;
    if (ub_[j] > lb_[j]) {
        if (state_[j] == VarState::AtLower) {
            dir = 1.0;
        } else if (state_[j] == VarState::AtUpper) {
            dir = -1.0;
        }
    }
    move_[j] = dir;
}

void PrimalSimplex::reset_moves() {
    move_.resize(static_cast<std::size_t>(total_));
    free_cols_.clear();
    for (int j = 0; j < total_; ++j) {
        set_move(j);
        if (!std::isfinite(lb_[j]) && !std::isfinite(ub_[j])) {
            free_cols_.push_back(j);
        }
    }
}

double PrimalSimplex::max_basic_infeasibility() const {
    double worst = 0.0;
    for (int k = 0; k < m_; ++k) {
        const int j = head_[k];
        worst = std::max({worst, lb_[j] - x_[j], x_[j] - ub_[j]});
    }
    return worst;
}

void PrimalSimplex::compute_primal() {
    std::vector<double> rhs = b_;
    for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::Basic || x_[j] == 0.0) {
            continue;
        }
        for (int p = cstart_[j]; p < cstart_[j + 1]; ++p) {
            rhs[cidx_[p]] -= cval_[p] * x_[j];
        }
    }
    factor_.ftran(rhs);
    for (int k = 0; k < m_; ++k) {
        x_[static_cast<std::size_t>(head_[k])] = rhs[k];
    }
}

double PrimalSimplex::column_dot(int j, const std::vector<double>& y) const {
    double s = 0.0;
    for (int p = cstart_[j]; p < cstart_[j + 1]; ++p) {
        s += cval_[p] * y[cidx_[p]];
    }
    return s;
}

void PrimalSimplex::compute_duals() {
    y_.resize(static_cast<std::size_t>(m_));
    for (int k = 0; k < m_; ++k) {
        y_[k] = cost_[static_cast<std::size_t>(head_[k])];
    }
    factor_.btran(y_);
    for (int j = 0; j < total_; ++j) {
        d_[j] = state_[j] == VarState::Basic ? 0.0 : cost_[j] - column_dot(j, y_);
    }
}

// alpha_row_ = rho' A restricted to nonbasic columns.
void PrimalSimplex::pivot_row(const std::vector<double>& rho) {
    for (int j : alpha_row_touched_) {
        alpha_row_[j] = 0.0;
        alpha_row_mark_[j] = 0;
    }
    alpha_row_touched_.clear();
    for (int i = 0; i < m_; ++i) {
        const double ri = rho[i];
        if (std::abs(ri) <= kZeroTol) {
            continue;
        }
        for (int p = rstart_[i]; p < rstart_[i + 1]; ++p) {
            const int j = ridx_[p];
            if (state_[j] == VarState::Basic) {
                continue;
            }
            if (!alpha_row_mark_[j]) {
                alpha_row_mark_[j] = 1;
                alpha_row_touched_.push_back(j);
            }
            alpha_row_[j] += ri * rval_[p];
        }
    }
}

bool PrimalSimplex::eligible(int j, double dj) const {
    const double tol = cfg_.optimality_tol;
    switch (state_[j]) {
    case VarState::Basic:
        return false;
    case VarState::AtLower:
        return dj < -tol && ub_[j] > lb_[j];
    case VarState::AtUpper:
        return dj > tol && ub_[j] > lb_[j];
    case VarState::Free:
        return std::abs(dj) > tol;
    }
    return false;
}

int PrimalSimplex::choose_entering(bool bland) const {
    if (bland) {
        for (int j = 0; j < total_; ++j) {
            if (eligible(j, d_[j])) {
                return j;
            }
        }
        return -1;
    }
    const double tol = cfg_.optimality_tol;
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
        const double v = -move_[j] * d_[j];
        if (v > tol) {
            const double score = v * v / weight_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
    }
    for (int j : free_cols_) {
        const double dj = d_[j];
        if (state_[j] == VarState::Free && std::abs(dj) > tol) {
            const double score = dj * dj / weight_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
    }
    return best;
}

void PrimalSimplex::set_phase_costs(Phase phase) {
    phase_ = phase;
    cost_.assign(static_cast<std::size_t>(total_), 0.0);
    if (phase != Phase::Infeasibility) {
        for (int j = 0; j < n_; ++j) {
            cost_[j] = true_cost_[j];
        }
    }
    if (phase != Phase::Optimality) {
        double weight = 1.0;
        if (phase == Phase::Composite) {
            double cmax = 0.0;
            for (int j = 0; j < n_; ++j) {
                cmax = std::max(cmax, std::abs(true_cost_[j]));
            }
            weight = kCompositeWeight * std::max(cmax, 1.0);
        }
        for (int j = n_ + m_; j < total_; ++j) {
            cost_[j] = weight;
        }
    }
}

double PrimalSimplex::phase_objective() const {
    double z = 0.0;
    for (int j = 0; j < total_; ++j) {
        z += cost_[j] * x_[j];
    }
    return z;
}

PrimalSimplex::Outcome PrimalSimplex::iterate(bool phase1) {
    const double ftol = cfg_.feasibility_tol;
    const long stall_limit = std::max<long>(500, m_);
    std::vector<double> alpha(static_cast<std::size_t>(m_));
    std::vector<double> rho(static_cast<std::size_t>(m_));

    double obj = 0.0;
    // Fresh factors, primal values and duals. A repaired basis can land outside the
    // bounds, in which case the caller starts over.
    const auto refresh = [&]() {
        const long before = stats_.refactorizations;
        if (!refactor()) {
            return false;
        }
        compute_primal();
        compute_duals();
        reset_moves();
        obj = phase_objective();
        const bool repaired = stats_.refactorizations > before + 1;
        return !repaired || max_basic_infeasibility() <= ftol;
    };

    if (!refresh()) {
        return Outcome::Restart;
    }
    std::fill(weight_.begin(), weight_.end(), 1.0);
    double best_obj = obj;
    long since_improvement = 0;
    bool bland = false;
    int since_refactor = 0;

    while (true) {
        if (stats_.iterations >= cfg_.max_iters) {
            return Outcome::IterLimit;
        }
        if (since_refactor >= cfg_.refactor_interval) {
            if (!refresh()) {
                return Outcome::Restart;
            }
            since_refactor = 0;
        }

        int q = choose_entering(bland);
        if (q < 0) {
            // Confirm with fresh factors before declaring optimality.
            if (since_refactor > 0) {
                if (!refresh()) {
                    return Outcome::Restart;
                }
                since_refactor = 0;
                q = choose_entering(bland);
            }
            if (q < 0) {
                return Outcome::Optimal;
            }
        }

        const double dq = d_[q];
        const double dir = state_[q] == VarState::AtUpper || (state_[q] == VarState::Free && dq > 0)
                               ? -1.0
                               : 1.0;

        std::fill(alpha.begin(), alpha.end(), 0.0);
        for (int p = cstart_[q]; p < cstart_[q + 1]; ++p) {
            alpha[cidx_[p]] = cval_[p];
        }
        factor_.ftran(alpha);

        // Harris two-pass ratio test on basic variables x_B(theta) = x_B - theta * dir * alpha.
        const double flip = ub_[q] - lb_[q];
        double theta_max = kInf;
        for (int k = 0; k < m_; ++k) {
            const double a = alpha[k];
            if (std::abs(a) <= kPivotTol) {
                continue;
            }
            const auto j = static_cast<std::size_t>(head_[k]);
            const double rate = -dir * a;
            double t = kInf;
            if (rate < 0.0 && std::isfinite(lb_[j])) {
                t = (x_[j] - lb_[j] + (bland ? 0.0 : ftol)) / -rate;
            } else if (rate > 0.0 && std::isfinite(ub_[j])) {
                t = (ub_[j] - x_[j] + (bland ? 0.0 : ftol)) / rate;
            }
            theta_max = std::min(theta_max, t);
        }

        int leave = -1;
        double leave_ratio = kInf;
        if (std::isfinite(theta_max)) {
            double best_pivot = 0.0;
            for (int k = 0; k < m_; ++k) {
                const double a = alpha[k];
                if (std::abs(a) <= kPivotTol) {
                    continue;
                }
                const auto j = static_cast<std::size_t>(head_[k]);
                const double rate = -dir * a;
                double t = kInf;
                if (rate < 0.0 && std::isfinite(lb_[j])) {
                    t = (x_[j] - lb_[j]) / -rate;
                } else if (rate > 0.0 && std::isfinite(ub_[j])) {
                    t = (ub_[j] - x_[j]) / rate;
                }
                if (t > theta_max) {
                    continue;
                }
                bool take = false;
                if (bland) {
                    take = leave < 0 || t < leave_ratio - kZeroTol
                           || (t <= leave_ratio + kZeroTol && head_[k] < head_[leave]);
                } else {
                    take = std::abs(a) > best_pivot;
                }
                if (take) {
                    leave = k;
                    leave_ratio = t;
                    best_pivot = std::abs(a);
                }
            }
        }

        if (leave < 0 && !std::isfinite(flip)) {
            if (phase_ == Phase::Infeasibility) {
                // Cannot happen with a bounded phase-one objective; recover by refactoring.
                return Outcome::Restart;
            }
            stats_.unbounded_ray = q < n_ ? model_.var_name(static_cast<std::size_t>(q))
                                          : "logical of row " + model_.row_name(static_cast<std::size_t>(q - n_));
            return Outcome::Unbounded;
        }

        ++stats_.iterations;
        if (phase1) {
            ++stats_.phase1_iterations;
        }
        if (bland) {
            ++stats_.bland_iterations;
        }

        const bool bound_flip = leave < 0 || flip <= std::max(leave_ratio, 0.0);
        const double theta = bound_flip ? flip : std::max(leave_ratio, 0.0);

        // Primal update.
        if (theta != 0.0) {
            for (int k = 0; k < m_; ++k) {
                const double a = alpha[k];
                if (a != 0.0) {
                    x_[static_cast<std::size_t>(head_[k])] -= theta * dir * a;
                }
            }
        }
        x_[q] += dir * theta;

        if (bound_flip) {
            state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
            x_[q] = dir > 0 ? ub_[q] : lb_[q];
            set_move(q);
        } else {
            const int out = head_[leave];
            const double rate = -dir * alpha[leave];
            const bool to_lower = rate < 0.0;

            // Pivot row with the current basis, for reduced cost and weight updates.
            std::fill(rho.begin(), rho.end(), 0.0);
            rho[leave] = 1.0;
            factor_.btran(rho);
            pivot_row(rho);
            const double arq = alpha[leave];
            const double theta_d = dq / arq;
            for (int j : alpha_row_touched_) {
                d_[j] -= theta_d * alpha_row_[j];
            }
            const double wq = weight_[q];
            double wmax = 0.0;
            for (int j : alpha_row_touched_) {
                const double ratio = alpha_row_[j] / arq;
                weight_[j] = std::max(weight_[j], ratio * ratio * wq);
                wmax = std::max(wmax, weight_[j]);
            }
            d_[q] = 0.0;
            d_[out] = -theta_d;
            weight_[out] = std::max(wq / (arq * arq), 1.0);

            x_[out] = to_lower ? lb_[out] : ub_[out];
            state_[out] = to_lower ? VarState::AtLower : VarState::AtUpper;
            if (phase1 && out >= n_ + m_) {
                ub_[out] = 0.0; // artificials never re-enter
                x_[out] = 0.0;
                state_[out] = VarState::AtLower;
            }
            state_[q] = VarState::Basic;
            set_move(out);
            set_move(q);
            pos_[out] = -1;
            pos_[q] = leave;
            head_[leave] = q;

            factor_.update(leave, alpha);
            ++since_refactor;

            if (std::max(wmax, weight_[out]) > kDevexReset) {
                std::fill(weight_.begin(), weight_.end(), 1.0);
            }
        }

        obj += dq * dir * theta;
        if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
            best_obj = obj;
            since_improvement = 0;
            bland = false;
        } else if (++since_improvement > stall_limit && !bland) {
            bland = true;
            since_improvement = 0;
        }
    }
}

SolveResult PrimalSimplex::run() {
    const auto t0 = std::chrono::steady_clock::now();
    m_ = static_cast<int>(model_.num_rows());
    n_ = static_cast<int>(model_.num_vars());
    scale();
    build_columns();
    init_basis();

    SolveResult result;
    auto finish = [&](SolveStatus status) {
        stats_.status = status;
        result.x.assign(static_cast<std::size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j) {
            // Basic values may sit a hair outside their bounds; report them snapped.
            result.x[j] = std::clamp(x_[j] * col_scale_[j], model_.lower(j), model_.upper(j)) + 0.0;
        }
        stats_.objective = model_.objective(result.x);
        stats_.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.stats = stats_;
        return result;
    };

    int restarts = 0;
    auto reset_to_slack_basis = [&]() {
        // Numerical recovery: rebuild from the all-logical start.
        ++restarts;
        build_columns();
        init_basis();
    };

    // Phase one, first with the true costs folded in so the search heads toward a good
    // vertex, then on infeasibility alone if artificials are left over.
    const auto artificial_sum = [&]() {
        double s = 0.0;
        for (int j = n_ + m_; j < total_; ++j) {
            s += x_[j];
        }
        return s;
    };
    auto phase = Phase::Composite;
    while (true) {
        set_phase_costs(phase);
        const auto out = iterate(true);
        if (out == Outcome::IterLimit) {
            return finish(SolveStatus::IterLimit);
        }
        if (out == Outcome::Unbounded) {
            // The true costs decrease along a ray; settle feasibility alone first and
            // let phase two decide.
            stats_.unbounded_ray.clear();
            phase = Phase::Infeasibility;
            continue;
        }
        if (out == Outcome::Restart) {
            if (restarts >= 2) {
                return finish(SolveStatus::IterLimit);
            }
            reset_to_slack_basis();
            continue;
        }
        if (phase == Phase::Composite && artificial_sum() > cfg_.feasibility_tol) {
            phase = Phase::Infeasibility;
            continue;
        }
        break;
    }

    // Infeasibility is judged in the model's own units.
    double worst = 0.0;
    int worst_row = -1;
    for (int j = n_ + m_; j < total_; ++j) {
        const int i = art_row_[static_cast<std::size_t>(j - n_ - m_)];
        const double v = x_[j] / row_scale_[static_cast<std::size_t>(i)];
        if (v > worst) {
            worst = v;
            worst_row = i;
        }
    }
    if (worst > cfg_.feasibility_tol) {
        stats_.infeasible_family = to_string(model_.row_info(static_cast<std::size_t>(worst_row)).family);
        return finish(SolveStatus::Infeasible);
    }
    for (int j = n_ + m_; j < total_; ++j) {
        ub_[j] = 0.0;
    }

    // Phase two.
    while (true) {
        set_phase_costs(Phase::Optimality);
        const auto out = iterate(false);
        if (out == Outcome::IterLimit) {
            return finish(SolveStatus::IterLimit);
        }
        if (out == Outcome::Unbounded) {
            return finish(SolveStatus::Unbounded);
        }
        if (out == Outcome::Restart) {
            // TODO: basis repair (swap dependent columns for logicals) would avoid the restart.
            if (restarts >= 2) {
                return finish(SolveStatus::IterLimit);
            }
            reset_to_slack_basis();
            set_phase_costs(Phase::Infeasibility);
            if (iterate(true) != Outcome::Optimal) {
                return finish(SolveStatus::IterLimit);
            }
            for (int j = n_ + m_; j < total_; ++j) {
                ub_[j] = 0.0;
            }
            continue;
        }
        break;
    }

    // Duals and Lagrangian bound in model units.
    result.duals.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
        result.duals[i] = y_[i] * row_scale_[i];
    }
    auto solved = finish(SolveStatus::Optimal);
    const auto& y = solved.duals;
    double bound = 0.0;
    double max_dinf = 0.0;
    for (int i = 0; i < m_; ++i) {
        bound += model_.rhs(static_cast<std::size_t>(i)) * y[i];
    }
    auto add_box_term = [&](double dj, double lo, double hi) {
        // min over [lo, hi] of dj * x; a wrong-signed dj against an infinite bound is a
        // dual infeasibility, recorded and dropped.
        if (dj > 0.0) {
            if (std::isfinite(lo)) {
                bound += dj * lo;
            } else {
                max_dinf = std::max(max_dinf, dj);
            }
        } else if (dj < 0.0) {
            if (std::isfinite(hi)) {
                bound += dj * hi;
            } else {
                max_dinf = std::max(max_dinf, -dj);
            }
        }
    };
    std::vector<double> aty(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const auto r = model_.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < r.cols.size(); ++k) {
            aty[static_cast<std::size_t>(r.cols[k])] += r.vals[k] * y[i];
        }
    }
    for (int j = 0; j < n_; ++j) {
        add_box_term(model_.cost(j) - aty[j], model_.lower(j), model_.upper(j));
    }
    for (int i = 0; i < m_; ++i) {
        // Logical s_i with A x + s = b has reduced cost -y_i.
        double lo = 0.0;
        double hi = 0.0;
        switch (model_.sense(static_cast<std::size_t>(i))) {
        case RowSense::LessEqual:
            hi = kInf;
            break;
        case RowSense::GreaterEqual:
            lo = -kInf;
            break;
        case RowSense::Equal:
            break;
        }
        add_box_term(-y[i], lo, hi);
    }
    solved.stats.dual_bound = bound;
    solved.stats.max_dual_infeasibility = max_dinf;
    return solved;
}

} // namespace

SolveResult solve(const LpModel& model, const SolverConfig& cfg) {
    cfg.validate();
    PrimalSimplex simplex(model, cfg);
    return simplex.run();
}

VerifyReport verify(const LpModel& model, std::span<const double> x, double tol) {
    VerifyReport rep;
    rep.tol = tol;
    rep.residuals = residuals(model, x);

    // Peak rows: positive charging-power terms and a single -1 on the peak variable.
    std::map<int, std::pair<std::size_t, double>> max_load; // loc -> (peak col, load)
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        const auto& info = model.row_info(i);
        if (info.family != RowFamily::PeakPower) {
            continue;
        }
        const auto r = model.row(i);
        double load = 0.0;
        std::optional<std::size_t> peak;
        for (std::size_t k = 0; k < r.cols.size(); ++k) {
            const auto j = static_cast<std::size_t>(r.cols[k]);
            if (r.vals[k] < 0.0) {
                peak = j;
            } else {
                load += r.vals[k] * x[j];
            }
        }
        if (!peak) {
            continue;
        }
        auto [it, inserted] = max_load.try_emplace(info.loc, *peak, load);
        if (!inserted) {
            it->second.second = std::max(it->second.second, load);
        }
    }
    for (const auto& [loc, entry] : max_load) {
        const auto [col, load] = entry;
        if (!(model.cost(col) > 0.0)) {
            continue;
        }
        rep.tightness_checked = true;
        if (load <= tol) {
            continue;
        }
        if (x[col] - load > tol) {
            rep.slack_peaks.push_back({loc, x[col], load});
        }
    }
    return rep;
}

} // namespace eamod
