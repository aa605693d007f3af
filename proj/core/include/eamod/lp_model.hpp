#ifndef EAMOD_LP_MODEL_HPP
#define EAMOD_LP_MODEL_HPP

#include "eamod/demand.hpp"
#include "eamod/netgraph.hpp"
#include "eamod/tariff.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace eamod {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

/// Constraint families of the siting LP.
enum class RowFamily {
    FleetSize,       // outflow at the first step equals the fleet size
    Demand,          // every request is served exactly
    Conservation,    // inflow equals outflow at interior time steps
    Periodicity,     // terminal state equals initial state per (location, charge)
    PeakPower,       // per-step grid charging power bounded by the location's peak
    StationCapacity, // nested plug capacity over rate classes
    Other,
};
inline constexpr std::size_t kRowFamilyCount = 7;

const char* to_string(RowFamily family);

/// Where a row came from; fields that do not apply are -1.
struct RowInfo {
    RowFamily family = RowFamily::Other;
    int loc = -1;
    int t = -1;
    int index = -1; // request index for Demand, charge level for Periodicity, class for StationCapacity
};

struct RowView {
    std::span<const int> cols;
    std::span<const double> vals;
};

/// Sparse LP: minimize c'x subject to row constraints and lb <= x <= ub.
class LpModel {
public:
    std::string name = "model";

    int add_variable(std::string var_name, double cost, double lb = 0.0, double ub = kInf);
    /// Duplicate column indices are summed; exact zeros are dropped.
    int add_row(std::string row_name, RowSense sense, double rhs, std::span<const int> cols,
                std::span<const double> vals, RowInfo info = {});

    [[nodiscard]] std::size_t num_vars() const { return cost_.size(); }
    [[nodiscard]] std::size_t num_rows() const { return rhs_.size(); }
    [[nodiscard]] std::size_t num_nonzeros() const { return col_idx_.size(); }

    [[nodiscard]] const std::string& var_name(std::size_t j) const { return var_names_[j]; }
    [[nodiscard]] double cost(std::size_t j) const { return cost_[j]; }
    [[nodiscard]] double lower(std::size_t j) const { return lb_[j]; }
    [[nodiscard]] double upper(std::size_t j) const { return ub_[j]; }
    [[nodiscard]] const std::vector<double>& costs() const { return cost_; }
    [[nodiscard]] const std::vector<double>& lowers() const { return lb_; }
    [[nodiscard]] const std::vector<double>& uppers() const { return ub_; }

    [[nodiscard]] const std::string& row_name(std::size_t i) const { return row_names_[i]; }
    [[nodiscard]] RowSense sense(std::size_t i) const { return sense_[i]; }
    [[nodiscard]] double rhs(std::size_t i) const { return rhs_[i]; }
    [[nodiscard]] const RowInfo& row_info(std::size_t i) const { return info_[i]; }
    [[nodiscard]] RowView row(std::size_t i) const;

    [[nodiscard]] std::optional<std::size_t> find_var(const std::string& var_name) const;
    [[nodiscard]] std::optional<std::size_t> find_row(const std::string& row_name) const;

    [[nodiscard]] double objective(std::span<const double> x) const;
    [[nodiscard]] double row_activity(std::size_t i, std::span<const double> x) const;

private:
    std::vector<std::string> var_names_;
    std::vector<double> cost_;
    std::vector<double> lb_;
    std::vector<double> ub_;
    std::unordered_map<std::string, std::size_t> var_index_;

    std::vector<std::string> row_names_;
    std::vector<RowSense> sense_;
    std::vector<double> rhs_;
    std::vector<RowInfo> info_;
    std::vector<std::size_t> row_start_{0};
    std::vector<int> col_idx_;
    std::vector<double> vals_;
    std::unordered_map<std::string, std::size_t> row_index_;
};

/// Column layout: flows (one per expanded arc), plugs per (location, rate), peak power per
/// location, then the fleet size.
struct VariableSpace {
    std::size_t n_flows = 0;
    std::size_t n_locations = 0;
    std::size_t n_rates = 0;

    [[nodiscard]] std::size_t flow(ArcId a) const { return a; }
    [[nodiscard]] std::size_t plug(int loc, std::size_t rate) const {
        return n_flows + static_cast<std::size_t>(loc) * n_rates + rate;
    }
    [[nodiscard]] std::size_t peak(int loc) const {
        return n_flows + n_locations * n_rates + static_cast<std::size_t>(loc);
    }
    [[nodiscard]] std::size_t fleet() const { return n_flows + n_locations * n_rates + n_locations; }
    [[nodiscard]] std::size_t size() const { return fleet() + 1; }
};

/// Node-arc incidence split into in-arcs and out-arcs per expanded node.
class IncidenceView {
public:
    explicit IncidenceView(const ExpandedGraph& g);

    [[nodiscard]] std::span<const ArcId> in_arcs(NodeId v) const {
        return {in_ids_.data() + in_start_[v], in_start_[v + 1] - in_start_[v]};
    }
    [[nodiscard]] std::span<const ArcId> out_arcs(NodeId v) const {
        return {out_ids_.data() + out_start_[v], out_start_[v + 1] - out_start_[v]};
    }
    [[nodiscard]] std::size_t node_count() const { return in_start_.size() - 1; }

private:
    std::vector<std::size_t> in_start_;
    std::vector<ArcId> in_ids_;
    std::vector<std::size_t> out_start_;
    std::vector<ArcId> out_ids_;
};

/// Joint mode optimizes plug counts; baseline mode fixes them to `fixed_plugs[loc][rate]`.
struct AssemblyMode {
    enum class Kind { Joint, Baseline };
    Kind kind = Kind::Joint;
    std::vector<std::vector<double>> fixed_plugs;

    static AssemblyMode joint() { return {}; }
    static AssemblyMode baseline(std::vector<std::vector<double>> plugs) {
        return {Kind::Baseline, std::move(plugs)};
    }
};

struct AssembledLp {
    LpModel model;
    VariableSpace vars;
};

/// Builds the joint routing, charging and siting LP. Throws InfeasibleRequest when a
/// request has no serving arc, InvalidInput on inconsistent tariff or plug data.
AssembledLp assemble(const ExpandedGraph& g, const DemandTable& demand, const TariffSet& tariff,
                     const AssemblyMode& mode = AssemblyMode::joint());

/// Violation of each row: |Ax - b| for equalities, the positive part otherwise.
std::vector<double> row_residuals(const LpModel& model, std::span<const double> x);

struct ResidualReport {
    std::array<double, kRowFamilyCount> by_family{};
    double bounds = 0.0;

    [[nodiscard]] double family(RowFamily f) const { return by_family[static_cast<std::size_t>(f)]; }
    [[nodiscard]] double max() const;
};

ResidualReport residuals(const LpModel& model, std::span<const double> x);

} // namespace eamod

#endif
