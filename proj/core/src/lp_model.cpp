#include "eamod/lp_model.hpp"

#include "eamod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace eamod {

const char* to_string(RowFamily family) {
    switch (family) {
    case RowFamily::FleetSize:
        return "fleet_size";
    case RowFamily::Demand:
        return "demand";
    case RowFamily::Conservation:
        return "conservation";
    case RowFamily::Periodicity:
        return "periodicity";
    case RowFamily::PeakPower:
        return "peak_power";
    case RowFamily::StationCapacity:
        return "station_capacity";
    case RowFamily::Other:
        return "other";
    }
    return "?";
}

int LpModel::add_variable(std::string var_name, double cost, double lb, double ub) {
    if (!(lb <= ub)) {
        throw InvalidInput("variable '" + var_name + "' has lb > ub");
    }
    const auto j = cost_.size();
    if (!var_index_.emplace(var_name, j).second) {
        throw InvalidInput("duplicate variable name '" + var_name + "'");
    }
    var_names_.push_back(std::move(var_name));
    cost_.push_back(cost);
    lb_.push_back(lb);
    ub_.push_back(ub);
    return static_cast<int>(j);
}

int LpModel::add_row(std::string row_name, RowSense sense, double rhs, std::span<const int> cols,
                     std::span<const double> vals, RowInfo info) {
    if (cols.size() != vals.size()) {
        throw InvalidInput("row '" + row_name + "': column and value counts differ");
    }
    const auto i = rhs_.size();
    if (row_index_.contains(row_name)) {
        throw InvalidInput("duplicate row name '" + row_name + "'");
    }
    std::vector<std::pair<int, double>> entries;
    entries.reserve(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] < 0 || static_cast<std::size_t>(cols[k]) >= cost_.size()) {
            throw InvalidInput("row '" + row_name + "' references unknown column");
        }
        entries.emplace_back(cols[k], vals[k]);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < entries.size();) {
        double v = 0.0;
        const int c = entries[k].first;
        for (; k < entries.size() && entries[k].first == c; ++k) {
            v += entries[k].second;
        }
        if (v != 0.0) {
            col_idx_.push_back(c);
            vals_.push_back(v);
        }
    }
    row_start_.push_back(col_idx_.size());
    row_index_.emplace(row_name, i);
    row_names_.push_back(std::move(row_name));
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    info_.push_back(info);
    return static_cast<int>(i);
}

RowView LpModel::row(std::size_t i) const {
    const auto b = row_start_[i];
    const auto n = row_start_[i + 1] - b;
    return {{col_idx_.data() + b, n}, {vals_.data() + b, n}};
}

std::optional<std::size_t> LpModel::find_var(const std::string& var_name) const {
    const auto it = var_index_.find(var_name);
    if (it == var_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::size_t> LpModel::find_row(const std::string& row_name) const {
    const auto it = row_index_.find(row_name);
    if (it == row_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double LpModel::objective(std::span<const double> x) const {
    double z = 0.0;
    for (std::size_t j = 0; j < cost_.size(); ++j) {
        z += cost_[j] * x[j];
    }
    return z;
}

double LpModel::row_activity(std::size_t i, std::span<const double> x) const {
    const auto r = row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
        s += r.vals[k] * x[static_cast<std::size_t>(r.cols[k])];
    }
    return s;
}

IncidenceView::IncidenceView(const ExpandedGraph& g) {
    const auto n = g.node_count();
    in_start_.assign(n + 1, 0);
    out_start_.assign(n + 1, 0);
    for (const auto& a : g.arcs()) {
        ++in_start_[g.node_id(a.head) + 1];
        ++out_start_[g.node_id(a.tail) + 1];
    }
    for (std::size_t v = 0; v < n; ++v) {
        in_start_[v + 1] += in_start_[v];
        out_start_[v + 1] += out_start_[v];
    }
    in_ids_.resize(g.arc_count());
    out_ids_.resize(g.arc_count());
    auto in_fill = in_start_;
    auto out_fill = out_start_;
    for (ArcId id = 0; id < g.arc_count(); ++id) {
        const auto& a = g.arc(id);
        in_ids_[in_fill[g.node_id(a.head)]++] = id;
        out_ids_[out_fill[g.node_id(a.tail)]++] = id;
    }
}

namespace {

std::string flow_name(const ExpandedGraph& g, const ExpArc& a) {
    const auto& tl = a.tail;
    const auto node = std::to_string(tl.loc) + "_" + std::to_string(tl.t) + "_" + std::to_string(tl.c);
    switch (a.kind) {
    case ArcKind::Travel:
        return "x_" + node + "_" + std::to_string(g.road().arcs()[a.road_arc].dest);
    case ArcKind::Idle:
        return "i_" + node;
    case ArcKind::Charge:
        return "q_" + node + "_" + std::to_string(a.units);
    }
    return {};
}

// Reusable (column, value) accumulator for one row.
struct RowBuffer {
    std::vector<int> cols;
    std::vector<double> vals;

    void clear() {
        cols.clear();
        vals.clear();
    }
    void add(std::size_t col, double v) {
        cols.push_back(static_cast<int>(col));
        vals.push_back(v);
    }
};

} // namespace

AssembledLp assemble(const ExpandedGraph& g, const DemandTable& demand, const TariffSet& tariff,
                     const AssemblyMode& mode) {
    const auto& disc = g.disc();
    const auto& catalog = g.catalog();
    tariff.validate(disc, catalog);

    const auto n_loc = g.location_count();
    const auto n_rates = catalog.size();
    const bool baseline = mode.kind == AssemblyMode::Kind::Baseline;
    if (baseline) {
        if (mode.fixed_plugs.size() != n_loc) {
            throw InvalidInput("baseline plug table needs one row per location");
        }
        for (const auto& row : mode.fixed_plugs) {
            if (row.size() != n_rates) {
                throw InvalidInput("baseline plug table needs one entry per charger rate");
            }
            for (double s : row) {
                if (!(s >= 0.0) || !std::isfinite(s)) {
                    throw InvalidInput("baseline plug counts must be finite and nonnegative");
                }
            }
        }
    }

    // Resolve every request before building anything so infeasibility surfaces early.
    std::vector<std::vector<ArcId>> served(demand.requests.size());
    for (std::size_t m = 0; m < demand.requests.size(); ++m) {
        try {
            served[m] = request_arcs(g, demand.requests[m]);
        } catch (const NoFeasibleArc& e) {
            throw InfeasibleRequest(m, e);
        }
    }

    AssembledLp out;
    auto& lp = out.model;
    auto& vars = out.vars;
    vars.n_flows = g.arc_count();
    vars.n_locations = n_loc;
    vars.n_rates = n_rates;

    for (ArcId id = 0; id < g.arc_count(); ++id) {
        const auto& a = g.arc(id);
        double c = 0.0;
        if (a.kind == ArcKind::Charge) {
            c = a.grid_energy_kwh * tariff.tou.price(a.tail.t);
        } else if (a.kind == ArcKind::Travel) {
            c = a.distance_km * tariff.maintenance_usd_per_km;
        }
        lp.add_variable(flow_name(g, a), c);
    }
    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        for (std::size_t r = 0; r < n_rates; ++r) {
            const double price = tariff.station_usd_per_plug_horizon[r];
            const auto name = "s_" + std::to_string(loc) + "_r" + std::to_string(r);
            if (baseline) {
                const double s = mode.fixed_plugs[loc][r];
                lp.add_variable(name, price, s, s);
            } else {
                lp.add_variable(name, price);
            }
        }
    }
    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        lp.add_variable("pmax_" + std::to_string(loc), tariff.demand_charge_usd_per_kw);
    }
    lp.add_variable("F", tariff.fleet_usd_per_vehicle_horizon);

    const IncidenceView inc(g);
    RowBuffer buf;
    const int n_t = disc.n_t;
    const int n_c = disc.n_c;

    // Fleet size: everything leaving the first time step.
    buf.clear();
    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        for (int c = 1; c <= n_c; ++c) {
            for (auto a : inc.out_arcs(g.node_id({static_cast<int>(loc), 1, c}))) {
                buf.add(vars.flow(a), 1.0);
            }
        }
    }
    buf.add(vars.fleet(), -1.0);
    lp.add_row("fleet", RowSense::Equal, 0.0, buf.cols, buf.vals, {RowFamily::FleetSize});

    for (std::size_t m = 0; m < demand.requests.size(); ++m) {
        const auto& req = demand.requests[m];
        buf.clear();
        for (auto a : served[m]) {
            buf.add(vars.flow(a), 1.0);
        }
        lp.add_row("dem_" + std::to_string(req.origin) + "_" + std::to_string(req.dest) + "_"
                       + std::to_string(req.depart_t),
                   RowSense::Equal, req.volume, buf.cols, buf.vals,
                   {RowFamily::Demand, req.origin, req.depart_t, static_cast<int>(m)});
    }

    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        const int l = static_cast<int>(loc);
        for (int t = 2; t <= n_t - 1; ++t) {
            for (int c = 1; c <= n_c; ++c) {
                const auto v = g.node_id({l, t, c});
                buf.clear();
                for (auto a : inc.in_arcs(v)) {
                    buf.add(vars.flow(a), 1.0);
                }
                for (auto a : inc.out_arcs(v)) {
                    buf.add(vars.flow(a), -1.0);
                }
                if (buf.cols.empty()) {
                    continue;
                }
                lp.add_row("cons_" + std::to_string(l) + "_" + std::to_string(t) + "_"
                               + std::to_string(c),
                           RowSense::Equal, 0.0, buf.cols, buf.vals,
                           {RowFamily::Conservation, l, t, c});
            }
        }
    }

    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        const int l = static_cast<int>(loc);
        for (int c = 1; c <= n_c; ++c) {
            buf.clear();
            for (auto a : inc.in_arcs(g.node_id({l, n_t, c}))) {
                buf.add(vars.flow(a), 1.0);
            }
            for (auto a : inc.out_arcs(g.node_id({l, 1, c}))) {
                buf.add(vars.flow(a), -1.0);
            }
            if (buf.cols.empty()) {
                continue;
            }
            lp.add_row("per_" + std::to_string(l) + "_" + std::to_string(c), RowSense::Equal, 0.0,
                       buf.cols, buf.vals, {RowFamily::Periodicity, l, -1, c});
        }
    }

    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        const int l = static_cast<int>(loc);
        for (int t = 1; t <= n_t; ++t) {
            const auto charging = g.charge_arcs(l, t);
            if (charging.empty()) {
                continue;
            }
            buf.clear();
            for (auto a : charging) {
                buf.add(vars.flow(a), arc_power_kw(g.arc(a), disc, g.vehicle()).grid_kw);
            }
            buf.add(vars.peak(l), -1.0);
            lp.add_row("peak_" + std::to_string(l) + "_" + std::to_string(t), RowSense::LessEqual,
                       0.0, buf.cols, buf.vals, {RowFamily::PeakPower, l, t});
        }
    }

    for (std::size_t loc = 0; loc < n_loc; ++loc) {
        const int l = static_cast<int>(loc);
        for (int t = 1; t <= n_t; ++t) {
            const auto charging = g.charge_arcs(l, t);
            if (charging.empty()) {
                continue;
            }
            for (std::size_t j = 0; j < n_rates; ++j) {
                buf.clear();
                for (auto a : charging) {
                    if (static_cast<std::size_t>(g.arc(a).rate_class) >= j) {
                        buf.add(vars.flow(a), 1.0);
                    }
                }
                if (buf.cols.empty()) {
                    continue;
                }
                double rhs = 0.0;
                for (std::size_t k = j; k < n_rates; ++k) {
                    if (baseline) {
                        rhs += mode.fixed_plugs[loc][k];
                    } else {
                        buf.add(vars.plug(l, k), -1.0);
                    }
                }
                lp.add_row("stn_" + std::to_string(l) + "_" + std::to_string(t) + "_"
                               + std::to_string(j),
                           RowSense::LessEqual, rhs, buf.cols, buf.vals,
                           {RowFamily::StationCapacity, l, t, static_cast<int>(j)});
            }
        }
    }
    return out;
}

std::vector<double> row_residuals(const LpModel& model, std::span<const double> x) {
    std::vector<double> res(model.num_rows(), 0.0);
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        const double gap = model.row_activity(i, x) - model.rhs(i);
        switch (model.sense(i)) {
        case RowSense::Equal:
            res[i] = std::abs(gap);
            break;
        case RowSense::LessEqual:
            res[i] = std::max(gap, 0.0);
            break;
        case RowSense::GreaterEqual:
            res[i] = std::max(-gap, 0.0);
            break;
        }
    }
    return res;
}

double ResidualReport::max() const {
    double m = bounds;
    for (double v : by_family) {
        m = std::max(m, v);
    }
    return m;
}

ResidualReport residuals(const LpModel& model, std::span<const double> x) {
    ResidualReport rep;
    const auto res = row_residuals(model, x);
    for (std::size_t i = 0; i < res.size(); ++i) {
        auto& slot = rep.by_family[static_cast<std::size_t>(model.row_info(i).family)];
        slot = std::max(slot, res[i]);
    }
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        rep.bounds = std::max({rep.bounds, model.lower(j) - x[j], x[j] - model.upper(j)});
    }
    return rep;
}

} // namespace eamod
