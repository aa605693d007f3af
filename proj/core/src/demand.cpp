#include "eamod/demand.hpp"

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

namespace eamod {

namespace {

void check_pair(const RoadGraph& road, long o, long d) {
    const auto n = static_cast<long>(road.location_count());
    if (o < 0 || o >= n) {
        throw UnknownLocation(o);
    }
    if (d < 0 || d >= n) {
        throw UnknownLocation(d);
    }
    if (!road.find_arc(static_cast<int>(o), static_cast<int>(d))) {
        throw MissingRoute(static_cast<int>(o), static_cast<int>(d));
    }
}

// Accepts "7", "07" or "07:00".
long parse_hour(const std::string& s, const csv::Table& table, std::size_t row) {
    const auto colon = s.find(':');
    const std::string head = colon == std::string::npos ? s : s.substr(0, colon);
    std::size_t used = 0;
    long h = -1;
    try {
        h = std::stol(head, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    const bool minutes_ok = colon == std::string::npos || s.substr(colon + 1) == "00";
    if (used != head.size() || head.empty() || !minutes_ok || h < 0 || h > 23) {
        throw InvalidInput(table.source() + ":" + std::to_string(table.line(row)) + ": bad hour '"
                           + s + "'");
    }
    return h;
}

int steps_per_hour(const Discretization& disc) {
    const double sph = 60.0 / disc.dt_min;
    const double rounded = std::round(sph);
    if (rounded < 1.0 || std::abs(sph - rounded) > 1e-9) {
        throw NonIntegralStepsPerHour(disc.dt_min);
    }
    return static_cast<int>(rounded);
}

} // namespace

DemandTable make_demand_table(std::vector<Request> requests, const RoadGraph& road,
                              const Discretization& disc) {
    std::map<std::tuple<int, int, int>, double> merged;
    for (const auto& r : requests) {
        check_pair(road, r.origin, r.dest);
        if (r.depart_t < 1 || r.depart_t > disc.n_t) {
            throw InvalidInput("request step " + std::to_string(r.depart_t) + " outside 1.."
                               + std::to_string(disc.n_t));
        }
        if (!(r.volume >= 0.0) || !std::isfinite(r.volume)) {
            throw InvalidInput("request volume must be finite and nonnegative");
        }
        merged[{r.depart_t, r.origin, r.dest}] += r.volume;
    }
    DemandTable table;
    for (const auto& [key, volume] : merged) {
        if (volume == 0.0) {
            continue;
        }
        const auto [t, o, d] = key;
        table.requests.push_back({o, d, t, volume});
        table.total_volume += volume;
    }
    return table;
}

DemandTable load_hourly_demand(std::istream& in, const RoadGraph& road,
                               const Discretization& disc) {
    const int sph = steps_per_hour(disc);
    const auto table = csv::Table::read(in, "demand");
    table.require({"origin", "dest", "hour", "volume"});

    // Same (o, d, hour) rows are summed before expansion.
    std::map<std::tuple<long, long, long>, double> hourly;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto o = table.integer(r, "origin");
        const auto d = table.integer(r, "dest");
        check_pair(road, o, d);
        const auto h = parse_hour(table.cell(r, "hour"), table, r);
        const auto v = table.number(r, "volume");
        if (!(v >= 0.0)) {
            throw InvalidInput(table.source() + ":" + std::to_string(table.line(r))
                               + ": negative volume");
        }
        hourly[{o, d, h}] += v;
    }

    std::vector<Request> requests;
    for (const auto& [key, volume] : hourly) {
        if (volume == 0.0) {
            continue;
        }
        const auto [o, d, h] = key;
        const double share = volume / sph;
        for (int k = 0; k < sph; ++k) {
            const long t = h * sph + k + 1;
            if (t > disc.n_t) {
                throw InvalidInput("demand hour " + std::to_string(h)
                                   + " falls outside the horizon");
            }
            requests.push_back({static_cast<int>(o), static_cast<int>(d), static_cast<int>(t),
                                share});
        }
    }
    return make_demand_table(std::move(requests), road, disc);
}

DemandTable load_hourly_demand_file(const std::filesystem::path& path, const RoadGraph& road,
                                    const Discretization& disc) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return load_hourly_demand(in, road, disc);
}

DemandTable load_step_demand(std::istream& in, const RoadGraph& road,
                             const Discretization& disc) {
    const auto table = csv::Table::read(in, "demand");
    table.require({"origin", "dest", "step", "volume"});
    std::vector<Request> requests;
    requests.reserve(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto o = table.integer(r, "origin");
        const auto d = table.integer(r, "dest");
        check_pair(road, o, d);
        requests.push_back({static_cast<int>(o), static_cast<int>(d),
                            static_cast<int>(table.integer(r, "step")), table.number(r, "volume")});
    }
    return make_demand_table(std::move(requests), road, disc);
}

DemandTable load_step_demand_file(const std::filesystem::path& path, const RoadGraph& road,
                                  const Discretization& disc) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return load_step_demand(in, road, disc);
}

std::vector<ArcId> request_arcs(const ExpandedGraph& g, const Request& m) {
    const auto road_arc = g.road().find_arc(m.origin, m.dest);
    if (!road_arc) {
        throw NoFeasibleArc(m.origin, m.dest, m.depart_t);
    }
    const auto ids = g.travel_arcs(*road_arc, m.depart_t);
    if (ids.empty()) {
        throw NoFeasibleArc(m.origin, m.dest, m.depart_t);
    }
    return {ids.begin(), ids.end()};
}

} // namespace eamod
