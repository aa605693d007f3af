#ifndef EAMOD_DEMAND_HPP
#define EAMOD_DEMAND_HPP

#include "eamod/netgraph.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace eamod {

/// Travel request m = (origin, dest, departure step, volume in vehicles).
struct Request {
    int origin = 0;
    int dest = 0;
    int depart_t = 1;
    double volume = 0.0;
};

struct DemandTable {
    std::vector<Request> requests;
    double total_volume = 0.0;
};

/// Builds a table from explicit requests: rows for the same (origin, dest, step) are
/// summed, zero volumes dropped, and the result sorted by (step, origin, dest).
/// Throws UnknownLocation, MissingRoute or InvalidInput.
DemandTable make_demand_table(std::vector<Request> requests, const RoadGraph& road,
                              const Discretization& disc);

/// Reads `origin,dest,hour,volume` (hour as 0-23 or HH:MM) and spreads each hourly
/// volume uniformly over the steps of that hour.
/// Throws NonIntegralStepsPerHour, UnknownLocation, MissingRoute, InvalidInput.
DemandTable load_hourly_demand(std::istream& csv, const RoadGraph& road,
                               const Discretization& disc);
DemandTable load_hourly_demand_file(const std::filesystem::path& path, const RoadGraph& road,
                                    const Discretization& disc);

/// Reads `origin,dest,step,volume` with 1-based steps.
DemandTable load_step_demand(std::istream& csv, const RoadGraph& road,
                             const Discretization& disc);
DemandTable load_step_demand_file(const std::filesystem::path& path, const RoadGraph& road,
                                  const Discretization& disc);

/// Non-idle travel arcs that fulfil the request, across all charge levels.
/// Throws NoFeasibleArc when the set is empty.
std::vector<ArcId> request_arcs(const ExpandedGraph& g, const Request& m);

} // namespace eamod

#endif
