#ifndef EAMOD_TARIFF_HPP
#define EAMOD_TARIFF_HPP

#include "eamod/netgraph.hpp"

#include <map>
#include <vector>

namespace eamod {

inline constexpr double kDaysPerYear = 365.25;
inline constexpr double kMonthsPerYear = 12.0;

/// Energy price in USD/kWh for each time step.
struct TouSchedule {
    std::vector<double> price_per_step;

    /// t is 1-based.
    [[nodiscard]] double price(int t) const { return price_per_step.at(static_cast<std::size_t>(t - 1)); }
};

struct TariffSet {
    TouSchedule tou;
    double demand_charge_usd_per_kw = 0.0;
    double maintenance_usd_per_km = 0.0;
    double fleet_usd_per_vehicle_horizon = 0.0;
    std::vector<double> station_usd_per_plug_horizon; // one per catalog rate

    void validate(const Discretization& disc, const ChargerCatalog& catalog) const;
};

/// A clock-time price window; [start_hour, end_hour) wraps past midnight when
/// end_hour <= start_hour.
struct TouWindow {
    double start_hour = 0.0;
    double end_hour = 0.0;
    double price = 0.0;
};

/// Monthly demand charge quoted per block of kW, expressed per kW over the horizon.
double rescale_monthly_demand_charge(double usd_per_block, double block_kw, double horizon_days);

/// Annual depreciation plus fixed annual cost, prorated to the horizon.
double fleet_price_per_horizon(double sale_usd, double depreciation_per_year,
                               double fixed_annual_usd, double horizon_days);

/// Configured per-plug horizon prices keyed by rate.
std::map<double, double> station_prices_from_config(const ChargerCatalog& catalog);

/// Undiscounted capital cost spread evenly over the station lifetime. Not the
/// equivalent annual cost behind the bundled reference prices.
double straight_line_station_price(double capital_usd, double lifetime_years, double horizon_days);

/// Step t takes the price of the last window containing its start time, else
/// `default_price`. Step 1 starts at midnight.
TouSchedule build_tou(const std::vector<TouWindow>& windows, double default_price,
                      const Discretization& disc);

} // namespace eamod

#endif
