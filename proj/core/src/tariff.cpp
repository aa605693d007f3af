#include "eamod/tariff.hpp"

#include "eamod/errors.hpp"

#include <cmath>

namespace eamod {

void TariffSet::validate(const Discretization& disc, const ChargerCatalog& catalog) const {
    if (tou.price_per_step.size() != static_cast<std::size_t>(disc.n_t)) {
        throw InvalidInput("TOU schedule length " + std::to_string(tou.price_per_step.size())
                           + " does not match n_t = " + std::to_string(disc.n_t));
    }
    for (double p : tou.price_per_step) {
        if (!(p >= 0.0)) {
            throw InvalidInput("TOU prices must be nonnegative");
        }
    }
    if (!(demand_charge_usd_per_kw >= 0.0) || !(maintenance_usd_per_km >= 0.0)
        || !(fleet_usd_per_vehicle_horizon >= 0.0)) {
        throw InvalidInput("tariff prices must be nonnegative");
    }
    if (station_usd_per_plug_horizon.size() != catalog.size()) {
        throw InvalidInput("tariff needs one station price per charger rate");
    }
    for (double p : station_usd_per_plug_horizon) {
        if (!(p >= 0.0)) {
            throw InvalidInput("station prices must be nonnegative");
        }
    }
}

double rescale_monthly_demand_charge(double usd_per_block, double block_kw, double horizon_days) {
    return usd_per_block / block_kw * kMonthsPerYear / kDaysPerYear * horizon_days;
}

double fleet_price_per_horizon(double sale_usd, double depreciation_per_year,
                               double fixed_annual_usd, double horizon_days) {
    return (depreciation_per_year * sale_usd + fixed_annual_usd) * horizon_days / kDaysPerYear;
}

std::map<double, double> station_prices_from_config(const ChargerCatalog& catalog) {
    catalog.validate();
    std::map<double, double> prices;
    for (std::size_t r = 0; r < catalog.size(); ++r) {
        prices.emplace(catalog.rates_kw[r], catalog.cost_per_plug_horizon_usd[r]);
    }
    return prices;
}

double straight_line_station_price(double capital_usd, double lifetime_years, double horizon_days) {
    return capital_usd / (lifetime_years * kDaysPerYear) * horizon_days;
}

TouSchedule build_tou(const std::vector<TouWindow>& windows, double default_price,
                      const Discretization& disc) {
    TouSchedule tou;
    tou.price_per_step.assign(static_cast<std::size_t>(disc.n_t), default_price);
    for (int t = 1; t <= disc.n_t; ++t) {
        const double hour = std::fmod((t - 1) * disc.dt_min / 60.0, 24.0);
        for (const auto& w : windows) {
            const bool inside = w.start_hour < w.end_hour
                                    ? hour >= w.start_hour && hour < w.end_hour
                                    : hour >= w.start_hour || hour < w.end_hour;
            if (inside) {
                tou.price_per_step[static_cast<std::size_t>(t - 1)] = w.price;
            }
        }
    }
    return tou;
}

} // namespace eamod
