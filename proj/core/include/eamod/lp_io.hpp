#ifndef EAMOD_LP_IO_HPP
#define EAMOD_LP_IO_HPP

#include "eamod/lp_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace eamod {

/// CPLEX-style LP text. Numbers are written in shortest round-trip form.
void write_lp(const LpModel& model, std::ostream& out);
void export_lp(const LpModel& model, const std::filesystem::path& path);

/// Free-format MPS.
void write_mps(const LpModel& model, std::ostream& out);
void export_mps(const LpModel& model, const std::filesystem::path& path);

/// One `name value` pair per line; '#' starts a comment line.
void write_solution(const LpModel& model, std::span<const double> x, std::ostream& out);

/// Reads a `name value` solution file. Variables that are not listed are zero.
/// Throws NameMismatch for names the model does not know, InvalidInput for bad lines.
std::vector<double> read_solution(const LpModel& model, std::istream& in);
std::vector<double> import_solution(const LpModel& model, const std::filesystem::path& path);

} // namespace eamod

#endif
