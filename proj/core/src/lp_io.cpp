#include "eamod/lp_io.hpp"

#include "eamod/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace eamod {

namespace {

std::string num(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

const char* lp_sense(RowSense s) {
    switch (s) {
    case RowSense::LessEqual:
        return "<=";
    case RowSense::Equal:
        return "=";
    case RowSense::GreaterEqual:
        return ">=";
    }
    return "=";
}

const char* mps_sense(RowSense s) {
    switch (s) {
    case RowSense::LessEqual:
        return "L";
    case RowSense::Equal:
        return "E";
    case RowSense::GreaterEqual:
        return "G";
    }
    return "E";
}

// Writes " + 2 x - 1 y" terms, breaking lines every few terms.
void write_terms(std::ostream& out, std::span<const int> cols, std::span<const double> vals,
                 const LpModel& model) {
    constexpr std::size_t kTermsPerLine = 6;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k > 0 && k % kTermsPerLine == 0) {
            out << "\n   ";
        }
        const double v = vals[k];
        out << (v < 0 ? " - " : " + ") << num(std::abs(v)) << ' '
            << model.var_name(static_cast<std::size_t>(cols[k]));
    }
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    writer(out);
    out.flush();
    if (!out) {
        throw IoError("error while writing " + path.string());
    }
}

} // namespace

void write_lp(const LpModel& model, std::ostream& out) {
    out << "\\ " << model.name << '\n';
    out << "Minimize\n obj:";
    std::vector<int> cols;
    std::vector<double> vals;
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        if (model.cost(j) != 0.0) {
            cols.push_back(static_cast<int>(j));
            vals.push_back(model.cost(j));
        }
    }
    if (cols.empty() && model.num_vars() > 0) {
        cols.push_back(0);
        vals.push_back(0.0);
    }
    write_terms(out, cols, vals, model);
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        const auto r = model.row(i);
        out << ' ' << model.row_name(i) << ':';
        if (r.cols.empty()) {
            out << " 0 " << model.var_name(0);
        } else {
            write_terms(out, r.cols, r.vals, model);
        }
        out << ' ' << lp_sense(model.sense(i)) << ' ' << num(model.rhs(i)) << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        const double lb = model.lower(j);
        const double ub = model.upper(j);
        const auto& name = model.var_name(j);
        if (lb == 0.0 && std::isinf(ub)) {
            continue;
        }
        if (lb == ub) {
            out << ' ' << name << " = " << num(lb) << '\n';
        } else if (std::isinf(lb) && std::isinf(ub)) {
            out << ' ' << name << " free\n";
        } else {
            out << ' ' << num(lb) << " <= " << name << " <= " << num(ub) << '\n';
        }
    }
    out << "End\n";
}

void export_lp(const LpModel& model, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& out) { write_lp(model, out); });
}

void write_mps(const LpModel& model, std::ostream& out) {
    out << "NAME " << model.name << '\n';
    out << "ROWS\n N obj\n";
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        out << ' ' << mps_sense(model.sense(i)) << ' ' << model.row_name(i) << '\n';
    }

    // Transpose to column-major.
    const auto n = model.num_vars();
    std::vector<std::size_t> start(n + 1, 0);
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        for (int c : model.row(i).cols) {
            ++start[static_cast<std::size_t>(c) + 1];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        start[j + 1] += start[j];
    }
    std::vector<std::size_t> rows(start.back());
    std::vector<double> vals(start.back());
    auto fill = start;
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        const auto r = model.row(i);
        for (std::size_t k = 0; k < r.cols.size(); ++k) {
            const auto pos = fill[static_cast<std::size_t>(r.cols[k])]++;
            rows[pos] = i;
            vals[pos] = r.vals[k];
        }
    }

    out << "COLUMNS\n";
    for (std::size_t j = 0; j < n; ++j) {
        const auto& name = model.var_name(j);
        out << ' ' << name << " obj " << num(model.cost(j)) << '\n';
        for (auto p = start[j]; p < start[j + 1]; ++p) {
            out << ' ' << name << ' ' << model.row_name(rows[p]) << ' ' << num(vals[p]) << '\n';
        }
    }
    out << "RHS\n";
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        if (model.rhs(i) != 0.0) {
            out << " RHS " << model.row_name(i) << ' ' << num(model.rhs(i)) << '\n';
        }
    }
    out << "BOUNDS\n";
    for (std::size_t j = 0; j < n; ++j) {
        const double lb = model.lower(j);
        const double ub = model.upper(j);
        const auto& name = model.var_name(j);
        if (lb == ub) {
            out << " FX BND " << name << ' ' << num(lb) << '\n';
            continue;
        }
        if (std::isinf(lb) && std::isinf(ub)) {
            out << " FR BND " << name << '\n';
            continue;
        }
        if (std::isinf(lb)) {
            out << " MI BND " << name << '\n';
        } else if (lb != 0.0) {
            out << " LO BND " << name << ' ' << num(lb) << '\n';
        }
        if (!std::isinf(ub)) {
            out << " UP BND " << name << ' ' << num(ub) << '\n';
        }
    }
    out << "ENDATA\n";
}

void export_mps(const LpModel& model, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& out) { write_mps(model, out); });
}

void write_solution(const LpModel& model, std::span<const double> x, std::ostream& out) {
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        out << model.var_name(j) << ' ' << num(x[j]) << '\n';
    }
}

std::vector<double> read_solution(const LpModel& model, std::istream& in) {
    std::vector<double> x(model.num_vars(), 0.0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name) || name.front() == '#') {
            continue;
        }
        std::string value;
        if (!(ls >> value)) {
            throw InvalidInput("solution line " + std::to_string(lineno) + ": missing value");
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw InvalidInput("solution line " + std::to_string(lineno) + ": bad value '" + value
                               + "'");
        }
        const auto j = model.find_var(name);
        if (!j) {
            throw NameMismatch(name);
        }
        x[*j] = v;
    }
    return x;
}

std::vector<double> import_solution(const LpModel& model, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_solution(model, in);
}

} // namespace eamod
