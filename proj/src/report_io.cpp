#include "spde_lab/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "spde_lab/errors.hpp"

namespace spde_lab {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(const std::string& cell) {
    if (cell.empty()) throw ConfigError("empty numeric cell");
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size()) throw ConfigError("not a number: '" + cell + "'");
    return value;
}

namespace {

void write_cell(std::ostream& out, const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
        out << cell;
        return;
    }
    out << '"';
    for (char c : cell) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << ',';
        write_cell(out, row[i]);
    }
    out << '\n';
}

/// Reads one record; returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& row) {
    row.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string cell;
    bool quoted = false;
    for (int c = in.get(); c != std::char_traits<char>::eof(); c = in.get()) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    cell += static_cast<char>(in.get());
                } else {
                    quoted = false;
                }
            } else {
                cell += static_cast<char>(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(cell);
            cell.clear();
        } else if (c == '\n') {
            row.push_back(cell);
            return true;
        } else {
            cell += static_cast<char>(c);
        }
    }
    if (quoted) throw ConfigError("unterminated quoted CSV cell");
    row.push_back(cell);
    return true;
}

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw DimensionError("CSV row width differs from header");
        write_row(out, row);
    }
}

Table read_csv(std::istream& in) {
    Table table;
    if (!read_row(in, table.header)) throw ConfigError("CSV input has no header row");
    std::vector<std::string> row;
    while (read_row(in, row)) {
        if (row.size() != table.header.size()) throw ConfigError("CSV row width differs from header");
        table.rows.push_back(row);
    }
    return table;
}

void write_csv_file(const std::string& path, const Table& table) {
    std::ostringstream buffer;
    write_csv(buffer, table);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << buffer.str();
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_csv(in);
}

Table path_table(const PathStats& stats) {
    Table t{{"t", "h_norm_sq_x", "v_alpha_int_x"}, {}};
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        t.rows.push_back({format_double(stats.times[k]), format_double(stats.h_norm_sq[k]),
                          format_double(stats.v_alpha_integral[k])});
    }
    return t;
}

Table coupled_table(const CoupledStats& stats) {
    Table t{{"t", "h_norm_sq_x", "v_alpha_int_x", "h_norm_sq_y", "v_alpha_int_y", "dist_h"}, {}};
    for (std::size_t k = 0; k < stats.distance.size(); ++k) {
        t.rows.push_back({format_double(stats.x.times[k]), format_double(stats.x.h_norm_sq[k]),
                          format_double(stats.x.v_alpha_integral[k]),
                          format_double(stats.y.h_norm_sq[k]),
                          format_double(stats.y.v_alpha_integral[k]),
                          format_double(stats.distance[k])});
    }
    return t;
}

Table decay_table(const DecayReport& report) {
    Table t{{"t", "mc_mean", "mc_se", "rhs_bound", "pathwise_violations", "pass"}, {}};
    for (const auto& r : report.rows) {
        t.rows.push_back({format_double(r.t), format_double(r.mc_mean), format_double(r.mc_se),
                          format_double(r.rhs_bound), std::to_string(r.pathwise_violations),
                          flag(r.pass)});
    }
    return t;
}

Table moment_table(const MomentReport& report) {
    Table t{{"t", "mc_mean", "mc_se", "bound", "pass"}, {}};
    for (const auto& r : report.rows) {
        t.rows.push_back({format_double(r.t), format_double(r.mc_mean), format_double(r.mc_se),
                          format_double(r.bound), flag(r.pass)});
    }
    return t;
}

Table semigroup_table(const SemigroupReport& report) {
    Table t{{"functional", "t", "estimate", "se", "shape", "ratio"}, {}};
    for (const auto& r : report.rows) {
        t.rows.push_back({r.functional, format_double(r.t), format_double(r.estimate),
                          format_double(r.se), format_double(r.shape), format_double(r.ratio)});
    }
    return t;
}

Table invariant_table(const InvariantReport& report) {
    Table t{{"T", "start", "quantity", "mu", "se"}, {}};
    for (const auto& cp : report.checkpoints) {
        for (std::size_t s = 0; s < cp.mu_v_alpha.size(); ++s) {
            for (std::size_t f = 0; f < report.functionals.size(); ++f) {
                t.rows.push_back({format_double(cp.T), std::to_string(s), report.functionals[f],
                                  format_double(cp.mu_f[s][f]), format_double(cp.mu_f_se[s][f])});
            }
            t.rows.push_back({format_double(cp.T), std::to_string(s), "v_alpha",
                              format_double(cp.mu_v_alpha[s]), format_double(cp.mu_v_alpha_se[s])});
        }
    }
    return t;
}

Table discrepancy_table(const InvariantReport& report) {
    Table t{{"T", "discrepancy"}, {}};
    for (const auto& cp : report.checkpoints) {
        t.rows.push_back({format_double(cp.T), format_double(cp.discrepancy)});
    }
    return t;
}

Table ergodic_table(const ErgodicReport& report) {
    Table t{{"functional", "t", "estimate", "se", "shape", "ratio"}, {}};
    for (const auto& r : report.rows) {
        t.rows.push_back({r.functional, format_double(r.t), format_double(r.estimate),
                          format_double(r.se), format_double(r.shape), format_double(r.ratio)});
    }
    return t;
}

}  // namespace spde_lab
