#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "spde_lab/estimators.hpp"
#include "spde_lab/integrator.hpp"

namespace spde_lab {

/// A CSV table of text cells. Numbers are stored as "%.17g" text, which
/// strtod maps back to the identical double.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    friend bool operator==(const Table&, const Table&) = default;
};

std::string format_double(double value);
/// Parses a cell written by format_double; throws ConfigError otherwise.
double parse_double(const std::string& cell);

/// ',' separated, header row first, LF line endings. Cells containing ',',
/// '"' or a newline are double-quoted with '"' doubled.
void write_csv(std::ostream& out, const Table& table);
Table read_csv(std::istream& in);
/// File variants; failures raise ConfigError naming the path.
void write_csv_file(const std::string& path, const Table& table);
Table read_csv_file(const std::string& path);

Table path_table(const PathStats& stats);
Table coupled_table(const CoupledStats& stats);
Table decay_table(const DecayReport& report);
Table moment_table(const MomentReport& report);
Table semigroup_table(const SemigroupReport& report);
/// One row per (horizon, start, quantity); quantity is a functional name or
/// "v_alpha".
Table invariant_table(const InvariantReport& report);
Table discrepancy_table(const InvariantReport& report);
Table ergodic_table(const ErgodicReport& report);

}  // namespace spde_lab
