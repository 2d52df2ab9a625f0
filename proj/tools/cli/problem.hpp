#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <hmgibbs/potentials.hpp>

namespace hmg::cli {

enum class Family { Table, FirstSymbolWeighted, GeometricTail };

/// One JSON document describing a desk-scale problem.
struct ProblemSpec {
    AlphabetPtr source;
    AlphabetPtr target;
    std::optional<AmalgamationMap> map;
    std::string separator;

    Family family = Family::Table;
    std::optional<LocallyConstantPotential> table;
    std::optional<VariationBoundedPotential> general;

    std::optional<std::size_t> r;
    std::optional<std::size_t> n;
    std::optional<double> tol;
    double delta = 1.0;

    std::size_t max_length = 4;
    std::vector<std::string> words;
    std::size_t report_n_max = 8;
    std::size_t report_depth = 40;
    unsigned long long cap = 10'000'000ULL;
    std::size_t max_states = 1024;
    /// Overrides the built-in oracle comparison tolerances of --verify.
    std::optional<double> verify_tolerance;

    Word parse_source_word(const std::string& s) const { return Word::parse(source, s, separator); }
    Word parse_target_word(const std::string& s) const { return Word::parse(target, s, separator); }
    const AmalgamationMap& require_map() const;
    /// The table itself, or the approximant of the general potential at range r.
    LocallyConstantPotential table_at(std::optional<std::size_t> r_override) const;
};

ProblemSpec parse_problem(const std::string& text, const std::string& source_name);
ProblemSpec load_problem(const std::filesystem::path& path);

}  // namespace hmg::cli
