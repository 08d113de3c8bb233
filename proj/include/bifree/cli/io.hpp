#pragma once

// File formats: cumulant specs, moment tables, covariances and density grids.

#include "bifree/bipartite.hpp"
#include "bifree/cumulant.hpp"
#include "bifree/gaussfam.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>

namespace bifree::io {

using nlohmann::json;

/// Floats carry 12 significant digits; infinities become "inf" / "-inf".
std::string format_double(double value, int digits = 12);
json double_to_json(double value);

/// Accepts "p/q" and decimal strings as well as JSON numbers; numbers are
/// read through their shortest decimal form.
Rational rational_from_json(const json& j);

json spec_to_json(const CumulantSpec& spec);
CumulantSpec spec_from_json(const json& j);

struct MomentTable {
    std::uint32_t n = 1;
    std::uint32_t m = 1;
    AlgebraMode mode = AlgebraMode::bipartite(1, 1);
    std::size_t degree_bound = kDefaultDegreeBound;
    std::map<Word, Rational> moments;
};

json table_to_json(const MomentTable& table);
MomentTable table_from_json(const json& j);
MomentFunctional functional_from_table(const MomentTable& table);

struct CovarianceData {
    std::uint32_t n = 1;
    std::uint32_t m = 1;
    RationalMatrix exact;

    Covariance numeric() const { return Covariance(n, m, to_matrix(exact)); }
};

json covariance_to_json(const CovarianceData& cov);
CovarianceData covariance_from_json(const json& j);

/// Either a JSON header line followed by comma/whitespace separated values,
/// or one JSON document with the header fields and "values" (flat or rows).
DensityGrid read_grid(std::istream& in);
/// Header line plus one CSV row per x sample.
void write_grid(std::ostream& out, const DensityGrid& grid);
json grid_to_json(const DensityGrid& grid);

std::string read_file(const std::string& path);
json read_json_file(const std::string& path);

}  // namespace bifree::io
