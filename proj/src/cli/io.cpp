#include "bifree/cli/io.hpp"

#include "bifree/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace bifree::io {

namespace {

template <class T>
T field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("bad value for field \"") + key + "\"");
    }
}

std::uint32_t arity(const json& j, const char* key)
{
    const auto v = field<long long>(j, key);
    if (v < 0 || v > 1000) throw ValidationError(std::string("field \"") + key + "\" out of range");
    return static_cast<std::uint32_t>(v);
}

Letter pattern_letter(const json& entry)
{
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_number_integer())
        throw ValidationError("pattern entries are [side, index] pairs");
    const auto side = entry[0].get<std::string>();
    const auto index = entry[1].get<long long>();
    if (index < 1) throw ValidationError("pattern indices start at 1");
    if (side == "l") return Letter::X(static_cast<std::uint32_t>(index));
    if (side == "r") return Letter::Y(static_cast<std::uint32_t>(index));
    throw ValidationError("pattern side must be \"l\" or \"r\"");
}

double parse_number(const std::string& token)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw ValidationError("bad number in grid: " + token);
    }
    if (used != token.size()) throw ValidationError("bad number in grid: " + token);
    return v;
}

GridSpec grid_header(const json& j)
{
    GridSpec s;
    s.xmin = field<double>(j, "xmin");
    s.xmax = field<double>(j, "xmax");
    s.ymin = field<double>(j, "ymin");
    s.ymax = field<double>(j, "ymax");
    const auto nx = field<long long>(j, "nx");
    const auto ny = field<long long>(j, "ny");
    if (nx < 3 || ny < 3 || nx > 100000 || ny > 100000) throw ValidationError("grid sizes out of range");
    s.nx = static_cast<std::size_t>(nx);
    s.ny = static_cast<std::size_t>(ny);
    return s;
}

}  // namespace

std::string format_double(double value, int digits)
{
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    std::ostringstream os;
    os << std::setprecision(digits) << value;
    return os.str();
}

json double_to_json(double value)
{
    if (!std::isfinite(value)) return format_double(value);
    return json::parse(format_double(value));
}

Rational rational_from_json(const json& j)
{
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return parse_rational(j.dump());
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw ValidationError("non-finite number");
        const std::string text = j.dump();
        if (text.find_first_of("eE") == std::string::npos) return parse_rational(text);
        return Rational(v);
    }
    throw ValidationError("expected a rational value");
}

json spec_to_json(const CumulantSpec& spec)
{
    json entries = json::array();
    for (const auto& [pattern, value] : spec.entries()) {
        json p = json::array();
        for (const Letter& l : pattern) p.push_back({l.side == Side::left ? "l" : "r", l.index});
        entries.push_back({{"pattern", p}, {"value", to_string(value)}});
    }
    return {{"n", spec.left_arity()},
            {"m", spec.right_arity()},
            {"degree_bound", spec.degree_bound()},
            {"entries", entries}};
}

CumulantSpec spec_from_json(const json& j)
{
    const auto n = arity(j, "n");
    const auto m = arity(j, "m");
    std::size_t bound = kDefaultDegreeBound;
    if (j.contains("degree_bound")) bound = static_cast<std::size_t>(field<unsigned long long>(j, "degree_bound"));
    CumulantSpec spec(n, m, bound);
    if (!j.contains("entries") || !j["entries"].is_array()) throw ValidationError("missing \"entries\" array");
    for (const auto& e : j["entries"]) {
        if (!e.is_object() || !e.contains("pattern") || !e.contains("value") || !e["pattern"].is_array())
            throw ValidationError("entries need \"pattern\" and \"value\"");
        Word w;
        for (const auto& l : e["pattern"]) w.push_back(pattern_letter(l));
        spec.set(w, rational_from_json(e["value"]));
    }
    return spec;
}

json table_to_json(const MomentTable& table)
{
    json moments = json::array();
    for (const auto& [w, v] : table.moments) moments.push_back({{"word", to_string(w)}, {"value", to_string(v)}});
    return {{"n", table.n},
            {"m", table.m},
            {"mode", table.mode.is_bipartite() ? "bipartite" : "free"},
            {"degree_bound", table.degree_bound},
            {"moments", moments}};
}

MomentTable table_from_json(const json& j)
{
    MomentTable t;
    t.n = arity(j, "n");
    t.m = arity(j, "m");
    const auto mode = j.contains("mode") ? field<std::string>(j, "mode") : std::string("bipartite");
    if (mode == "bipartite")
        t.mode = AlgebraMode::bipartite(t.n, t.m);
    else if (mode == "free")
        t.mode = AlgebraMode::free_mode(t.n, t.m);
    else
        throw ValidationError("mode must be \"free\" or \"bipartite\"");
    if (j.contains("degree_bound")) t.degree_bound = static_cast<std::size_t>(field<unsigned long long>(j, "degree_bound"));
    if (!j.contains("moments") || !j["moments"].is_array()) throw ValidationError("missing \"moments\" array");
    for (const auto& e : j["moments"]) {
        Word w = parse_word(field<std::string>(e, "word"));
        for (const Letter& l : w)
            if (!t.mode.admits(l) || !l.is_variable()) throw ValidationError("moment word outside the declared arities: " + to_string(w));
        const Rational v = rational_from_json(e.at("value"));
        if (w.empty()) {
            if (v != 1) throw ValidationError("the moment of the empty word is 1");
            continue;
        }
        if (!t.moments.emplace(w, v).second)
            throw ValidationError("duplicate moment word: " + to_string(w));
    }
    return t;
}

MomentFunctional functional_from_table(const MomentTable& table)
{
    return MomentFunctional::from_table(table.moments, table.mode, table.degree_bound);
}

json covariance_to_json(const CovarianceData& cov)
{
    json rows = json::array();
    for (const auto& row : cov.exact) {
        json r = json::array();
        for (const auto& v : row) r.push_back(to_string(v));
        rows.push_back(r);
    }
    return {{"n", cov.n}, {"m", cov.m}, {"matrix", rows}};
}

CovarianceData covariance_from_json(const json& j)
{
    CovarianceData c;
    c.n = arity(j, "n");
    c.m = arity(j, "m");
    if (!j.contains("matrix") || !j["matrix"].is_array()) throw ValidationError("missing \"matrix\"");
    const auto size = static_cast<std::size_t>(c.n) + c.m;
    if (size == 0) throw ValidationError("covariance needs at least one variable");
    const auto& rows = j["matrix"];
    if (rows.size() != size) throw ValidationError("matrix must be (n+m)x(n+m)");
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != size) throw ValidationError("matrix must be (n+m)x(n+m)");
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_from_json(v));
        c.exact.push_back(std::move(r));
    }
    c.numeric();  // symmetry and PSD checks
    return c;
}

DensityGrid read_grid(std::istream& in)
{
    std::string first;
    while (first.find_first_not_of(" \t\r") == std::string::npos) {
        if (!std::getline(in, first)) throw ValidationError("empty grid file");
    }
    std::ostringstream rest;
    rest << in.rdbuf();
    json header;
    std::string csv;
    try {
        header = json::parse(first);
        csv = rest.str();
    } catch (const json::exception&) {
        try {
            header = json::parse(first + "\n" + rest.str());
        } catch (const json::exception& e) {
            throw ValidationError(std::string("grid file is not JSON: ") + e.what());
        }
    }
    const GridSpec spec = grid_header(header);
    std::vector<double> values;
    values.reserve(spec.nx * spec.ny);
    if (header.contains("values")) {
        if (csv.find_first_not_of(" \t\r\n") != std::string::npos)
            throw ValidationError("grid has both a \"values\" field and CSV data");
        for (const auto& v : header["values"]) {
            if (v.is_array()) {
                for (const auto& x : v) {
                    if (!x.is_number()) throw ValidationError("grid values must be numbers");
                    values.push_back(x.get<double>());
                }
            } else {
                if (!v.is_number()) throw ValidationError("grid values must be numbers");
                values.push_back(v.get<double>());
            }
        }
    } else {
        std::string token;
        for (char ch : csv) {
            if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
                if (!token.empty()) values.push_back(parse_number(token));
                token.clear();
            } else {
                token.push_back(ch);
            }
        }
        if (!token.empty()) values.push_back(parse_number(token));
    }
    return DensityGrid(spec, std::move(values));
}

namespace {

json header_json(const GridSpec& s)
{
    return {{"xmin", s.xmin}, {"xmax", s.xmax}, {"ymin", s.ymin}, {"ymax", s.ymax}, {"nx", s.nx}, {"ny", s.ny}};
}

}  // namespace

void write_grid(std::ostream& out, const DensityGrid& grid)
{
    const GridSpec& s = grid.spec();
    out << header_json(s).dump() << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < s.nx; ++i) {
        for (std::size_t j = 0; j < s.ny; ++j) out << (j ? "," : "") << grid.value(i, j);
        out << '\n';
    }
}

json grid_to_json(const DensityGrid& grid)
{
    json j = header_json(grid.spec());
    j["values"] = grid.values();
    return j;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json_file(const std::string& path)
{
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace bifree::io
