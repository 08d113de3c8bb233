#include "bifree/cli/cli.hpp"

#include "bifree/bipartite.hpp"
#include "bifree/bnclattice.hpp"
#include "bifree/cli/io.hpp"
#include "bifree/cumulant.hpp"
#include "bifree/derivation.hpp"
#include "bifree/error.hpp"
#include "bifree/gaussfam.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

namespace bifree::cli {

using io::json;

namespace {

constexpr std::size_t kMaxFockDimension = 2'000'000;
constexpr std::size_t kMaxEnumeratedWords = 200'000;

struct Output {
    json data = json::object();
    std::string text;
    std::string csv;
    std::string default_format = "text";
    std::vector<std::string> warnings;
    int status = kExitOk;
};

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string flat_csv(const json& data)
{
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : data.items())
        if (!v.is_structured()) os << k << ',' << scalar_text(v) << '\n';
    return os.str();
}

std::string flat_text(const json& data)
{
    std::ostringstream os;
    for (const auto& [k, v] : data.items())
        if (!v.is_structured()) os << k << ' ' << scalar_text(v) << '\n';
    return os.str();
}

std::string fixed10(double v)
{
    if (!std::isfinite(v)) return io::format_double(v);
    std::ostringstream os;
    os << std::fixed << std::setprecision(10) << v;
    return os.str();
}

std::string csv_quote(const std::string& s) { return '"' + s + '"'; }

// ---------------------------------------------------------------- sources

struct SourceOpts {
    std::string spec;
    std::string table;
    std::string covariance;
    std::string matrix;
    int n = -1;
    int m = -1;
    std::string mode = "bipartite";
};

void add_covariance_opts(CLI::App* cmd, SourceOpts& s)
{
    cmd->add_option("--covariance", s.covariance, "Covariance JSON file {n, m, matrix}");
    cmd->add_option("--matrix", s.matrix, "Inline covariance rows, e.g. [[1,0.5],[0.5,1]]");
    cmd->add_option("--n", s.n, "Number of left variables (with --matrix)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--m", s.m, "Number of right variables (with --matrix)")->check(CLI::NonNegativeNumber);
}

void add_source_opts(CLI::App* cmd, SourceOpts& s)
{
    cmd->add_option("--spec", s.spec, "Cumulant spec JSON file");
    cmd->add_option("--table", s.table, "Moment table JSON file");
    add_covariance_opts(cmd, s);
    cmd->add_option("--mode", s.mode, "Algebra mode for --spec and covariance sources")
        ->check(CLI::IsMember({"free", "bipartite"}));
}

io::CovarianceData covariance_source(const SourceOpts& s)
{
    if (!s.covariance.empty() && !s.matrix.empty()) throw ValidationError("give either --covariance or --matrix");
    if (!s.covariance.empty()) return io::covariance_from_json(io::read_json_file(s.covariance));
    if (s.matrix.empty()) throw ValidationError("a covariance is required (--covariance or --matrix)");
    json rows;
    try {
        rows = json::parse(s.matrix);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("--matrix is not JSON: ") + e.what());
    }
    if (!rows.is_array() || rows.empty()) throw ValidationError("--matrix must be a non-empty array of rows");
    const int size = static_cast<int>(rows.size());
    int n = s.n, m = s.m;
    if (n < 0 && m < 0) {
        n = (size + 1) / 2;
        m = size - n;
    } else if (n < 0) {
        n = size - m;
    } else if (m < 0) {
        m = size - n;
    }
    if (n < 0 || m < 0 || n + m != size) throw ValidationError("--n + --m must equal the matrix size");
    return io::covariance_from_json({{"n", n}, {"m", m}, {"matrix", rows}});
}

AlgebraMode mode_from(const std::string& name, std::uint32_t n, std::uint32_t m)
{
    return name == "free" ? AlgebraMode::free_mode(n, m) : AlgebraMode::bipartite(n, m);
}

MomentFunctional functional_source(const SourceOpts& s)
{
    const int given = !s.spec.empty() + !s.table.empty() + (!s.covariance.empty() || !s.matrix.empty());
    if (given != 1) throw ValidationError("give exactly one of --spec, --table, --covariance/--matrix");
    if (!s.spec.empty()) {
        CumulantSpec spec = io::spec_from_json(io::read_json_file(s.spec));
        const auto mode = mode_from(s.mode, spec.left_arity(), spec.right_arity());
        return MomentFunctional::from_cumulants(std::move(spec), mode);
    }
    if (!s.table.empty()) return io::functional_from_table(io::table_from_json(io::read_json_file(s.table)));
    const auto cov = covariance_source(s);
    return MomentFunctional::from_cumulants(gaussian_spec(cov.n, cov.m, cov.exact), mode_from(s.mode, cov.n, cov.m));
}

std::vector<Letter> variables(std::uint32_t n, std::uint32_t m)
{
    std::vector<Letter> out;
    for (std::uint32_t i = 1; i <= n; ++i) out.push_back(Letter::X(i));
    for (std::uint32_t j = 1; j <= m; ++j) out.push_back(Letter::Y(j));
    return out;
}

// Words of degree 1..max_degree in degree-lex order.
std::vector<Word> words_up_to(std::uint32_t n, std::uint32_t m, std::size_t max_degree)
{
    const auto letters = variables(n, m);
    std::vector<Word> out;
    std::vector<Word> layer{Word{}};
    for (std::size_t d = 1; d <= max_degree; ++d) {
        std::vector<Word> next;
        for (const auto& w : layer)
            for (const auto& l : letters) {
                Word x = w;
                x.push_back(l);
                next.push_back(std::move(x));
            }
        if (out.size() + next.size() > kMaxEnumeratedWords)
            throw ValidationError("too many words; lower --degree");
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

Word variable_word(const std::string& text, const AlgebraMode& mode)
{
    Word w = parse_word(text);
    for (const Letter& l : w)
        if (!l.is_variable() || !mode.admits(l)) throw ValidationError("word outside the declared variables: " + text);
    return w;
}

// ---------------------------------------------------------------- commands

Output cmd_lattice(const std::string& chi_text, std::size_t cap)
{
    const ChiSeq chi = ChiSeq::parse(chi_text);
    if (chi.empty()) throw ValidationError("--chi must be non-empty");
    const auto all = enumerate_bnc(chi, cap);
    Output o;
    o.default_format = "json";
    json parts = json::array();
    std::ostringstream csv;
    csv << "partition\n";
    for (const auto& p : all) {
        parts.push_back(p.blocks());
        csv << csv_quote(to_string(p)) << '\n';
    }
    const long long mu = mobius(BNCPartition::zero(chi), BNCPartition::one(chi));
    o.data = {{"chi", to_string(chi)}, {"count", all.size()}, {"partitions", parts}, {"mobius_0_to_1", mu}};
    std::ostringstream text;
    text << "chi " << to_string(chi) << "\ncount " << all.size() << "\nmobius_0_to_1 " << mu << '\n';
    for (const auto& p : all) text << to_string(p) << '\n';
    o.text = text.str();
    o.csv = csv.str();
    return o;
}

Output cmd_cumulants(const SourceOpts& src, const std::vector<std::string>& words, std::size_t degree)
{
    const MomentFunctional phi = functional_source(src);
    const AlgebraMode mode = phi.mode();
    auto kappa = [&](const Word& w) {
        std::vector<Word> args;
        for (const Letter& l : w) args.push_back(Word{l});
        return cumulant_chi(phi, ChiSeq::of_word(w), args);
    };
    Output o;
    std::ostringstream text, csv;
    csv << "word,value\n";
    if (!words.empty()) {
        json items = json::array();
        for (const auto& text_word : words) {
            const Word w = variable_word(text_word, mode);
            if (w.empty()) throw ValidationError("cumulants need a non-empty word");
            const Rational v = kappa(w);
            items.push_back({{"word", to_string(w)}, {"value", to_string(v)}});
            text << to_string(w) << ": " << to_string(v) << '\n';
            csv << csv_quote(to_string(w)) << ',' << to_string(v) << '\n';
        }
        o.data = {{"cumulants", items}};
    } else {
        if (degree == 0) throw ValidationError("--degree must be positive");
        CumulantSpec spec(mode.left_arity, mode.right_arity, degree);
        for (const Word& w : words_up_to(mode.left_arity, mode.right_arity, degree)) {
            const Rational v = kappa(w);
            if (v == 0) continue;
            spec.set(w, v);
            text << to_string(w) << ": " << to_string(v) << '\n';
            csv << csv_quote(to_string(w)) << ',' << to_string(v) << '\n';
        }
        o.data = io::spec_to_json(spec);
        o.default_format = "json";
    }
    o.text = text.str();
    o.csv = csv.str();
    return o;
}

Output cmd_moments(const SourceOpts& src, const std::vector<std::string>& words, std::size_t degree)
{
    const MomentFunctional phi = functional_source(src);
    const AlgebraMode mode = phi.mode();
    Output o;
    std::ostringstream text, csv;
    csv << "word,value\n";
    auto emit = [&](const Word& w, const Rational& v) {
        text << to_string(w) << ": " << to_string(v) << '\n';
        csv << csv_quote(to_string(w)) << ',' << to_string(v) << '\n';
    };
    if (!words.empty()) {
        json items = json::array();
        for (const auto& text_word : words) {
            const Word w = variable_word(text_word, mode);
            const Rational v = phi(w);
            items.push_back({{"word", to_string(w)}, {"value", to_string(v)}});
            emit(w, v);
        }
        o.data = {{"moments", items}};
    } else {
        if (degree == 0) throw ValidationError("--degree must be positive");
        io::MomentTable table;
        table.n = mode.left_arity;
        table.m = mode.right_arity;
        table.mode = mode;
        table.degree_bound = degree;
        for (const Word& w : words_up_to(mode.left_arity, mode.right_arity, degree)) {
            const Word key = mode.is_bipartite() ? normal_form(w, mode) : w;
            if (table.moments.count(key)) continue;
            const Rational v = phi(key);
            table.moments.emplace(key, v);
            emit(key, v);
        }
        o.data = io::table_to_json(table);
        o.default_format = "json";
    }
    o.text = text.str();
    o.csv = csv.str();
    return o;
}

QuotientKind quotient_kind(const std::string& side, std::uint32_t index, bool flipped)
{
    if (index == 0) throw ValidationError("--index starts at 1");
    return {side == "left" ? Side::left : Side::right, flipped, index};
}

std::string kind_name(const QuotientKind& k)
{
    return std::string(k.flipped ? "flipped-" : "") + (k.side == Side::left ? "left" : "right") + " " +
           to_string(k.target());
}

Output cmd_dq(const std::string& poly, const std::string& side, std::uint32_t index, bool flipped,
              const std::string& mode_name, int n, int m)
{
    const NCPolynomial p = parse_polynomial(poly);
    const QuotientKind kind = quotient_kind(side, index, flipped);
    std::uint32_t max_left = kind.side == Side::left ? index : 1;
    std::uint32_t max_right = kind.side == Side::right ? index : 1;
    for (const auto& [w, c] : p.terms())
        for (const Letter& l : w)
            if (l.is_variable()) (l.side == Side::left ? max_left : max_right) = std::max(l.side == Side::left ? max_left : max_right, l.index);
    const auto mode = mode_from(mode_name, n >= 0 ? static_cast<std::uint32_t>(n) : max_left,
                                m >= 0 ? static_cast<std::uint32_t>(m) : max_right);
    const TensorPoly result = bifree_dq(p, kind, mode);
    Output o;
    const std::string r = result.is_zero() ? "0" : to_string(result);
    o.data = {{"input", to_string(p)}, {"kind", kind_name(kind)}, {"mode", mode_name}, {"result", r}};
    o.text = r + '\n';
    return o;
}

Output cmd_conjugate_check(const SourceOpts& src, const std::string& side, std::uint32_t index,
                           const std::string& xi_text, std::size_t degree)
{
    const MomentFunctional phi = functional_source(src);
    const QuotientKind kind = quotient_kind(side, index, false);
    const NCPolynomial xi = parse_polynomial(xi_text);
    const ConjugateReport report = conjugate_check(phi, kind, xi, degree);
    Output o;
    o.data = {{"kind", kind_name(kind)},
              {"xi", to_string(xi)},
              {"max_degree", report.max_degree},
              {"checked", report.items.size()},
              {"passed", report.passed()}};
    std::ostringstream text, csv;
    csv << "word,lhs,rhs,pass\n";
    for (const auto& item : report.items)
        csv << csv_quote(to_string(item.word)) << ',' << to_string(item.lhs) << ',' << to_string(item.rhs) << ','
            << (item.pass ? "true" : "false") << '\n';
    if (report.passed()) {
        text << "PASS " << report.items.size() << " words up to degree " << report.max_degree << '\n';
    } else {
        const auto& f = *report.first_failure;
        o.data["first_failure"] = {{"word", to_string(f.word)}, {"lhs", to_string(f.lhs)}, {"rhs", to_string(f.rhs)}};
        text << "FAIL at word " << to_string(f.word) << ": phi(Z xi) = " << to_string(f.lhs)
             << ", (phi x phi)(dZ) = " << to_string(f.rhs) << '\n';
        o.status = kExitCheckFailed;
    }
    o.text = text.str();
    o.csv = csv.str();
    return o;
}

Output cmd_gaussian_fisher(const SourceOpts& src, double t)
{
    const Covariance cov = covariance_source(src).numeric();
    if (t < 0.0 || !std::isfinite(t)) throw ValidationError("--t must be finite and nonnegative");
    const double v = t > 0.0 ? fisher_perturbed(cov, t) : fisher(cov);
    Output o;
    o.data = {{"fisher", io::double_to_json(v)}, {"t", t}};
    o.text = fixed10(v) + '\n';
    return o;
}

Output cmd_gaussian_entropy(const SourceOpts& src, bool quad, double quad_tol)
{
    const Covariance cov = covariance_source(src).numeric();
    const double closed = entropy_closed(cov);
    Output o;
    o.data = {{"entropy", io::double_to_json(closed)}};
    std::ostringstream text;
    text << fixed10(closed) << '\n';
    if (quad) {
        if (!(quad_tol > 0.0)) throw ValidationError("--quad-tol must be positive");
        EntropyQuadConfig cfg;
        cfg.tol = quad_tol;
        cfg.tail_tol = std::max(quad_tol, 1e-12);
        const auto r = entropy_quadrature(fisher_curve(cov), cov.size(), cfg);
        o.data["quadrature"] = io::double_to_json(r.value);
        o.data["quadrature_error"] = io::double_to_json(r.error);
        o.data["cut"] = io::double_to_json(r.cut);
        o.data["evaluations"] = r.evaluations;
        text << "quadrature " << fixed10(r.value) << " (error " << io::format_double(r.error, 3) << ")\n";
    }
    o.text = text.str();
    return o;
}

Output cmd_gaussian_dimension(const SourceOpts& src, bool limit, const std::vector<double>& eps)
{
    const Covariance cov = covariance_source(src).numeric();
    const RankInfo info = entropy_dimension(cov);
    Output o;
    json sv = json::array();
    for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) sv.push_back(io::double_to_json(info.singular_values(i)));
    o.data = {{"dimension", info.rank}, {"ambiguous", info.ambiguous}, {"threshold", io::double_to_json(info.threshold)},
              {"singular_values", sv}};
    std::ostringstream text;
    text << info.rank << '\n';
    if (info.ambiguous)
        o.warnings.push_back("a singular value lies within a factor 10 of the rank threshold " +
                             io::format_double(info.threshold, 3));
    if (limit) {
        const auto r = entropy_dimension_limit(fisher_curve(cov), cov.size(), eps.empty() ? default_eps_sequence() : eps);
        o.data["limit"] = io::double_to_json(r.value);
        o.data["limit_error"] = io::double_to_json(r.error);
        text << "limit " << io::format_double(r.value) << " (error " << io::format_double(r.error, 3) << ")\n";
    }
    o.text = text.str();
    return o;
}

Output cmd_gaussian_moments(const SourceOpts& src, const std::string& pattern_text, std::size_t depth)
{
    const auto data = covariance_source(src);
    const Covariance cov = data.numeric();
    const auto mode = AlgebraMode::bipartite(data.n, data.m);
    const Word w = variable_word(pattern_text, mode);
    const Rational exact = gaussian_moment(data.n, data.m, data.exact, w);
    const double combinatorial = gaussian_moment(cov, w);
    if (depth == 0) depth = w.size();
    double dim = 0.0, level = 1.0;
    for (std::size_t k = 0; k <= depth; ++k, level *= static_cast<double>(cov.size())) dim += level;
    if (dim > static_cast<double>(kMaxFockDimension))
        throw ValidationError("Fock space of depth " + std::to_string(depth) + " is too large");
    const FockModel model(cov, depth);
    const double fock = fock_moment(model, w);
    Output o;
    o.data = {{"pattern", to_string(w)},
              {"exact", to_string(exact)},
              {"combinatorial", io::double_to_json(combinatorial)},
              {"fock", io::double_to_json(fock)},
              {"depth", depth},
              {"difference", io::double_to_json(std::abs(fock - combinatorial))}};
    o.text = "exact " + to_string(exact) + "\ncombinatorial " + io::format_double(combinatorial) + "\nfock " +
             io::format_double(fock) + '\n';
    return o;
}

struct GridOpts {
    std::string grid;
    std::optional<double> c;
    std::size_t points = 256;
    double eps = 0.0;
    bool richardson = false;
    double mask_threshold = kMaskThreshold;
    double max_mask_fraction = 0.05;
};

void add_grid_opts(CLI::App* cmd, GridOpts& g)
{
    cmd->add_option("--grid", g.grid, "Density grid file");
    cmd->add_option("--c", g.c, "Use the semicircular density mu_c instead of a grid file");
    cmd->add_option("--points", g.points, "Points per axis for --c")->check(CLI::Range(3, 8192));
    cmd->add_option("--eps", g.eps, "Kernel regularization (default: one grid spacing)")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--richardson", g.richardson, "Two-point (eps, eps/2) Richardson extrapolation");
    cmd->add_option("--mask-threshold", g.mask_threshold, "Relative density below which f counts as zero")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-mask-fraction", g.max_mask_fraction, "Warn above this non-product fraction")
        ->check(CLI::Range(0.0, 1.0));
}

DensityGrid grid_source(const GridOpts& g)
{
    if (g.grid.empty() == !g.c.has_value()) throw ValidationError("give exactly one of --grid, --c");
    if (g.c) return semicircular_density(*g.c, g.points);
    std::ifstream in(g.grid);
    if (!in) throw ValidationError("cannot read " + g.grid);
    return io::read_grid(in);
}

ConjugateConfig conjugate_config(const GridOpts& g)
{
    ConjugateConfig cfg;
    cfg.eps = g.eps;
    cfg.richardson = g.richardson;
    cfg.mask_threshold = g.mask_threshold;
    cfg.max_mask_fraction = g.max_mask_fraction;
    return cfg;
}

Output cmd_make_semicircular(double c, std::size_t points)
{
    const DensityGrid g = semicircular_density(c, points);
    Output o;
    o.data = io::grid_to_json(g);
    std::ostringstream os;
    io::write_grid(os, g);
    o.text = os.str();
    o.csv = o.text;
    return o;
}

Output cmd_bipartite_fisher(const GridOpts& opts)
{
    const DensityGrid g = grid_source(opts);
    const ConjugateField field = conjugate_field(g, conjugate_config(opts));
    const FisherNumeric r = fisher_numeric(g, field);
    Output o;
    o.warnings = r.warnings;
    o.data = {{"fisher", io::double_to_json(r.value)},
              {"left", io::double_to_json(r.left)},
              {"right", io::double_to_json(r.right)},
              {"eps_x", io::double_to_json(field.eps_x)},
              {"eps_y", io::double_to_json(field.eps_y)},
              {"mask_fraction", io::double_to_json(field.mask_fraction)},
              {"nx", g.spec().nx},
              {"ny", g.spec().ny}};
    std::ostringstream text;
    text << io::format_double(r.value) << '\n';
    if (opts.c) {
        const double target = 2.0 / (1.0 - *opts.c * *opts.c);
        o.data["closed_form"] = io::double_to_json(target);
        o.data["relative_error"] = io::double_to_json((r.value - target) / target);
        text << "closed form " << io::format_double(target) << ", relative error "
             << io::format_double((r.value - target) / target, 3) << '\n';
    }
    o.text = text.str();
    return o;
}

Output cmd_bipartite_conjugate(const GridOpts& opts)
{
    const DensityGrid g = grid_source(opts);
    const ConjugateField field = conjugate_field(g, conjugate_config(opts));
    const GridSpec& s = g.spec();
    Output o;
    o.default_format = "csv";
    o.warnings = field.warnings;
    std::ostringstream csv;
    csv << "x,y,f,xi_left,xi_right,masked\n" << std::setprecision(12);
    for (std::size_t i = 0; i < s.nx; ++i)
        for (std::size_t j = 0; j < s.ny; ++j) {
            const std::size_t k = i * s.ny + j;
            csv << s.x(i) << ',' << s.y(j) << ',' << g.value(i, j) << ',' << field.left[k] << ',' << field.right[k]
                << ',' << int(field.mask[k]) << '\n';
        }
    o.csv = csv.str();
    const FisherNumeric r = fisher_numeric(g, field);
    o.data = {{"xmin", s.xmin}, {"xmax", s.xmax}, {"ymin", s.ymin}, {"ymax", s.ymax}, {"nx", s.nx}, {"ny", s.ny},
              {"eps_x", field.eps_x}, {"eps_y", field.eps_y}, {"mask_fraction", field.mask_fraction},
              {"left_norm2", r.left}, {"right_norm2", r.right}, {"xi_left", field.left}, {"xi_right", field.right},
              {"mask", field.mask}};
    std::ostringstream text;
    text << "grid " << s.nx << "x" << s.ny << ", eps " << io::format_double(field.eps_x) << ", mask fraction "
         << io::format_double(field.mask_fraction, 3) << '\n'
         << "||xi_left||^2 " << io::format_double(r.left) << "\n||xi_right||^2 " << io::format_double(r.right) << '\n';
    o.text = text.str();
    return o;
}

Output cmd_selftest()
{
    Output o;
    json items = json::array();
    std::ostringstream text, csv;
    csv << "item,pass,detail\n";
    bool all = true;
    for (const auto& item : run_selftest()) {
        items.push_back({{"name", item.name}, {"pass", item.pass}, {"detail", item.detail}});
        text << (item.pass ? "PASS " : "FAIL ") << item.name;
        if (!item.detail.empty()) text << " (" << item.detail << ')';
        text << '\n';
        csv << csv_quote(item.name) << ',' << (item.pass ? "true" : "false") << ',' << csv_quote(item.detail) << '\n';
        all = all && item.pass;
    }
    o.data = {{"items", items}, {"passed", all}};
    o.text = text.str();
    o.csv = csv.str();
    if (!all) o.status = kExitCheckFailed;
    return o;
}

void emit(const Output& o, const std::string& format_opt, const std::string& out_path, bool force, bool quiet,
          std::ostream& out, std::ostream& err)
{
    const std::string format = format_opt.empty() ? o.default_format : format_opt;
    std::string body;
    if (format == "json")
        body = o.data.dump(2) + '\n';
    else if (format == "csv")
        body = o.csv.empty() ? flat_csv(o.data) : o.csv;
    else
        body = o.text.empty() ? flat_text(o.data) : o.text;
    if (!quiet)
        for (const auto& w : o.warnings) err << "warning: " << w << '\n';
    if (out_path.empty()) {
        out << body;
        return;
    }
    if (std::filesystem::exists(out_path) && !force)
        throw ValidationError(out_path + " exists; pass --force to overwrite");
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw ValidationError("cannot write " + out_path);
    file << body;
    if (!file) throw ValidationError("write failed: " + out_path);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bi-free probability toolkit: lattices, cumulants, difference quotients, Gaussian families."};
    app.name("bifree");
    app.fallthrough();
    app.require_subcommand(1);

    std::string out_path, format;
    bool force = false, quiet = false;
    app.add_option("--out", out_path, "Write the result to this file");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_flag("--force", force, "Overwrite an existing --out file");
    app.add_flag("--quiet", quiet, "Suppress warnings");

    std::string chi;
    std::size_t cap = kDefaultLatticeCap;
    auto* lattice = app.add_subcommand("lattice", "Enumerate BNC(chi)");
    lattice->add_option("--chi", chi, "Side labels, e.g. lrlr")->required();
    lattice->add_option("--cap", cap, "Largest size enumerated");

    SourceOpts src;
    std::vector<std::string> words;
    std::size_t degree = 4;
    auto* cumulants = app.add_subcommand("cumulants", "Bi-free cumulants of single letters");
    add_source_opts(cumulants, src);
    cumulants->add_option("--word", words, "Letters of the cumulant; repeatable");
    cumulants->add_option("--degree", degree, "Without --word: emit a cumulant spec up to this degree");

    auto* moments = app.add_subcommand("moments", "Moments of words");
    add_source_opts(moments, src);
    moments->add_option("--word", words, "Word to evaluate; repeatable");
    moments->add_option("--degree", degree, "Without --word: emit a moment table up to this degree");

    std::string poly, side = "left", mode_name = "bipartite";
    std::uint32_t index = 1;
    bool flipped = false;
    int dq_n = -1, dq_m = -1;
    auto* dq = app.add_subcommand("dq", "Bi-free difference quotient of a polynomial");
    dq->add_option("polynomial", poly, "Polynomial literal, e.g. \"X1 X1 Y1 - 1/2*Y1\"")->required();
    dq->add_option("--side", side, "left or right")->check(CLI::IsMember({"left", "right"}))->required();
    dq->add_option("--index", index, "Variable index");
    dq->add_flag("--flipped", flipped, "Flipped quotient");
    dq->add_option("--mode", mode_name, "Algebra mode")->check(CLI::IsMember({"free", "bipartite"}));
    dq->add_option("--n", dq_n, "Left arity (default: inferred)");
    dq->add_option("--m", dq_m, "Right arity (default: inferred)");

    std::string xi;
    std::size_t check_degree = 6;
    auto* conj = app.add_subcommand("conjugate-check", "Test phi(Z xi) = (phi x phi)(d Z) for all words Z");
    add_source_opts(conj, src);
    conj->add_option("--side", side, "left or right")->check(CLI::IsMember({"left", "right"}));
    conj->add_option("--index", index, "Variable index");
    conj->add_option("--xi", xi, "Candidate conjugate variable")->required();
    conj->add_option("--degree", check_degree, "Largest test word degree");

    auto* gaussian = app.add_subcommand("gaussian", "Bi-free central limit families");
    gaussian->require_subcommand(1);
    double t = 0.0, quad_tol = 1e-10;
    bool quad = false, limit = false;
    std::vector<double> eps_seq;
    std::string pattern;
    std::size_t depth = 0;
    auto* g_fisher = gaussian->add_subcommand("fisher", "Fisher information Tr((A + tI)^-1)");
    add_covariance_opts(g_fisher, src);
    g_fisher->add_option("--t", t, "Semicircular perturbation time");
    auto* g_entropy = gaussian->add_subcommand("entropy", "Entropy (closed form, optionally by quadrature)");
    add_covariance_opts(g_entropy, src);
    g_entropy->add_flag("--quad", quad, "Also integrate the Fisher deficit numerically");
    g_entropy->add_option("--quad-tol", quad_tol, "Quadrature tolerance");
    auto* g_dim = gaussian->add_subcommand("dimension", "Entropy dimension");
    add_covariance_opts(g_dim, src);
    g_dim->add_flag("--limit", limit, "Also extrapolate n+m - eps Fisher(eps) to eps = 0");
    g_dim->add_option("--eps", eps_seq, "Decreasing eps sequence for --limit");
    auto* g_mom = gaussian->add_subcommand("moments", "Moment of a pattern, combinatorially and in the Fock model");
    add_covariance_opts(g_mom, src);
    g_mom->add_option("--pattern", pattern, "Word such as \"X1 Y1 X1 Y1\"")->required();
    g_mom->add_option("--depth", depth, "Fock truncation depth (default: pattern length)");

    auto* bip = app.add_subcommand("bipartite", "Commuting pairs with a joint density");
    bip->require_subcommand(1);
    GridOpts grid_opts;
    double c = 0.0;
    std::size_t points = 256;
    auto* b_make = bip->add_subcommand("make-semicircular", "Sample the density mu_c");
    b_make->add_option("--c", c, "Covariance, |c| < 1")->required();
    b_make->add_option("--points", points, "Points per axis")->check(CLI::Range(3, 8192));
    auto* b_fisher = bip->add_subcommand("fisher", "Numerical Fisher information");
    add_grid_opts(b_fisher, grid_opts);
    auto* b_conj = bip->add_subcommand("conjugate", "Conjugate variable fields on the grid");
    add_grid_opts(b_conj, grid_opts);

    auto* selftest = app.add_subcommand("selftest", "Run the golden examples");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        Output o;
        if (lattice->parsed())
            o = cmd_lattice(chi, cap);
        else if (cumulants->parsed())
            o = cmd_cumulants(src, words, degree);
        else if (moments->parsed())
            o = cmd_moments(src, words, degree);
        else if (dq->parsed())
            o = cmd_dq(poly, side, index, flipped, mode_name, dq_n, dq_m);
        else if (conj->parsed())
            o = cmd_conjugate_check(src, side, index, xi, check_degree);
        else if (g_fisher->parsed())
            o = cmd_gaussian_fisher(src, t);
        else if (g_entropy->parsed())
            o = cmd_gaussian_entropy(src, quad, quad_tol);
        else if (g_dim->parsed())
            o = cmd_gaussian_dimension(src, limit, eps_seq);
        else if (g_mom->parsed())
            o = cmd_gaussian_moments(src, pattern, depth);
        else if (b_make->parsed())
            o = cmd_make_semicircular(c, points);
        else if (b_fisher->parsed())
            o = cmd_bipartite_fisher(grid_opts);
        else if (b_conj->parsed())
            o = cmd_bipartite_conjugate(grid_opts);
        else if (selftest->parsed())
            o = cmd_selftest();
        emit(o, format, out_path, force, quiet, out, err);
        return o.status;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace bifree::cli
